import numpy as np

from pytest import approx
from pytest import mark
from pytest import raises

from src.errors import AuditFailure
from src.errors import DomainError
from src.errors import PreconditionError
from src.geometry.domains import DomainSpec
from src.geometry.domains import hermitian
from src.geometry.domains import sample_boundary
from src.geometry.frame import boundary_frame
from src.geometry.frame import convexity_audit
from src.geometry.frame import h_product
from src.geometry.frame import levi_audit
from src.geometry.frame import nontangentiality
from src.geometry.frame import normal_split
from src.geometry.frame import project_to_boundary
from src.geometry.frame import signed_distance
from src.geometry.frame import tangent_basis


@mark.parametrize("z expected".split(), (([0, 0], -1.0),
                                         ([0.9, 0], -0.1),
                                         ([0, 1.5j], 0.5)))
def test_signed_distance_ball(ball, z, expected):
    assert signed_distance(ball, z) == approx(expected, abs=1e-12)


def test_signed_distance_ellipsoid_against_dense_sampling(ellipsoid):
    z = np.array([0.0, 0.25])
    theta = np.linspace(0, 2 * np.pi, 20001)
    # Real slice {z_1 = x, z_2 = y} holds the nearest point by symmetry.
    boundary = np.stack([np.cos(theta), 0.5 * np.sin(theta)], axis=1)
    brute = np.min(np.linalg.norm(boundary - z.real, axis=1))
    assert signed_distance(ellipsoid, z) == approx(-brute, abs=1e-6)


def test_signed_distance_outside_validity_region(ball):
    with raises(DomainError):
        signed_distance(ball, [2.5, 0])


def test_boundary_frame_ball(ball):
    frame = boundary_frame(ball, [0.9, 0])
    assert np.allclose(frame.nearest, [1, 0])
    assert frame.sdist == approx(-0.1)
    assert np.allclose(frame.gbar, [0.5, 0])

    frame = boundary_frame(ball, [0, 0.5j])
    assert np.allclose(frame.nearest, [0, 1j])
    assert np.allclose(frame.gbar, [0, 0.5j])


def test_boundary_frame_center_breaks_tie_along_first_axis(ball):
    frame = boundary_frame(ball, [0, 0])
    assert np.allclose(frame.nearest, [1, 0])


def test_boundary_frame_perturbed_residuals(perturbed):
    z = np.array([0.93, 0.05 + 0.02j])
    frame = boundary_frame(perturbed, z)
    assert np.linalg.norm(z - frame.nearest) == approx(abs(frame.sdist), abs=1e-10)
    assert abs(float(perturbed.defining(frame.nearest))) < 1e-10
    assert 2 * np.linalg.norm(frame.gbar) == approx(1.0)
    # z - p is parallel to the real normal at p.
    for v in tangent_basis(frame.nu).T:
        assert abs(np.real(hermitian(z - frame.nearest, v))) < 1e-10
        assert abs(np.real(hermitian(z - frame.nearest, 1j * v))) < 1e-10


def test_normal_split_axis_aligned(ball):
    frame = boundary_frame(ball, [0.9, 0])
    x_big, x_tan, xn = normal_split(frame, [0.3 - 0.2j, 0.7j])
    assert np.allclose(x_big, [0.3 - 0.2j, 0])
    assert np.allclose(x_tan, [0, 0.7j])
    assert xn == approx(0.3)


def test_normal_split_pure_normal(perturbed):
    frame = boundary_frame(perturbed, [0.9, 0.1j])
    _, x_tan, _ = normal_split(frame, frame.gbar)
    assert np.allclose(x_tan, 0)


def test_normal_split_ellipsoid(ellipsoid):
    frame = boundary_frame(ellipsoid, [0, 0.4])
    X = np.array([1.0, 1.0])
    x_big, x_tan, xn = normal_split(frame, X)
    assert np.allclose(frame.nu, [0, 1])
    assert np.allclose(x_big, [0, 1])
    assert abs(hermitian(x_big, x_tan)) < 1e-12
    assert xn <= np.linalg.norm(x_big) + 1e-12 <= np.linalg.norm(X) + 2e-12


@mark.parametrize("z w expected".split(), (([0, 0], [0, 0], 1.0),
                                           ([0.9, 0], [0, 0], np.sqrt(0.1))))
def test_h_product(ball, z, w, expected):
    assert h_product(ball, z, w) == approx(expected)


def test_h_product_outside(ball):
    with raises(DomainError):
        h_product(ball, [1.1, 0], [0, 0])


def test_levi_audit_examples(ball, ellipsoid):
    assert levi_audit(ball, [1, 0], [0, 1]) == approx(1.0)
    assert levi_audit(ellipsoid, [1, 0], [0, 1]) == approx(4.0)


def test_levi_audit_preconditions(ball):
    with raises(PreconditionError):
        levi_audit(ball, [0.5, 0], [0, 1])
    with raises(PreconditionError):
        levi_audit(ball, [1, 0], [1, 0])


def test_levi_audit_positive_on_perturbed_tangents(perturbed, rng):
    for p in sample_boundary(perturbed, 10, rng):
        for v in tangent_basis(perturbed.dbar(p)).T:
            assert levi_audit(perturbed, p, v) > 0


@mark.parametrize("domain expected".split(), ((DomainSpec.ball(2), 2.0),
                                              (DomainSpec.ellipsoid((1.0, 4.0)), 2.0)))
def test_convexity_audit_minimum(domain, expected):
    report = convexity_audit(domain, 20, seed=3)
    assert report.min_real_hessian == approx(expected)
    assert report.min_levi > 0


def test_convexity_audit_perturbed(perturbed):
    assert convexity_audit(perturbed, 50, seed=0).min_real_hessian > 0


def test_convexity_audit_names_witness():
    concave = DomainSpec.perturbed_ball(1, 0.7, {"x1^2*y1^2": -1.0})
    with raises(AuditFailure) as info:
        convexity_audit(concave, 50, seed=0)
    assert info.value.witness is not None
    assert info.value.value <= 0


def test_project_to_boundary_ball(ball):
    p, curvature = project_to_boundary(ball, [0.6, 0.3j])
    assert np.allclose(p, np.array([0.6, 0.3j]) / np.linalg.norm([0.6, 0.3]))
    assert curvature > 0


def test_nontangentiality(ball):
    frame = boundary_frame(ball, [0.9, 0])
    assert nontangentiality(frame, [0.9, 0], [0.8, 0]) == approx(1.0)
    assert nontangentiality(frame, [0.9, 0], [0.9, 0.1]) == approx(0.0, abs=1e-12)
    assert nontangentiality(frame, [0.9, 0], [0.9, 0]) == 0.0

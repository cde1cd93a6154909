import numpy as np

from pytest import mark
from pytest import raises
from hypothesis import given
from hypothesis.strategies import floats

from src.errors import DomainError
from src.errors import NumericalFailure
from src.geometry.domains import DomainSpec
from src.geometry.domains import as_point
from src.geometry.domains import boundary_point
from src.geometry.domains import format_monomial
from src.geometry.domains import parse_monomial
from src.geometry.domains import sample_boundary
from src.geometry.domains import to_real


def test_parse_monomial_indices_are_one_based():
    assert parse_monomial("x1^2*y2", 2) == (2, 0, 0, 1)
    assert parse_monomial("1", 2) == (0, 0, 0, 0)
    assert format_monomial((2, 0, 0, 1)) == "x1^2*y2"


@mark.parametrize("key", ("x3", "z1", "x1^5", "x1^2*y1^3", "x1**2"))
def test_parse_monomial_rejects(key):
    with raises(DomainError):
        parse_monomial(key, 2)


def test_from_json_variants(ellipsoid):
    assert DomainSpec.from_json({"variant": "ball", "dim": 3}) == DomainSpec.ball(3)
    assert DomainSpec.from_json({"variant": "ellipsoid", "dim": 2, "a": [1, 4]}) == ellipsoid
    spec = DomainSpec.from_json({"variant": "perturbed_ball", "dim": 2, "eta": 0.05, "q": {"x1^3": 1.0}})
    assert spec.to_json() == {"variant": "perturbed_ball", "dim": 2, "eta": 0.05, "q": {"x1^3": 1.0}}


@mark.parametrize("data", ({"variant": "torus", "dim": 2},
                           {"dim": 2},
                           {"variant": "ellipsoid", "dim": 2, "a": [1, -4]},
                           {"variant": "ellipsoid", "dim": 3, "a": [1, 4]}))
def test_from_json_rejects(data):
    with raises(DomainError):
        DomainSpec.from_json(data)


def test_load_reports_missing_file(tmp_path):
    with raises(DomainError):
        DomainSpec.load(tmp_path / "nope.json")


def test_load_reads_domain_file(domain_file):
    assert DomainSpec.load(domain_file({"variant": "ball", "dim": 2})) == DomainSpec.ball(2)


def test_as_point_checks_dimension():
    with raises(DomainError):
        as_point([0.1, 0.2], 3)
    with raises(DomainError):
        as_point([np.nan, 0.0])


def test_defining_values(ball, ellipsoid):
    assert ball.defining(np.zeros(2)) == -1.0
    assert np.isclose(ellipsoid.defining([0.0, 0.25]), -0.75)
    assert ellipsoid.contains([0.3, 0.2j])
    assert not ellipsoid.contains([0.0, 0.6])


def test_complex_hessians_of_ellipsoid(ellipsoid):
    assert np.allclose(ellipsoid.complex_hessian([0.1, 0.2]), np.diag([1.0, 4.0]))
    assert np.allclose(ellipsoid.harmonic_hessian([0.1, 0.2]), 0.0)


def test_real_gradient_matches_central_differences(perturbed):
    z = np.array([0.4 + 0.1j, -0.3 + 0.2j])
    u = to_real(z)
    step = 1e-6
    fd = np.zeros(4)
    for i in range(4):
        e = np.zeros(4)
        e[i] = step
        plus = u + e
        minus = u - e
        fd[i] = (perturbed.defining(plus[0::2] + 1j * plus[1::2])
                 - perturbed.defining(minus[0::2] + 1j * minus[1::2])) / (2 * step)
    assert np.allclose(perturbed.real_gradient(z), fd, atol=1e-8)


def test_real_hessian_matches_gradient_differences(perturbed):
    z = np.array([0.5 - 0.1j, 0.2 + 0.3j])
    u = to_real(z)
    step = 1e-6
    fd = np.zeros((4, 4))
    for i in range(4):
        e = np.zeros(4)
        e[i] = step
        plus, minus = u + e, u - e
        fd[:, i] = (perturbed.real_gradient(plus[0::2] + 1j * plus[1::2])
                    - perturbed.real_gradient(minus[0::2] + 1j * minus[1::2])) / (2 * step)
    assert np.allclose(perturbed.real_hessian(z), fd, atol=1e-6)


@given(floats(min_value=0, max_value=2 * np.pi))
def test_boundary_point_lies_on_boundary(theta):
    domain = DomainSpec.perturbed_ball(2, 0.05, {"x1^3": 1.0})
    p = boundary_point(domain, [np.cos(theta), np.sin(theta) * 1j])
    assert abs(float(domain.defining(p))) < 1e-12


def test_boundary_point_of_perturbed_ball_along_e1(perturbed):
    p = boundary_point(perturbed, [1, 0])
    assert abs(float(perturbed.defining(p))) < 1e-12
    assert p[1] == 0


def test_boundary_point_root_failure_is_numerical(perturbed, monkeypatch):
    def broken(*args, **kwargs):
        raise ValueError("rtol too small")

    monkeypatch.setattr("src.geometry.domains.brentq", broken)
    with raises(NumericalFailure):
        boundary_point(perturbed, [1, 0])


def test_boundary_point_of_ellipsoid(ellipsoid):
    assert np.allclose(boundary_point(ellipsoid, [0, 1]), [0, 0.5])
    with raises(DomainError):
        boundary_point(ellipsoid, [0, 0])


def test_sample_boundary_shape(ball, rng):
    pts = sample_boundary(ball, 5, rng)
    assert pts.shape == (5, 2)
    assert np.allclose(np.linalg.norm(pts, axis=1), 1.0)

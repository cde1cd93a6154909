import numpy as np

from pytest import approx
from pytest import mark
from pytest import raises
from hypothesis import given
from hypothesis.strategies import floats

from src.errors import DegenerateInputError
from src.errors import DomainError
from src.errors import UnsupportedDomainError
from src.geometry.ball import balanced_distance_from_origin
from src.geometry.ball import ball_automorphism
from src.geometry.ball import ball_distance
from src.geometry.ball import ball_extremal_dir
from src.geometry.ball import ball_geodesic
from src.geometry.ball import ball_metric
from src.geometry.ball import minkowski_functional
from src.geometry.disc import disc_distance
from src.solver.discs import disc_diameter

radius = floats(min_value=0, max_value=0.95)
angle = floats(min_value=0, max_value=2 * np.pi)


@mark.parametrize("z w expected".split(), (([0.2, 0.1j], [0.2, 0.1j], 0.0),
                                           ([0, 0], [0.5, 0], 0.549306)))
def test_ball_distance_examples(z, w, expected):
    assert ball_distance(z, w) == approx(expected, abs=1e-6)


def test_ball_distance_symmetric_under_swap():
    assert ball_distance([0.3, 0], [0, 0.3]) == approx(ball_distance([0, 0.3], [0.3, 0]), abs=1e-15)


@given(radius, angle, radius, angle)
def test_ball_distance_restricts_to_disc(r1, t1, r2, t2):
    zeta, eta = r1 * np.exp(1j * t1), r2 * np.exp(1j * t2)
    assert ball_distance([zeta, 0], [eta, 0]) == approx(disc_distance(zeta, eta), abs=1e-12)


def test_ball_distance_outside():
    with raises(DomainError):
        ball_distance([1.0, 0], [0, 0])


def test_ball_distance_invariant_under_automorphism():
    a = np.array([0.3, -0.2j])
    phi = ball_automorphism(a)
    z, w = np.array([0.1, 0.5]), np.array([-0.4j, 0.2])
    assert ball_distance(phi(z), phi(w)) == approx(ball_distance(z, w), abs=1e-12)
    assert np.allclose(phi(a), 0)
    assert np.allclose(phi(np.zeros(2)), a)
    assert np.allclose(phi(phi(z)), z)


def test_ball_geodesic_linear_slices():
    spec = ball_geodesic([0, 0], [0.5, 0])
    assert spec.alpha == approx(0.5)
    assert np.allclose(spec.evaluate(0.3j), [0.3j, 0])

    spec = ball_geodesic([0, 0], [0.3, 0.4j])
    assert spec.alpha == approx(0.5)
    assert np.allclose(spec.evaluate(0.7), 0.7 * np.array([0.6, 0.8j]))


@mark.parametrize("z w".split(), (([0.5, 0], [0.7, 0]),
                                  ([0.9, 0.1], [0.9, -0.1]),
                                  ([0.2j, 0.3], [-0.5, 0.1 + 0.1j])))
def test_ball_geodesic_pullback(z, w):
    spec = ball_geodesic(z, w)
    assert np.allclose(spec.evaluate(0), z, atol=1e-12)
    assert np.allclose(spec.evaluate(spec.alpha), w, atol=1e-12)
    assert disc_distance(0, spec.alpha) == approx(ball_distance(z, w), abs=1e-12)
    assert np.allclose(np.linalg.norm(spec.boundary_values(64), axis=1), 1.0, atol=1e-12)


@mark.parametrize("z w".split(), (([0.5, 0], [0.7, 0]),
                                  ([0.9, 0.1], [0.9, -0.1]),
                                  ([0.2j, 0.3], [-0.5, 0.1 + 0.1j])))
def test_ball_geodesic_disc_is_phi(z, w):
    spec = ball_geodesic(z, w)
    disc = spec.disc
    assert np.allclose(disc.center, z, atol=1e-12)
    assert np.allclose(disc.evaluate(spec.alpha), w, atol=1e-12)
    zeta = np.array([0.0, 0.3, -0.2 + 0.4j, 0.8j])
    inner = (spec.rotation * zeta + spec.root) / (1 + np.conj(spec.root) * spec.rotation * zeta)
    assert np.allclose(disc.evaluate(zeta), spec.slice_disc.evaluate(inner), atol=1e-12)
    assert np.allclose(spec.slice_disc.center, z - spec.root * spec.slice_disc.coeffs[1], atol=1e-12)


def test_ball_geodesic_derivative_matches_differences():
    spec = ball_geodesic([0.5, 0.1], [0.2, -0.3j])
    zeta, h = 0.2 + 0.1j, 1e-6
    fd = (spec.evaluate(zeta + h) - spec.evaluate(zeta - h)) / (2 * h)
    assert np.allclose(spec.derivative(zeta), fd, atol=1e-8)


def test_ball_geodesic_radial_diameter():
    spec = ball_geodesic([0.9, 0], [0.8, 0])
    assert disc_diameter(spec, 128) == approx(2.0, abs=1e-3)


def test_ball_geodesic_degenerate():
    with raises(DegenerateInputError):
        ball_geodesic([0.1, 0], [0.1, 0])


@mark.parametrize("z X expected".split(), (([0, 0], [1, 0], 1.0),
                                           ([0, 0], [0, 2], 2.0),
                                           ([0.9, 0], [0, 1], 1 / np.sqrt(0.19))))
def test_ball_metric(z, X, expected):
    assert ball_metric(z, X) == approx(expected)


def test_ball_extremal_dir_alpha_is_metric():
    z, X = [0.9, 0.1j], [0.3, 1 - 0.5j]
    spec = ball_extremal_dir(z, X)
    assert spec.alpha == approx(ball_metric(z, X))
    assert np.allclose(spec.evaluate(0), z)
    assert np.allclose(spec.alpha * spec.derivative(0), X)


@mark.parametrize("w expected".split(), (([0, 0.25], 0.5), ([0.3, 0.2], 0.5)))
def test_minkowski_functional_ellipsoid(ellipsoid, w, expected):
    assert minkowski_functional(ellipsoid, w) == approx(expected)


def test_balanced_distance_from_origin(ball, ellipsoid, perturbed):
    assert balanced_distance_from_origin(ball, [0.5, 0]) == approx(np.arctanh(0.5))
    assert balanced_distance_from_origin(ellipsoid, [0, 0.25]) == approx(0.549306, abs=1e-6)
    with raises(UnsupportedDomainError):
        balanced_distance_from_origin(perturbed, [0.5, 0])
    with raises(DegenerateInputError):
        balanced_distance_from_origin(ball, [0, 0])

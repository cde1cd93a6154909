"""
ball.py

Closed-form Kobayashi geometry of the unit ball, used as ground truth.

Nothing in the solver depends on this module; tests and the campaign's
oracle path compare against it.

Responsibilities:
- Ball distance and metric, ball automorphisms
- Complex geodesics of the ball (affine slices composed with disc automorphisms)
- Distance from the origin in balanced domains via the Minkowski functional
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.errors import DegenerateInputError, DomainError, UnsupportedDomainError
from src.geometry.disc import atanh_clamped
from src.geometry.domains import DomainSpec, as_point, hermitian
from src.solver.discs import AnalyticDisc

logger = logging.getLogger(__name__)


def _inside_ball(z, name: str) -> np.ndarray:
    z = as_point(z)
    if not np.linalg.norm(z) < 1.0:
        raise DomainError(f"{name} {np.round(z, 6).tolist()} lies outside the unit ball")
    return z


def ball_distance(z, w) -> float:
    """tanh^-1 sqrt(1 - (1 - |z|^2)(1 - |w|^2) / |1 - <z, w>|^2)."""
    z, w = _inside_ball(z, "z"), _inside_ball(w, "w")
    if z.size != w.size:
        raise DomainError("z and w have different dimensions")
    # |1 - <z, w>|^2 - (1 - |z|^2)(1 - |w|^2) = |z - w|^2 - (|z|^2 |w|^2 - |<z, w>|^2),
    # the bracket written as a sum of squares so nearby points do not cancel.
    diff = z - w
    cross = np.outer(z, w) - np.outer(w, z)
    num = np.vdot(diff, diff).real - 0.5 * np.sum(np.abs(cross) ** 2)
    den = abs(1.0 - hermitian(z, w)) ** 2
    return atanh_clamped(np.sqrt(max(num / den, 0.0)))


def ball_metric(z, X) -> float:
    """Kobayashi metric of the ball: sqrt(|X|^2 / (1 - |z|^2) + |<X, z>|^2 / (1 - |z|^2)^2)."""
    z = _inside_ball(z, "z")
    X = as_point(X, z.size)
    s = 1.0 - np.vdot(z, z).real
    return float(np.sqrt(np.vdot(X, X).real / s + abs(hermitian(X, z)) ** 2 / s ** 2))


def ball_automorphism(a):
    """
    The involutive automorphism phi_a of the ball exchanging a and 0.

    phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>), s_a = sqrt(1 - |a|^2).
    """
    a = _inside_ball(a, "a")
    aa = np.vdot(a, a).real
    s_a = np.sqrt(1.0 - aa)

    def phi(z):
        z = np.asarray(z, dtype=complex)
        za = z @ np.conj(a)
        proj = (za[..., None] * a / aa) if aa > 0 else np.zeros_like(z)
        return (a - proj - s_a * (z - proj)) / (1.0 - za)[..., None]

    return phi


@dataclass(frozen=True)
class BallGeodesicSpec:
    """
    Complex geodesic of the ball through z and w.

    The image is the affine slice psi(xi) = c + rho xi u (`slice_disc`, centered at
    the slice center c, not at z). The geodesic itself is
    phi(zeta) = psi(m(rotation * zeta)) with m(xi) = (xi + root) / (1 + conj(root) xi),
    so phi(0) = z and phi(alpha) = w; `disc` is phi as a tilted AnalyticDisc.
    """

    slice_disc: AnalyticDisc
    root: complex
    rotation: complex
    alpha: float

    @property
    def disc(self) -> AnalyticDisc:
        """phi with c_0 = phi(0) = z."""
        coeffs = self.slice_disc.coeffs.copy()
        coeffs[0] = coeffs[0] + self.root * coeffs[1]
        return AnalyticDisc(coeffs, tilt=(self.root, self.rotation))

    def evaluate(self, zeta) -> np.ndarray:
        return self.disc.evaluate(zeta)

    def derivative(self, zeta) -> np.ndarray:
        return self.disc.derivative(zeta)

    @property
    def tilt(self):
        return self.disc.tilt

    def boundary_values(self, M: int) -> np.ndarray:
        """Image of the unit circle, sampled uniformly on the slice."""
        return self.disc.boundary_values(M)

    def boundary_nodes(self, M: int) -> np.ndarray:
        return self.disc.boundary_nodes(M)

    def is_constant(self) -> bool:
        return self.slice_disc.is_constant()

    def to_json(self) -> dict:
        return {
            "disc": self.disc.to_json(),
            "slice_disc": self.slice_disc.to_json(),
            "root": [float(np.real(self.root)), float(np.imag(self.root))],
            "rotation": [float(np.real(self.rotation)), float(np.imag(self.rotation))],
            "alpha": float(self.alpha),
        }


def _slice(z: np.ndarray, u: np.ndarray, degree: int):
    """Affine slice of the ball through z in the unit direction u: center, radius, root."""
    b = hermitian(z, u)
    center = z - b * u
    rho = np.sqrt(1.0 - np.vdot(z, z).real + abs(b) ** 2)
    disc = AnalyticDisc.linear(center, rho * u, degree)
    return disc, b / rho, rho


def ball_geodesic(z, w, degree: int = 1) -> BallGeodesicSpec:
    """
    Complex geodesic through z and w with phi(0) = z, phi(alpha) = w, alpha in [0, 1).

    Raises:
        DegenerateInputError: z = w.
    """
    z, w = _inside_ball(z, "z"), _inside_ball(w, "w")
    chord = np.linalg.norm(w - z)
    if chord == 0:
        raise DegenerateInputError("ball_geodesic needs z != w")
    u = (w - z) / chord
    disc, xi_z, rho = _slice(z, u, degree)
    xi_w = xi_z + chord / rho
    v = (xi_w - xi_z) / (1.0 - np.conj(xi_z) * xi_w)
    alpha = abs(v)
    logger.debug("[ORACLE] ball geodesic alpha=%.12g", alpha)
    return BallGeodesicSpec(slice_disc=disc, root=complex(xi_z), rotation=complex(v / alpha), alpha=float(alpha))


def ball_extremal_dir(z, X, degree: int = 1) -> BallGeodesicSpec:
    """Extremal disc for the metric at z in direction X; alpha = ball_metric(z, X)."""
    z = _inside_ball(z, "z")
    X = as_point(X, z.size)
    norm = np.linalg.norm(X)
    if norm == 0:
        raise DegenerateInputError("ball_extremal_dir needs X != 0")
    disc, xi_z, rho = _slice(z, X / norm, degree)
    alpha = norm / (rho * (1.0 - abs(xi_z) ** 2))
    return BallGeodesicSpec(slice_disc=disc, root=complex(xi_z), rotation=1.0 + 0j, alpha=float(alpha))


def minkowski_functional(domain: DomainSpec, w) -> float:
    """Gauge mu(w) = inf{t > 0 : w / t in D} of a balanced ball or ellipsoid."""
    w = as_point(w, domain.dim)
    if domain.variant == "ball":
        return float(np.linalg.norm(w))
    if domain.variant == "ellipsoid":
        return float(np.sqrt(np.abs(w) ** 2 @ np.asarray(domain.a)))
    raise UnsupportedDomainError(f"no balanced oracle for the {domain.variant} variant")


def balanced_distance_from_origin(domain: DomainSpec, w) -> float:
    """k_D(0, w) = tanh^-1 mu(w) for balanced convex domains."""
    mu = minkowski_functional(domain, w)
    if mu == 0:
        raise DegenerateInputError("balanced oracle needs w != 0")
    if mu >= 1:
        raise DomainError("w lies outside the domain")
    return atanh_clamped(mu)

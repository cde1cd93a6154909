"""
discs.py

Polynomial analytic discs phi(zeta) = sum_k c_k zeta^k, Delta -> C^d, optionally
precomposed with a disc automorphism.

Responsibilities:
- `AnalyticDisc` evaluation, derivative and boundary sampling
- Euclidean diameter of a disc image on a boundary grid
- Least-squares refit of boundary samples, and of images of discs under holomorphic maps
- Interior sampling grid shared by the solver and the harness
"""

import logging
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np
from scipy.spatial.distance import pdist

from src.config import INTERIOR_POINTS, INTERIOR_RADIUS
from src.errors import DegenerateInputError, DomainError
from src.geometry.domains import to_real

logger = logging.getLogger(__name__)


def boundary_grid(M: int) -> np.ndarray:
    """The M-th roots of unity e^{i 2 pi j / M}."""
    if M < 1:
        raise DomainError("boundary grid needs at least one sample")
    return np.exp(2j * np.pi * np.arange(M) / M)


def interior_grid(n: int = INTERIOR_POINTS, radius: float = INTERIOR_RADIUS) -> np.ndarray:
    """
    n points in {|zeta| <= radius}: four concentric rings of n / 4 angles each.

    Rings are staggered by half an angle step so no two rings share a ray.
    """
    rings = 4
    per_ring = max(n // rings, 1)
    pts = []
    for k in range(1, rings + 1):
        offset = np.pi * (k % 2) / per_ring
        angles = offset + 2 * np.pi * np.arange(per_ring) / per_ring
        pts.append(radius * k / rings * np.exp(1j * angles))
    return np.concatenate(pts)[:n]


@dataclass(frozen=True)
class AnalyticDisc:
    """
    Polynomial disc given by its Taylor coefficients, optionally precomposed with a
    disc automorphism.

    With tilt (p, E) the disc is

        phi(zeta) = c_0 + sum_{k >= 1} c_k (T(zeta)^k - p^k),  T(zeta) = (E zeta + p) / (1 + conj(p) E zeta),

    so phi(0) = c_0 always. The default tilt (0, 1) is the plain polynomial
    sum_k c_k zeta^k; |E| < 1 encodes the radial reparametrization phi(s zeta).

    Attributes:
        coeffs (np.ndarray): (K + 1, d) complex matrix, row k holds c_k.
        fit_residual (float): Max boundary mismatch when the disc is a least-squares refit.
        tilt (tuple): (p, E) with |p| < 1 and 0 < |E| <= 1.
    """

    coeffs: np.ndarray
    fit_residual: float = 0.0
    tilt: Tuple[complex, complex] = (0j, 1 + 0j)

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=complex))
        if not np.all(np.isfinite(c)):
            raise DomainError("disc coefficients must be finite")
        p, scale = complex(self.tilt[0]), complex(self.tilt[1])
        if not abs(p) < 1.0 or not 0.0 < abs(scale) <= 1.0 + 1e-12:
            raise DomainError(f"invalid disc tilt p={p}, E={scale}")
        if p == 0 and scale != 1:
            c = c * (scale ** np.arange(c.shape[0]))[:, None]
            scale = 1 + 0j
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "tilt", (p, scale))

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def center(self) -> np.ndarray:
        return self.coeffs[0].copy()

    @property
    def is_tilted(self) -> bool:
        return self.tilt != (0j, 1 + 0j)

    @classmethod
    def constant(cls, z, degree: int = 0) -> "AnalyticDisc":
        z = np.asarray(z, dtype=complex)
        coeffs = np.zeros((degree + 1, z.size), dtype=complex)
        coeffs[0] = z
        return cls(coeffs)

    @classmethod
    def linear(cls, z, v, degree: int = 1) -> "AnalyticDisc":
        """zeta -> z + zeta * v, stored at the requested degree."""
        disc = cls.constant(z, max(degree, 1))
        disc.coeffs[1] = np.asarray(v, dtype=complex)
        return disc

    def with_degree(self, degree: int) -> "AnalyticDisc":
        """Zero-pad or truncate to a new degree."""
        coeffs = np.zeros((degree + 1, self.dim), dtype=complex)
        keep = min(degree, self.degree) + 1
        coeffs[:keep] = self.coeffs[:keep]
        return AnalyticDisc(coeffs, tilt=self.tilt)

    def inner(self, zeta) -> np.ndarray:
        """T(zeta); the identity for an untilted disc."""
        p, scale = self.tilt
        zeta = np.asarray(zeta, dtype=complex)
        return (scale * zeta + p) / (1.0 + np.conj(p) * scale * zeta)

    def boundary_circle(self) -> Tuple[complex, float]:
        """Center and radius of the circle T(unit circle)."""
        p, scale = self.tilt
        s2 = abs(scale) ** 2
        den = 1.0 - abs(p) ** 2 * s2
        return p * (1.0 - s2) / den, float(np.sqrt(s2) * (1.0 - abs(p) ** 2) / den)

    def _basis_at(self, xi) -> np.ndarray:
        p = self.tilt[0]
        k = np.arange(self.degree + 1)
        out = np.asarray(xi, dtype=complex)[..., None] ** k - p ** k
        out[..., 0] = 1.0
        return out

    def basis(self, zeta) -> np.ndarray:
        """Rows [1, T - p, T^2 - p^2, ...] so that phi(zeta) = basis(zeta) @ coeffs."""
        return self._basis_at(self.inner(zeta))

    def boundary_basis(self, M: int) -> np.ndarray:
        """Basis rows at M points spaced uniformly along T(unit circle)."""
        center, radius = self.boundary_circle()
        return self._basis_at(center + radius * boundary_grid(M))

    def boundary_nodes(self, M: int) -> np.ndarray:
        """Points of the unit circle whose images are `boundary_values(M)`; the roots of unity when untilted."""
        p, scale = self.tilt
        center, radius = self.boundary_circle()
        xi = center + radius * boundary_grid(M)
        return (xi - p) / (scale * (1.0 - np.conj(p) * xi))

    def evaluate(self, zeta) -> np.ndarray:
        """phi(zeta); scalar input gives shape (d,), array input shape (n, d)."""
        return self.basis(zeta) @ self.coeffs

    def derivative(self, zeta) -> np.ndarray:
        zeta = np.asarray(zeta, dtype=complex)
        k = np.arange(1, self.degree + 1)
        if not k.size:
            return np.zeros(zeta.shape + (self.dim,), dtype=complex)
        p, scale = self.tilt
        inner_prime = scale * (1.0 - abs(p) ** 2) / (1.0 + np.conj(p) * scale * zeta) ** 2
        powers = self.inner(zeta)[..., None] ** (k - 1)
        return (powers @ (k[:, None] * self.coeffs[1:])) * np.asarray(inner_prime)[..., None]

    def boundary_values(self, M: int) -> np.ndarray:
        """M samples of phi(unit circle), uniform along T(unit circle); phi(zeta_j) when untilted."""
        return self.boundary_basis(M) @ self.coeffs

    def is_constant(self) -> bool:
        return not np.any(np.abs(self.coeffs[1:]) > 0)

    def to_json(self) -> dict:
        p, scale = self.tilt
        return {
            "degree": self.degree,
            "coeffs": [[[float(c.real), float(c.imag)] for c in row] for row in self.coeffs],
            "fit_residual": float(self.fit_residual),
            "tilt": [[float(p.real), float(p.imag)], [float(scale.real), float(scale.imag)]],
        }

    @classmethod
    def from_json(cls, data: dict) -> "AnalyticDisc":
        coeffs = np.array([[complex(re, im) for re, im in row] for row in data["coeffs"]])
        tilt = tuple(complex(re, im) for re, im in data.get("tilt", ((0.0, 0.0), (1.0, 0.0))))
        return cls(coeffs, float(data.get("fit_residual", 0.0)), tilt)


def disc_diameter(disc, M: int) -> float:
    """
    Max pairwise Euclidean distance over M boundary samples phi(e^{i theta_j}).

    Accepts any disc exposing `boundary_values(M)`.
    """
    samples = np.asarray(disc.boundary_values(M))
    if samples.shape[0] < 2:
        return 0.0
    return float(np.max(pdist(to_real(samples))))


def fit_disc(samples: np.ndarray, zeta: np.ndarray, degree: int,
             tilt: Tuple[complex, complex] = (0j, 1 + 0j)) -> AnalyticDisc:
    """
    Least-squares disc of the given degree through (zeta_j, samples_j).

    Args:
        samples (np.ndarray): (M, d) complex values.
        zeta (np.ndarray): (M,) complex nodes, typically the boundary grid.
        degree (int): Degree K' of the fitted disc.
        tilt (tuple): Automorphism (p, E) of the fitted disc; a plain polynomial by default.

    Returns:
        AnalyticDisc: Fitted disc with the max sample mismatch as fit_residual.
    """
    samples = np.asarray(samples, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    if zeta.size < degree + 1:
        raise DegenerateInputError(f"{zeta.size} samples cannot determine a degree-{degree} disc")
    template = AnalyticDisc(np.zeros((degree + 1, samples.shape[1]), dtype=complex), tilt=tilt)
    vander = template.basis(zeta)
    coeffs, *_ = np.linalg.lstsq(vander, samples, rcond=None)
    residual = float(np.max(np.abs(vander @ coeffs - samples)))
    return AnalyticDisc(coeffs, residual, tilt=template.tilt)


def map_disc(disc, transform: Callable[[np.ndarray], np.ndarray], M: int, degree: int) -> AnalyticDisc:
    """
    transform o phi refit from M boundary samples, in the automorphism frame of phi.

    `transform` must be holomorphic on a neighbourhood of the disc's image and act
    row-wise on (M, d) arrays.
    """
    return fit_disc(transform(np.asarray(disc.boundary_values(M))), disc.boundary_nodes(M), degree, disc.tilt)

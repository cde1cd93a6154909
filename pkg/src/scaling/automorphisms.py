"""
automorphisms.py

The scaling family near e_1 = (1, 0'): Mobius maps m_t, ball automorphisms A_t,
the rescaled defining functions r_t, the touching parameter t of a disc and
the transport of discs by A_t^{-1}.
"""

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Tuple

import numpy as np

from src.errors import DegenerateInputError, DomainError, PreconditionError
from src.geometry.domains import DomainSpec, as_point
from src.solver.discs import AnalyticDisc, disc_diameter, map_disc

if TYPE_CHECKING:
    from src.scaling.normalize import NormalizationMap

logger = logging.getLogger(__name__)

TOUCHING_TOL = 1e-10


@dataclass(frozen=True)
class ScalingParams:
    """
    Scaling parameters of a disc near e_1.

    Attributes:
        t (float, optional): Touching parameter in (0, 1]; 1 only when at_boundary.
        eta_touch (complex, optional): Grid point where A_t^{-1} o phi touches {Re z_1 = 0}.
        gamma (complex): Normal-form coefficient, z-tilde = (1 - s + gamma s^2, 0').
        rho_star (float, optional): min Re phi_1 / (1 + |phi_1|^2) over the grid.
        at_boundary (bool): rho_star reached 1/2, so t = 1 and no scaling exists.
    """

    t: Optional[float] = None
    eta_touch: Optional[complex] = None
    gamma: complex = 0j
    rho_star: Optional[float] = None
    at_boundary: bool = False

    def to_json(self) -> dict:
        def pair(c):
            return None if c is None else [float(np.real(c)), float(np.imag(c))]

        return {
            "t": self.t,
            "eta_touch": pair(self.eta_touch),
            "gamma": pair(self.gamma),
            "rho_star": self.rho_star,
            "at_boundary": self.at_boundary,
        }


def mobius_mt(t: float, lam):
    """m_t(lambda) = (lambda + t) / (1 + t lambda); t in (-1, 1) so m_{-t} inverts m_t."""
    if not -1.0 < t < 1.0:
        raise PreconditionError(f"m_t needs |t| < 1, got {t}")
    lam = np.asarray(lam, dtype=complex)
    den = 1.0 + t * lam
    if np.any(den == 0):
        raise DomainError("m_t has a pole at lambda = -1/t")
    out = (lam + t) / den
    return complex(out) if out.ndim == 0 else out


def cayley_At(t: float, z) -> np.ndarray:
    """A_t(z) = (m_t(z_1), sqrt(1 - t^2) z' / (1 + t z_1)); vectorized over leading axes."""
    if not -1.0 < t < 1.0:
        raise PreconditionError(f"A_t needs |t| < 1, got {t}")
    z = np.asarray(z, dtype=complex)
    z1 = z[..., 0]
    den = 1.0 + t * z1
    if np.any(den == 0):
        raise DomainError("A_t has a pole at z_1 = -1/t")
    out = np.empty_like(z)
    out[..., 0] = (z1 + t) / den
    out[..., 1:] = np.sqrt(1.0 - t * t) * z[..., 1:] / den[..., None]
    return out


def cayley_At_inverse(t: float, z) -> np.ndarray:
    """A_t^{-1} = A_{-t}."""
    return cayley_At(-t, z)


def scaled_defining_rt(domain: DomainSpec, t: float, z, nmap: "NormalizationMap" = None) -> np.ndarray:
    """
    r_t(z) = |1 + t z_1|^2 / (1 - t^2) * r(A_t(z)), on {Re z_1 > -1/2}.

    r is the defining function in normalized coordinates: `nmap.pull_defining` when a
    normalization map is given, else the raw defining function (already normal at
    e_1 for the ball). For the unit ball r_t(z) = |z|^2 - 1 for every t; after
    normalization r_t converges to |z|^2 - 1 as t -> 1.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z[..., 0].real <= -0.5):
        raise PreconditionError("r_t is only defined on {Re z_1 > -1/2}")
    factor = np.abs(1.0 + t * z[..., 0]) ** 2 / (1.0 - t * t)
    moved = cayley_At(t, z)
    values = domain.defining(moved) if nmap is None else nmap.pull_defining(domain, moved)
    return factor * values


def choose_t(disc, M: int) -> ScalingParams:
    """
    Touching parameter t with t / (1 + t^2) = min_grid Re phi_1 / (1 + |phi_1|^2).

    A_t^{-1} o phi then lies in {Re z_1 >= 0} and touches {Re z_1 = 0} at eta_touch
    (exactly at that grid point).

    Raises:
        PreconditionError: The disc leaves {Re z_1 > 0} (rho_star <= 0) or rho_star > 1/2.
    """
    zeta = disc.boundary_nodes(M)
    phi1 = np.asarray(disc.boundary_values(M))[:, 0]
    ratios = phi1.real / (1.0 + np.abs(phi1) ** 2)
    j = int(np.argmin(ratios))
    rho = float(ratios[j])
    if rho <= 0:
        raise PreconditionError(f"disc leaves the half-space Re z_1 > 0 (rho*={rho:.3e})")
    if rho > 0.5 + 1e-12:
        raise PreconditionError(f"rho*={rho} exceeds 1/2, impossible for a disc in the ball")
    if rho >= 0.5 - 1e-15:
        logger.warning("[SCALE] rho* = 1/2: touching parameter at the boundary t = 1")
        return ScalingParams(t=1.0, eta_touch=complex(zeta[j]), rho_star=rho, at_boundary=True)
    t = (1.0 - np.sqrt(1.0 - 4.0 * rho * rho)) / (2.0 * rho)
    if abs(t / (1.0 + t * t) - rho) > TOUCHING_TOL:
        raise PreconditionError("touching equation not satisfied to tolerance")
    logger.debug("[SCALE] rho*=%.12g -> t=%.12g at eta=%s", rho, t, np.round(zeta[j], 6))
    return ScalingParams(t=float(t), eta_touch=complex(zeta[j]), rho_star=rho)


def transport_disc(t: float, disc, M: int, degree: int) -> AnalyticDisc:
    """
    Refit A_t^{-1} o phi from M boundary samples as a degree-K' disc in the frame of phi.

    The least-squares mismatch is stored as `fit_residual`.
    """
    fitted = map_disc(disc, lambda z: cayley_At_inverse(t, z), M, degree)
    logger.debug("[SCALE] transport t=%.6g refit residual %.3e", t, fitted.fit_residual)
    return fitted


def claim_diameter(t: float, disc, M: int) -> float:
    """diam(A_t^{-1} o phi) on the boundary grid."""

    class _Transported:
        def boundary_values(self, m):
            return cayley_At_inverse(t, np.asarray(disc.boundary_values(m)))

    return disc_diameter(_Transported(), M)


def tangential_ratio(t: float, x, y) -> Tuple[float, float]:
    """
    sqrt(1 - t^2) |x_1 - y_1| / (|1 + t x_1| |y_T|), with y_T = (0, y_2, ..., y_d).

    Returns:
        Tuple[float, float]: (ratio, sqrt(1 - t^2))

    Raises:
        DegenerateInputError: y_T = 0.
    """
    x, y = as_point(x), as_point(y)
    y_t = np.linalg.norm(y[1:])
    if y_t == 0:
        raise DegenerateInputError("tangential part of y vanishes")
    factor = float(np.sqrt(1.0 - t * t))
    return float(factor * abs(x[0] - y[0]) / (abs(1.0 + t * x[0]) * y_t)), factor


def touching_identity(t: float, phi1_eta: complex) -> Tuple[float, float]:
    """Both sides of (1 - t)^2 / (1 + t^2) = |1 - phi_1(eta)|^2 / (1 + |phi_1(eta)|^2)."""
    lhs = (1.0 - t) ** 2 / (1.0 + t * t)
    rhs = abs(1.0 - phi1_eta) ** 2 / (1.0 + abs(phi1_eta) ** 2)
    return float(lhs), float(rhs)


def sqrt_one_minus_t2_ratio(t: float, phi1_eta: complex) -> float:
    """sqrt(1 - t^2) / |1 - phi_1(eta)|; stays bounded as t -> 1."""
    gap = abs(1.0 - phi1_eta)
    if gap == 0:
        raise DegenerateInputError("phi_1(eta) = 1")
    return float(np.sqrt(1.0 - t * t) / gap)

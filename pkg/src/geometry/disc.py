"""Hyperbolic geometry of the unit disc and the left half-plane {Re < 0}."""

import logging
from typing import Tuple

import numpy as np

from src.config import ATANH_CLAMP
from src.errors import DomainError, NumericalFailure

logger = logging.getLogger(__name__)


def atanh_clamped(t: float) -> float:
    """
    tanh^-1 t = 1/2 log((1 + t) / (1 - t)) for t in [0, 1).

    Arguments in (1 - 1e-15, 1) are clamped to 1 - 1e-15; t >= 1 overflows.
    """
    t = float(t)
    if not np.isfinite(t) or t < 0:
        raise NumericalFailure(f"tanh^-1 argument {t} outside [0, 1)")
    if t >= 1.0:
        raise NumericalFailure(f"tanh^-1 overflow: argument {t!r} >= 1")
    t = min(t, 1.0 - ATANH_CLAMP)
    return 0.5 * np.log((1.0 + t) / (1.0 - t))


def _disc_point(zeta, name: str = "point") -> complex:
    zeta = complex(zeta)
    if not abs(zeta) < 1.0:
        raise DomainError(f"{name} {zeta} is not in the unit disc")
    return zeta


def _halfplane_point(a, name: str = "point") -> complex:
    a = complex(a)
    if not a.real < 0:
        raise DomainError(f"{name} {a} is not in the left half-plane")
    return a


def disc_distance(zeta, eta) -> float:
    """Poincare distance k_Delta(zeta, eta) = tanh^-1 |(zeta - eta) / (1 - conj(zeta) eta)|."""
    zeta, eta = _disc_point(zeta, "zeta"), _disc_point(eta, "eta")
    if zeta == eta:
        return 0.0
    return atanh_clamped(abs((zeta - eta) / (1.0 - zeta.conjugate() * eta)))


def disc_metric(zeta, X) -> float:
    """Infinitesimal Poincare metric |X| / (1 - |zeta|^2)."""
    zeta = _disc_point(zeta, "zeta")
    return abs(complex(X)) / (1.0 - abs(zeta) ** 2)


def disc_boundary_dist(zeta) -> float:
    return 1.0 - abs(_disc_point(zeta, "zeta"))


def disc_lower_bound(zeta, eta) -> float:
    """log(1 + |zeta - eta| / (2 delta(zeta)^{1/2} delta(eta)^{1/2})), a lower bound of k_Delta."""
    zeta, eta = _disc_point(zeta, "zeta"), _disc_point(eta, "eta")
    h = np.sqrt(disc_boundary_dist(zeta) * disc_boundary_dist(eta))
    return float(np.log1p(abs(zeta - eta) / (2.0 * h)))


def disc_automorphism(a, theta: float = 0.0):
    """The automorphism zeta -> e^{i theta} (zeta - a) / (1 - conj(a) zeta), sending a to 0."""
    a = _disc_point(a, "a")
    rot = np.exp(1j * theta)

    def m(zeta):
        zeta = np.asarray(zeta, dtype=complex)
        return rot * (zeta - a) / (1.0 - np.conj(a) * zeta)

    return m


def cayley_to_disc(a):
    """Conformal map of {Re < 0} onto the unit disc sending a to 0."""
    a = _halfplane_point(a, "a")

    def c(x):
        x = np.asarray(x, dtype=complex)
        return (x - a) / (x + np.conj(a))

    return c


def halfplane_distance(a, b) -> float:
    """Poincare distance of {Re < 0}: tanh^-1 |(a - b) / (a + conj(b))|."""
    a, b = _halfplane_point(a, "a"), _halfplane_point(b, "b")
    if a == b:
        return 0.0
    return atanh_clamped(abs((a - b) / (a + b.conjugate())))


def halfplane_log_lower(a, b) -> float:
    """1/2 |log(Re b / Re a)|, attained by halfplane_distance for real a, b."""
    a, b = _halfplane_point(a, "a"), _halfplane_point(b, "b")
    return 0.5 * abs(np.log(b.real / a.real))


def mean_log_inequality(x1: float, x2: float) -> Tuple[float, float]:
    """(max(log(1 + x1), log(1 + x2)), log(1 + (x1 + x2) / 2)); the first dominates."""
    if x1 < 0 or x2 < 0:
        raise DomainError("mean_log_inequality needs nonnegative arguments")
    return max(np.log1p(x1), np.log1p(x2)), float(np.log1p(0.5 * (x1 + x2)))

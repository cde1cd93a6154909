"""
frame.py

Signed distance, nearest boundary point and normal data for model domains.

Responsibilities:
- Newton nearest-point projection on the Lagrange system
- `BoundaryFrame` (nearest point, signed distance, gbar = dbar of the signed distance)
- Real/complex normal decomposition of tangent vectors
- Levi form evaluation and the convexity audit
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from src.config import BOUNDARY_TOL, NEWTON_MAX_ITER, NEWTON_TOL, VALIDITY_RADIUS
from src.errors import (
    AmbiguityError,
    AuditFailure,
    DomainError,
    NumericalFailure,
    PreconditionError,
)
from src.geometry.domains import (
    ComplexPoint,
    ComplexVector,
    DomainSpec,
    as_point,
    boundary_point,
    hermitian,
    sample_boundary,
    to_complex,
    to_real,
)

logger = logging.getLogger(__name__)

# Second-order test on the tangential Lagrangian Hessian.
_TIE_TOL = 1e-8


@dataclass(frozen=True)
class BoundaryFrame:
    base: ComplexPoint
    nearest: ComplexPoint
    sdist: float
    gbar: ComplexVector
    nu: ComplexVector

    @property
    def delta(self) -> float:
        """Positive interior distance delta_D = -sdist."""
        return -self.sdist


@dataclass(frozen=True)
class ConvexityReport:
    min_real_hessian: float
    min_levi: float
    n_samples: int
    seed: int
    witness_real: List[float]
    witness_levi: List[float]

    def to_json(self) -> dict:
        return {
            "min_real_hessian": self.min_real_hessian,
            "min_levi": self.min_levi,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "witness_real": self.witness_real,
            "witness_levi": self.witness_levi,
        }


def _check_validity(z: ComplexPoint):
    if np.linalg.norm(z) > VALIDITY_RADIUS:
        raise DomainError(f"point outside the validity region |z| <= {VALIDITY_RADIUS}")


def _newton(domain: DomainSpec, u: np.ndarray, p: np.ndarray) -> Optional[Tuple[np.ndarray, float]]:
    """
    Solve p - u + mu * grad r(p) = 0, r(p) = 0 in real coordinates.

    Returns (p, mu) or None if the iteration does not converge.
    """
    n = u.size
    g = domain.real_gradient(to_complex(p))
    mu = -float((p - u) @ g) / float(g @ g)
    for _ in range(NEWTON_MAX_ITER):
        zc = to_complex(p)
        g = domain.real_gradient(zc)
        resid = np.concatenate([p - u + mu * g, [float(domain.defining(zc))]])
        if np.max(np.abs(resid)) < NEWTON_TOL:
            return p, mu
        jac = np.zeros((n + 1, n + 1))
        jac[:n, :n] = np.eye(n) + mu * domain.real_hessian(zc)
        jac[:n, n] = g
        jac[n, :n] = g
        try:
            step = np.linalg.solve(jac, -resid)
        except np.linalg.LinAlgError:
            return None
        p = p + step[:n]
        mu += step[n]
    zc = to_complex(p)
    g = domain.real_gradient(zc)
    resid = np.concatenate([p - u + mu * g, [float(domain.defining(zc))]])
    if np.max(np.abs(resid)) < 1e3 * NEWTON_TOL:
        return p, mu
    return None


def _tangent_curvature(domain: DomainSpec, p: np.ndarray, mu: float) -> float:
    """Smallest eigenvalue of I + mu * Hess r restricted to the tangent hyperplane at p."""
    zc = to_complex(p)
    g = domain.real_gradient(zc)
    n = g / np.linalg.norm(g)
    basis = np.linalg.svd(np.eye(p.size) - np.outer(n, n))[0][:, : p.size - 1]
    lag = np.eye(p.size) + mu * domain.real_hessian(zc)
    if basis.shape[1] == 0:
        return 1.0
    return float(np.min(np.linalg.eigvalsh(basis.T @ lag @ basis)))


def project_to_boundary(domain: DomainSpec, z) -> Tuple[ComplexPoint, float]:
    """
    Nearest boundary point by Newton iteration seeded by radial projection.

    Args:
        domain (DomainSpec): Model domain.
        z: Query point with |z| <= 2.

    Returns:
        Tuple[np.ndarray, float]:
            - Nearest boundary point p(z)
            - Tangential curvature of the distance problem at p(z) (<= 0 signals a tie)
    """
    z = as_point(z, domain.dim)
    _check_validity(z)
    u = to_real(z)

    if np.linalg.norm(z) > 1e-14:
        seeds = [z]
    else:
        # Symmetry center: tie broken along the first coordinate axis.
        seeds = [np.eye(domain.dim, dtype=complex)[0]]
    best = None
    tried_axes = False
    while True:
        for direction in seeds:
            solved = _newton(domain, u, to_real(boundary_point(domain, direction)))
            if solved is None:
                continue
            p, mu = solved
            curv = _tangent_curvature(domain, p, mu)
            dist = float(np.linalg.norm(p - u))
            if best is None or dist < best[1] - 1e-14:
                best = (p, dist, curv)
        if (best is not None and best[2] > -_TIE_TOL) or tried_axes:
            break
        # Radial seed converged to a non-minimal stationary point: retry along the axes.
        logger.debug("[FRAME] radial seed not minimal at %s, trying axis seeds", np.round(z, 6))
        eye = np.eye(domain.dim, dtype=complex)
        seeds = [s * e for e in np.concatenate([eye, 1j * eye]) for s in (1, -1)]
        tried_axes = True

    if best is None:
        raise NumericalFailure(f"nearest-point iteration did not converge for z={np.round(z, 6).tolist()}")
    p, _, curv = best
    return to_complex(p), curv


def signed_distance(domain: DomainSpec, z) -> float:
    """
    Signed distance to the boundary: negative inside, positive outside.

    Args:
        domain (DomainSpec): Model domain.
        z: Query point with |z| <= 2.

    Returns:
        float: delta-tilde_D(z).
    """
    z = as_point(z, domain.dim)
    r = float(domain.defining(z))
    if abs(r) < 1e-15:
        return 0.0
    p, _ = project_to_boundary(domain, z)
    dist = float(np.linalg.norm(z - p))
    return -dist if r < 0 else dist


def boundary_frame(domain: DomainSpec, z) -> BoundaryFrame:
    """
    Nearest boundary point and normal data at z.

    Args:
        domain (DomainSpec): Model domain.
        z: Query point near the boundary.

    Returns:
        BoundaryFrame: Frame with gbar = dbar(signed distance) at p(z), |gbar| = 1/2.
    """
    z = as_point(z, domain.dim)
    p, curv = project_to_boundary(domain, z)
    if curv < -_TIE_TOL:
        raise AmbiguityError(f"nearest boundary point of {np.round(z, 6).tolist()} is not unique")
    if abs(curv) <= _TIE_TOL:
        logger.debug("[FRAME] tie at symmetry center %s resolved radially", np.round(z, 6))

    grad = domain.dbar(p)
    nu = grad / np.linalg.norm(grad)
    r = float(domain.defining(z))
    dist = float(np.linalg.norm(z - p))
    sdist = 0.0 if abs(r) < 1e-15 else (-dist if r < 0 else dist)
    return BoundaryFrame(base=z, nearest=p, sdist=sdist, gbar=0.5 * nu, nu=nu)


def normal_split(frame: BoundaryFrame, X) -> Tuple[ComplexVector, ComplexVector, float]:
    """
    Split X into its complex normal and complex tangential parts.

    Args:
        frame (BoundaryFrame): Frame at the base point.
        X: Complex vector.

    Returns:
        Tuple[np.ndarray, np.ndarray, float]:
            - X_N, projection on the complex normal line
            - X_T = X - X_N
            - |X_n| = 2 |Re <X, gbar>|, length of the real normal projection
    """
    X = as_point(X, frame.base.size)
    coeff = 2.0 * hermitian(X, frame.gbar)
    x_big = coeff * (2.0 * frame.gbar)
    return x_big, X - x_big, abs(coeff.real)


def nontangentiality(frame: BoundaryFrame, z, w) -> float:
    """|(z - w)_N| / |z - w| in the given frame."""
    diff = as_point(z) - as_point(w)
    norm = np.linalg.norm(diff)
    if norm == 0:
        return 0.0
    return float(np.linalg.norm(normal_split(frame, diff)[0]) / norm)


def h_product(domain: DomainSpec, z, w) -> float:
    """h_D(z, w) = delta_D(z)^{1/2} delta_D(w)^{1/2} for z, w inside D."""
    dz = -signed_distance(domain, domain.require_inside(z, "z"))
    dw = -signed_distance(domain, domain.require_inside(w, "w"))
    return float(np.sqrt(dz * dw))


def tangent_basis(normal: ComplexVector) -> np.ndarray:
    """Orthonormal basis (columns) of the complex orthogonal complement of `normal`."""
    d = normal.size
    n = normal / np.linalg.norm(normal)
    full = np.linalg.qr(np.column_stack([n, np.eye(d, dtype=complex)]))[0]
    return full[:, 1:d]


def levi_audit(domain: DomainSpec, p, V) -> float:
    """
    Levi form sum_jk (d^2 r / dz_j dzbar_k) V_j conj(V_k) at a boundary point.

    Raises:
        PreconditionError: p is off the boundary or V is not complex tangent.
    """
    p = as_point(p, domain.dim)
    V = as_point(V, domain.dim)
    if abs(float(domain.defining(p))) > BOUNDARY_TOL:
        raise PreconditionError(f"levi_audit needs a boundary point, r(p)={float(domain.defining(p)):.3e}")
    grad = domain.dbar(p)
    # dr(V) = sum V_j dr/dz_j = <V, dbar r>
    if abs(hermitian(V, grad)) > BOUNDARY_TOL * max(np.linalg.norm(V), 1.0) * np.linalg.norm(grad):
        raise PreconditionError("V is not in the complex tangent space at p")
    herm = domain.complex_hessian(p)
    return float(np.real(V @ herm @ np.conj(V)))


def convexity_audit(domain: DomainSpec, n_samples: int, seed: int) -> ConvexityReport:
    """
    Sample boundary and near-boundary points and check convexity.

    The real Hessian of r is checked on boundary samples and on random points of
    the closed ball of radius 1.2; the Levi form on the complex tangent space of
    each boundary sample.

    Raises:
        AuditFailure: Some eigenvalue is <= 0; carries the witness point.
    """
    rng = np.random.default_rng(seed)
    pts = sample_boundary(domain, n_samples, rng)
    raw = rng.normal(size=(n_samples, domain.dim)) + 1j * rng.normal(size=(n_samples, domain.dim))
    radii = 1.2 * rng.uniform(size=(n_samples, 1)) ** (1.0 / (2 * domain.dim))
    interior = raw / np.linalg.norm(raw, axis=1, keepdims=True) * radii

    min_real, witness_real = np.inf, None
    for z in np.concatenate([pts, interior]):
        ev = float(np.min(np.linalg.eigvalsh(domain.real_hessian(z))))
        if ev < min_real:
            min_real, witness_real = ev, z

    min_levi, witness_levi = np.inf, None
    for p in pts:
        basis = tangent_basis(domain.dbar(p))
        if basis.shape[1] == 0:
            continue
        herm = domain.complex_hessian(p)
        # Levi matrix on the tangent basis: L_ab = sum H_jk B_ja conj(B_kb)
        levi = basis.T @ herm @ np.conj(basis)
        ev = float(np.min(np.linalg.eigvalsh(0.5 * (levi + levi.conj().T))))
        if ev < min_levi:
            min_levi, witness_levi = ev, p

    if min_levi == np.inf:
        min_levi, witness_levi = float("nan"), None

    logger.info("[AUDIT] %s d=%d: min real Hessian %.6g, min Levi %.6g over %d samples",
                domain.variant, domain.dim, min_real, min_levi, n_samples)
    if n_samples and min_real <= 0:
        raise AuditFailure(f"real Hessian not positive definite (min eigenvalue {min_real:.3e})",
                           witness=witness_real, value=min_real)
    if n_samples and min_levi <= 0:
        raise AuditFailure(f"Levi form not positive (min eigenvalue {min_levi:.3e})",
                           witness=witness_levi, value=min_levi)

    def _pair(z):
        return [] if z is None else [[float(c.real), float(c.imag)] for c in z]

    return ConvexityReport(
        min_real_hessian=float(min_real) if n_samples else float("nan"),
        min_levi=float(min_levi) if n_samples else float("nan"),
        n_samples=n_samples,
        seed=seed,
        witness_real=_pair(witness_real),
        witness_levi=_pair(witness_levi),
    )

"""
normalize.py

Boundary normalization near a point close to the boundary.

The map sends the nearest boundary point p(z) to 0, rotates the complex normal
onto the z_1 axis, diagonalizes and rescales the Levi form to the identity,
removes the quadratic harmonic terms with the shear z_1 -> z_1 + P(z), and
finally shifts 0 to e_1. In the final coordinates the defining function reads

    r(w) = |w|^2 - 1 + O(|w - e_1|^3)

after multiplying r by a positive factor kappa (1 + 2 Re <l, z>).
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from src.config import NORMALIZE_MAX_DELTA, POSTCONDITION_TOL
from src.errors import AuditFailure, DomainError, NumericalFailure, PreconditionError
from src.geometry.domains import DomainSpec, as_point
from src.geometry.frame import boundary_frame, tangent_basis
from src.scaling.automorphisms import ScalingParams

logger = logging.getLogger(__name__)

_INVERSE_MAX_ITER = 200
_INVERSE_TOL = 1e-15
_SPHERE_DIRECTIONS = 64


def _pair(c) -> list:
    return [float(np.real(c)), float(np.imag(c))]


@dataclass(frozen=True)
class NormalizationMap:
    """
    Affine normalization followed by a quadratic shear and the shift to e_1.

    Attributes:
        base (np.ndarray): The query point z.
        translation (np.ndarray): Nearest boundary point p(z), sent to 0.
        unitary (np.ndarray): Rows [n^H; B'^H], normal first, Levi eigenvectors after.
        dilation (np.ndarray): lambda_j, with lambda_1 = 1.
        shear (np.ndarray): Symmetric Q with P(z) = 1/2 z^T Q z.
        multiplier (np.ndarray): l in the defining-function factor 1 + 2 Re sum l_k z_k.
        kappa (float): 1 / |dr/dzbar(p)|.
        delta (float): Boundary distance of the query point.
        order (tuple): Composition order, first to last.
    """

    base: np.ndarray
    translation: np.ndarray
    unitary: np.ndarray
    dilation: np.ndarray
    shear: np.ndarray
    multiplier: np.ndarray
    kappa: float
    delta: float
    order: Tuple[str, ...] = ("translate", "unitary", "dilate", "shear", "shift_e1")

    @property
    def dim(self) -> int:
        return self.translation.size

    @property
    def gamma(self) -> complex:
        return complex(0.5 * self.shear[0, 0])

    def shear_polynomial(self, zhat) -> np.ndarray:
        zhat = np.asarray(zhat, dtype=complex)
        return 0.5 * np.einsum("...j,jk,...k->...", zhat, self.shear, zhat)

    def _affine(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return self.dilation * ((z - self.translation) @ self.unitary.T)

    def _affine_inverse(self, zhat) -> np.ndarray:
        zhat = np.asarray(zhat, dtype=complex)
        return self.translation + (zhat / self.dilation) @ np.conj(self.unitary)

    def apply(self, z) -> np.ndarray:
        """Original coordinates -> final coordinates; vectorized over leading axes."""
        w = self._affine(z)
        w[..., 0] = w[..., 0] + self.shear_polynomial(w) + 1.0
        return w

    def _unshear(self, w) -> np.ndarray:
        what = np.array(w, dtype=complex)
        what[..., 0] -= 1.0
        target = what[..., 0].copy()
        for _ in range(_INVERSE_MAX_ITER):
            previous = what[..., 0].copy()
            what[..., 0] = target - self.shear_polynomial(what)
            if np.all(np.abs(what[..., 0] - previous) <= _INVERSE_TOL * (1.0 + np.abs(previous))):
                return what
        raise NumericalFailure("shear inverse did not converge; point too far from e_1")

    def inverse(self, w) -> np.ndarray:
        """Final coordinates -> original coordinates (fixed-point inversion of the shear)."""
        return self._affine_inverse(self._unshear(w))

    def pull_defining(self, domain: DomainSpec, w) -> np.ndarray:
        """Transformed defining function kappa (1 + 2 Re <l, zhat>) r(z) at final coordinates w."""
        zhat = self._unshear(w)
        factor = self.kappa * (1.0 + 2.0 * np.real(zhat @ self.multiplier))
        return factor * domain.defining(self._affine_inverse(zhat))

    def to_json(self) -> dict:
        return {
            "base": [_pair(c) for c in self.base],
            "translation": [_pair(c) for c in self.translation],
            "unitary": [[_pair(c) for c in row] for row in self.unitary],
            "dilation": [float(x) for x in self.dilation],
            "shear": [[_pair(c) for c in row] for row in self.shear],
            "multiplier": [_pair(c) for c in self.multiplier],
            "kappa": float(self.kappa),
            "delta": float(self.delta),
            "gamma": _pair(self.gamma),
            "order": list(self.order),
        }


def _levi_frame(hess: np.ndarray, normal: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Tangent basis diagonalizing the Levi form, eigenvalues in descending order."""
    basis = tangent_basis(normal)
    if basis.shape[1] == 0:
        return basis, np.zeros(0)
    levi = basis.conj().T @ hess.T @ basis
    levi = 0.5 * (levi + levi.conj().T)
    vals, vecs = np.linalg.eigh(levi)
    order = np.argsort(-vals, kind="stable")
    return basis @ vecs[:, order], vals[order]


def normalize_boundary(domain: DomainSpec, z) -> Tuple[NormalizationMap, ScalingParams]:
    """
    Build the normalization map at a point z close to the boundary.

    Args:
        domain (DomainSpec): Strongly pseudoconvex model domain.
        z: Interior point with delta_D(z) < 0.2.

    Returns:
        Tuple[NormalizationMap, ScalingParams]: The map, and scaling params carrying
        only gamma, where z maps to (1 - delta + gamma delta^2, 0').

    Raises:
        PreconditionError: z is too far from the boundary.
        AuditFailure: The Levi form is not positive at p(z).
        NumericalFailure: The analytic postcondition fails.
    """
    z = domain.require_inside(z, "z")
    frame = boundary_frame(domain, z)
    delta = -frame.sdist
    if delta >= NORMALIZE_MAX_DELTA:
        raise PreconditionError(f"normalize_boundary needs delta < {NORMALIZE_MAX_DELTA}, got {delta:.4g}")

    p = frame.nearest
    d = domain.dim
    grad = domain.dbar(p)
    kappa = 1.0 / float(np.linalg.norm(grad))
    hess = domain.complex_hessian(p)
    harm = domain.harmonic_hessian(p)

    basis, levi = _levi_frame(hess, frame.nu)
    if levi.size and levi[-1] <= 0:
        raise AuditFailure("Levi form is not positive at the nearest boundary point", witness=p, value=float(levi[-1]))

    unitary = np.vstack([frame.nu.conj()[None, :], basis.conj().T])
    if not np.allclose(unitary @ unitary.conj().T, np.eye(d), atol=1e-12):
        raise NumericalFailure("normalization frame is not unitary")
    dilation = np.concatenate([[1.0], np.sqrt(kappa * levi)])

    jac = unitary.conj().T / dilation
    herm_new = kappa * jac.T @ hess @ jac.conj()
    harm_new = kappa * jac.T @ harm @ jac
    grad_new = kappa * jac.conj().T @ grad

    ell = np.zeros(d, dtype=complex)
    ell[0] = 0.5 * (1.0 - herm_new[0, 0].real)
    ell[1:] = -np.conj(herm_new[0, 1:])
    e1 = np.zeros(d)
    e1[0] = 1.0
    shear = harm_new + np.outer(e1, ell) + np.outer(ell, e1)

    levi_final = herm_new + np.outer(e1, np.conj(ell)) + np.outer(ell, e1)
    grad_err = float(np.max(np.abs(grad_new - e1)))
    levi_err = float(np.max(np.abs(levi_final - np.eye(d))))
    if grad_err > POSTCONDITION_TOL or levi_err > POSTCONDITION_TOL:
        raise NumericalFailure(f"normal form postcondition failed (gradient {grad_err:.2e}, Levi {levi_err:.2e})")

    nmap = NormalizationMap(
        base=z,
        translation=p,
        unitary=unitary,
        dilation=dilation,
        shear=shear,
        multiplier=ell,
        kappa=kappa,
        delta=delta,
    )
    logger.info(
        "[SCALE] normalized at delta=%.3e: dilation=%s gamma=%s",
        delta, np.round(dilation, 6).tolist(), np.round(nmap.gamma, 6),
    )
    return nmap, ScalingParams(gamma=nmap.gamma)


def normal_form_residual(nmap: NormalizationMap, domain: DomainSpec,
                         radii: Sequence[float], seed: int = 0) -> Tuple[np.ndarray, float]:
    """
    Sup of |r_normalized(w) - (|w|^2 - 1)| on spheres |w - e_1| = rho.

    Returns:
        Tuple[np.ndarray, float]: Residual per radius and the log-log slope
        (about 3 for smooth domains, nan for an exact normal form).
    """
    radii = np.asarray(radii, dtype=float)
    if radii.size == 0 or np.any(radii <= 0):
        raise DomainError("normal_form_residual needs positive radii")
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(_SPHERE_DIRECTIONS, nmap.dim)) + 1j * rng.normal(size=(_SPHERE_DIRECTIONS, nmap.dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    e1 = np.zeros(nmap.dim, dtype=complex)
    e1[0] = 1.0

    residuals = []
    for rho in radii:
        w = e1 + rho * dirs
        model = np.sum(np.abs(w) ** 2, axis=-1) - 1.0
        residuals.append(float(np.max(np.abs(nmap.pull_defining(domain, w) - model))))
    residuals = np.asarray(residuals)

    slope = float("nan")
    if radii.size >= 2 and np.all(residuals > 1e-14):
        slope = float(np.polyfit(np.log10(radii), np.log10(residuals), 1)[0])
    logger.debug("[SCALE] normal form residuals %s slope %.3f", residuals, slope)
    return residuals, slope


def normalized_point(nmap: NormalizationMap, z=None) -> np.ndarray:
    """Image of z (default: the base point) in final coordinates."""
    return nmap.apply(as_point(nmap.base if z is None else z, nmap.dim))

"""
domains.py

Model domains of C^d given by a defining function r (r < 0 inside).

Responsibilities:
- `DomainSpec` for the unit ball, ellipsoids and perturbed balls
- JSON ingestion of domain files (perturbation polynomial included)
- Defining function, complex/real gradients and Hessians (vectorized)
- Radial boundary points and random boundary sampling

Points and tangent vectors are plain complex numpy arrays of shape (d,)
(or (..., d) for batches). Real coordinates interleave real and imaginary
parts: u[2j] = Re z_j, u[2j + 1] = Im z_j.
"""

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from src.config import VALIDITY_RADIUS
from src.errors import DomainError, NumericalFailure

logger = logging.getLogger(__name__)

ComplexPoint = np.ndarray
ComplexVector = np.ndarray

VARIANTS = ("ball", "ellipsoid", "perturbed_ball")
MAX_PERTURBATION_DEGREE = 4

_FACTOR = re.compile(r"^([xy])(\d+)(?:\^(\d+))?$")


def as_point(z, dim: int = None) -> ComplexPoint:
    """
    Coerce a sequence of complex numbers into a finite 1-D complex array.

    Args:
        z: Sequence of complex coordinates.
        dim (int, optional): Expected ambient dimension.

    Returns:
        np.ndarray: complex128 array of shape (d,).
    """
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    if arr.ndim != 1 or arr.size < 1:
        raise DomainError(f"expected a 1-D point, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("point has non-finite coordinates")
    if dim is not None and arr.size != dim:
        raise DomainError(f"point has dimension {arr.size}, domain has {dim}")
    return arr


def to_real(z: np.ndarray) -> np.ndarray:
    """(..., d) complex -> (..., 2d) real, interleaved."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def to_complex(u: np.ndarray) -> np.ndarray:
    """(..., 2d) real -> (..., d) complex, inverse of `to_real`."""
    u = np.asarray(u, dtype=float)
    return u[..., 0::2] + 1j * u[..., 1::2]


def hermitian(x: np.ndarray, y: np.ndarray) -> complex:
    """Standard Hermitian product <x, y> = sum x_j conj(y_j)."""
    return complex(np.sum(np.asarray(x) * np.conj(np.asarray(y))))


def complex_from_real_hessian(hess: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Split a real (2d x 2d) Hessian into its complex parts.

    Returns:
        Tuple[np.ndarray, np.ndarray]:
            - Hermitian part H[j, k] = d^2 r / dz_j dzbar_k
            - harmonic part A[j, k] = d^2 r / dz_j dz_k
    """
    xx = hess[0::2, 0::2]
    yy = hess[1::2, 1::2]
    xy = hess[0::2, 1::2]
    yx = hess[1::2, 0::2]
    herm = 0.25 * (xx + yy + 1j * (xy - yx))
    harm = 0.25 * (xx - yy - 1j * (xy + yx))
    return herm, harm


def parse_monomial(key: str, dim: int) -> Tuple[int, ...]:
    """
    Parse a monomial such as "x1^2*y2" into real-coordinate exponents.

    "1" denotes the constant monomial. Indices are 1-based.
    """
    exps = [0] * (2 * dim)
    key = key.replace(" ", "")
    if key in ("", "1"):
        return tuple(exps)
    for factor in key.split("*"):
        m = _FACTOR.match(factor)
        if not m:
            raise DomainError(f"malformed monomial factor '{factor}' in '{key}'")
        var, idx, power = m.group(1), int(m.group(2)), int(m.group(3) or 1)
        if not 1 <= idx <= dim:
            raise DomainError(f"monomial '{key}' uses coordinate {idx} outside dimension {dim}")
        exps[2 * (idx - 1) + (0 if var == "x" else 1)] += power
    if sum(exps) > MAX_PERTURBATION_DEGREE:
        raise DomainError(f"monomial '{key}' exceeds total degree {MAX_PERTURBATION_DEGREE}")
    return tuple(exps)


def format_monomial(exps: Tuple[int, ...]) -> str:
    parts = []
    for i, e in enumerate(exps):
        if e:
            name = f"{'xy'[i % 2]}{i // 2 + 1}"
            parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts) or "1"


@dataclass(frozen=True)
class DomainSpec:
    """
    A bounded convex model domain {r < 0} in C^d.

    Variants:
    - ball:            r = |z|^2 - 1
    - ellipsoid:       r = sum a_j |z_j|^2 - 1
    - perturbed_ball:  r = |z|^2 - 1 + eta * q(Re z, Im z), deg q <= 4
    """

    variant: str
    dim: int
    a: Tuple[float, ...] = ()
    eta: float = 0.0
    q: Tuple[Tuple[Tuple[int, ...], float], ...] = ()
    _exps: np.ndarray = field(init=False, repr=False, compare=False)
    _coefs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise DomainError(f"unknown domain variant '{self.variant}'")
        if self.dim < 1:
            raise DomainError("dimension must be at least 1")
        if self.variant == "ellipsoid":
            if len(self.a) != self.dim or any(not np.isfinite(x) or x <= 0 for x in self.a):
                raise DomainError("ellipsoid needs one positive weight per coordinate")
        exps = np.array([e for e, _ in self.q], dtype=int).reshape(-1, 2 * self.dim)
        coefs = np.array([c for _, c in self.q], dtype=float)
        object.__setattr__(self, "_exps", exps)
        object.__setattr__(self, "_coefs", coefs)

    # --- Constructors ---
    @classmethod
    def ball(cls, dim: int) -> "DomainSpec":
        return cls("ball", dim)

    @classmethod
    def ellipsoid(cls, a) -> "DomainSpec":
        a = tuple(float(x) for x in a)
        return cls("ellipsoid", len(a), a=a)

    @classmethod
    def perturbed_ball(cls, dim: int, eta: float, q: Dict[str, float]) -> "DomainSpec":
        terms = tuple((parse_monomial(k, dim), float(v)) for k, v in q.items())
        return cls("perturbed_ball", dim, eta=float(eta), q=terms)

    @classmethod
    def from_json(cls, data: dict) -> "DomainSpec":
        """
        Build a domain from its JSON form.

        Args:
            data (dict): {"variant": ..., "dim": d, "a": [...], "eta": x, "q": {monomial: coef}}

        Returns:
            DomainSpec: The validated domain.
        """
        try:
            variant = data["variant"]
            dim = int(data.get("dim", len(data.get("a", ())) or 0))
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"invalid domain spec: {exc}") from exc
        if variant == "ball":
            return cls.ball(dim)
        if variant == "ellipsoid":
            spec = cls.ellipsoid(data.get("a", ()))
            if spec.dim != dim:
                raise DomainError("ellipsoid 'dim' does not match the number of weights")
            return spec
        if variant == "perturbed_ball":
            return cls.perturbed_ball(dim, data.get("eta", 0.0), data.get("q", {}))
        raise DomainError(f"unknown domain variant '{variant}'")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "DomainSpec":
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot read domain file {path}: {exc}") from exc
        return cls.from_json(data)

    def to_json(self) -> dict:
        data = {"variant": self.variant, "dim": self.dim}
        if self.variant == "ellipsoid":
            data["a"] = list(self.a)
        if self.variant == "perturbed_ball":
            data["eta"] = self.eta
            data["q"] = {format_monomial(e): c for e, c in self.q}
        return data

    # --- Perturbation polynomial ---
    def _q_value(self, u: np.ndarray) -> np.ndarray:
        if not len(self._coefs):
            return np.zeros(u.shape[:-1])
        mono = np.prod(u[..., None, :] ** self._exps, axis=-1)
        return mono @ self._coefs

    def _q_gradient(self, u: np.ndarray) -> np.ndarray:
        grad = np.zeros(u.shape)
        for i in range(2 * self.dim):
            e = self._exps[:, i]
            lowered = self._exps.copy()
            lowered[:, i] = np.maximum(e - 1, 0)
            mono = np.prod(u[..., None, :] ** lowered, axis=-1)
            grad[..., i] = mono @ (self._coefs * e)
        return grad

    def _q_hessian(self, u: np.ndarray) -> np.ndarray:
        n = 2 * self.dim
        hess = np.zeros((n, n))
        for i in range(n):
            for j in range(i, n):
                lowered = self._exps.copy()
                factor = lowered[:, i].astype(float)
                lowered[:, i] = np.maximum(lowered[:, i] - 1, 0)
                factor = factor * lowered[:, j]
                lowered[:, j] = np.maximum(lowered[:, j] - 1, 0)
                mono = np.prod(u ** lowered, axis=-1)
                hess[i, j] = hess[j, i] = float(mono @ (self._coefs * factor))
        return hess

    # --- Defining function and derivatives ---
    def defining(self, z) -> np.ndarray:
        """r(z), vectorized over leading axes."""
        z = np.asarray(z, dtype=complex)
        sq = np.abs(z) ** 2
        if self.variant == "ellipsoid":
            return sq @ np.asarray(self.a) - 1.0
        value = np.sum(sq, axis=-1) - 1.0
        if self.variant == "perturbed_ball" and self.eta:
            value = value + self.eta * self._q_value(to_real(z))
        return value

    def dbar(self, z) -> np.ndarray:
        """dr/dzbar_j as a complex (..., d) array; the real gradient is 2 * dbar."""
        z = np.asarray(z, dtype=complex)
        if self.variant == "ellipsoid":
            return z * np.asarray(self.a)
        grad = z.copy()
        if self.variant == "perturbed_ball" and self.eta:
            gq = self._q_gradient(to_real(z))
            grad = grad + 0.5 * self.eta * to_complex(gq)
        return grad

    def real_gradient(self, z) -> np.ndarray:
        return 2.0 * to_real(self.dbar(z))

    def real_hessian(self, z) -> np.ndarray:
        """Real (2d x 2d) Hessian of r at a single point."""
        z = as_point(z, self.dim)
        if self.variant == "ellipsoid":
            return np.diag(np.repeat(2.0 * np.asarray(self.a), 2))
        hess = 2.0 * np.eye(2 * self.dim)
        if self.variant == "perturbed_ball" and self.eta:
            hess = hess + self.eta * self._q_hessian(to_real(z))
        return hess

    def complex_hessian(self, z) -> np.ndarray:
        """Hermitian matrix d^2 r / dz_j dzbar_k at a single point."""
        return complex_from_real_hessian(self.real_hessian(z))[0]

    def harmonic_hessian(self, z) -> np.ndarray:
        """Symmetric matrix d^2 r / dz_j dz_k at a single point."""
        return complex_from_real_hessian(self.real_hessian(z))[1]

    def contains(self, z) -> bool:
        return bool(self.defining(as_point(z, self.dim)) < 0)

    def require_inside(self, z, name: str = "point") -> ComplexPoint:
        z = as_point(z, self.dim)
        if not self.defining(z) < 0:
            raise DomainError(f"{name} {np.round(z, 6).tolist()} lies outside the {self.variant} domain")
        return z


def boundary_point(domain: DomainSpec, direction) -> ComplexPoint:
    """
    Boundary point on the ray from the origin in the given direction.

    Args:
        domain (DomainSpec): Domain containing the origin.
        direction: Nonzero complex vector.

    Returns:
        np.ndarray: The point s * direction / |direction| with r = 0.
    """
    v = as_point(direction, domain.dim)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise DomainError("boundary direction must be nonzero")
    v = v / norm
    if domain.variant == "ball":
        return v
    if domain.variant == "ellipsoid":
        return v / np.sqrt(np.abs(v) ** 2 @ np.asarray(domain.a))
    hi = VALIDITY_RADIUS
    if domain.defining(hi * v) <= 0:
        raise DomainError("domain is not bounded inside the validity region along this ray")
    try:
        s = brentq(lambda s: float(domain.defining(s * v)), 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    except (ValueError, RuntimeError) as exc:
        raise NumericalFailure(f"boundary root along the ray failed: {exc}") from exc
    return s * v


def sample_boundary(domain: DomainSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Push n uniformly random sphere directions to the boundary, shape (n, d)."""
    raw = rng.normal(size=(n, domain.dim)) + 1j * rng.normal(size=(n, domain.dim))
    return np.array([boundary_point(domain, v) for v in raw]).reshape(n, domain.dim)

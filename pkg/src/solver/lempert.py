"""
lempert.py

Extremal disc solver for the Kobayashi distance and metric of convex domains.

Defines `SolverConfig`, `GeodesicResult` and the solver entry points.

Responsibilities:
- Round-disc seeds in the complex line through the data, and the Lempert-function
  upper bound they give
- Pair problem: minimize tanh^-1(alpha) over discs with phi(0) = z, phi(alpha) = w,
  penalizing r > 0 on M boundary samples
- Direction problem: minimize alpha over discs with phi(0) = z, alpha phi'(0) = X
- Geodesic certification by re-solving along the disc, and the pulled-back metric ratio
- Half-plane / affine sandwich of the distance

Discs are polynomials in T(zeta) - p, T the disc automorphism of the seed, so the
seed itself is a degree-1 disc and the solver refines it.
"""

import logging
from dataclasses import dataclass, replace
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize

from src.config import (
    ALPHA_MAX,
    BOUNDARY_GRID,
    DEGENERATE_PAIR,
    DISC_DEGREE,
    FD_STEP,
    INTERIOR_POINTS,
    INTERIOR_RADIUS,
    PENALTY_SCHEDULE,
    RESIDUAL_TOL,
    SOLVER_GTOL,
    SOLVER_MAX_ITER,
    STAGE_RTOL,
    VALIDITY_RADIUS,
)
from src.errors import DegenerateInputError, NumericalFailure, PreconditionError, SeedFailure
from src.geometry.disc import atanh_clamped, disc_distance, halfplane_distance
from src.geometry.domains import DomainSpec, as_point, hermitian
from src.geometry.frame import boundary_frame
from src.solver.discs import AnalyticDisc, boundary_grid, disc_diameter, interior_grid

logger = logging.getLogger(__name__)

_ALPHA_MIN = 1e-12
_ROOT_RTOL = 4 * np.finfo(float).eps
_FEASIBILITY_TOL = 1e-13
_UNTILTED = (0j, 1 + 0j)


@dataclass(frozen=True)
class SolverConfig:
    """
    Solver settings.

    Attributes:
        degree (int): Taylor degree K of the discs.
        grid (int): Boundary grid size M, at least 4K.
        penalty_schedule (tuple): Boundary penalty weight per stage.
        gtol (float): Projected gradient tolerance per stage.
        max_iter (int): L-BFGS-B iterations per stage.
        fd_step (float): Step used by finite-difference gradient checks.
        residual_tol (float): Endpoint mismatch allowed for a converged result.
        seed (int): Seed for restart perturbations.
    """

    degree: int = DISC_DEGREE
    grid: int = BOUNDARY_GRID
    penalty_schedule: Tuple[float, ...] = PENALTY_SCHEDULE
    gtol: float = SOLVER_GTOL
    max_iter: int = SOLVER_MAX_ITER
    fd_step: float = FD_STEP
    residual_tol: float = RESIDUAL_TOL
    seed: int = 0

    def __post_init__(self):
        if self.degree < 1:
            raise PreconditionError("disc degree must be at least 1")
        if self.grid < 4 * self.degree:
            raise PreconditionError(f"boundary grid M={self.grid} must be at least 4K={4 * self.degree}")

    def reduced(self) -> "SolverConfig":
        """Cheaper settings for inner solves."""
        degree = max(1, min(self.degree, 8))
        return replace(self, degree=degree, grid=max(64, 4 * degree), max_iter=min(self.max_iter, 200))

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "grid": self.grid,
            "penalty_schedule": list(self.penalty_schedule),
            "gtol": self.gtol,
            "max_iter": self.max_iter,
            "fd_step": self.fd_step,
            "residual_tol": self.residual_tol,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class GeodesicResult:
    """
    Outcome of an extremal problem.

    `alpha` is set for the pair problem (value = tanh^-1 alpha), `lam` for the
    direction problem (value = lam = kappa_D(z; X)).
    """

    kind: str
    disc: AnalyticDisc
    value: float
    residual: float
    diam: float
    converged: bool
    alpha: Optional[float] = None
    lam: Optional[float] = None
    degenerate_pair: bool = False
    trace: Tuple[float, ...] = ()
    restart_spread: float = 0.0
    shrink: float = 1.0

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "disc": self.disc.to_json(),
            "value": float(self.value),
            "alpha": None if self.alpha is None else float(self.alpha),
            "lambda": None if self.lam is None else float(self.lam),
            "residual": float(self.residual),
            "diam": float(self.diam),
            "converged": bool(self.converged),
            "degenerate_pair": bool(self.degenerate_pair),
            "trace": [float(t) for t in self.trace],
            "restart_spread": float(self.restart_spread),
            "shrink": float(self.shrink),
        }


# --- Round-disc seeds ---
def _bracketed_root(fn: Callable[[float], float], lo: float, hi: float, what: str) -> float:
    try:
        return brentq(fn, lo, hi, xtol=1e-15, rtol=_ROOT_RTOL)
    except (ValueError, RuntimeError) as exc:
        raise NumericalFailure(f"{what}: {exc}") from exc


def _inscribed_radius(domain: DomainSpec, center: np.ndarray, v: np.ndarray, M: int) -> float:
    """Largest R with r(center + R zeta_j v) <= 0 on the boundary grid, v a unit vector; 0 outside D."""
    if domain.defining(center) >= 0:
        return 0.0
    zeta = boundary_grid(M)

    def worst(R: float) -> float:
        return float(np.max(domain.defining(center + R * np.outer(zeta, v))))

    hi = 2.0 * VALIDITY_RADIUS
    if worst(hi) <= 0:
        raise SeedFailure("seed disc leaves the validity region before reaching the boundary")
    return _bracketed_root(worst, 0.0, hi, "inscribed radius")


def _radial_fit(domain: DomainSpec, disc: AnalyticDisc, M: int) -> Tuple[AnalyticDisc, float]:
    """
    phi_s(zeta) = phi(s zeta) with the largest s <= 1 keeping r <= 0 on the grid.

    The target parameter of phi_s is alpha / s.
    """
    p, scale = disc.tilt

    def shrunk(s: float) -> AnalyticDisc:
        return AnalyticDisc(disc.coeffs, tilt=(p, scale * s))

    def worst(s: float) -> float:
        return float(np.max(domain.defining(shrunk(s).boundary_values(M))))

    if worst(1.0) <= _FEASIBILITY_TOL:
        return disc, 1.0
    s = _bracketed_root(worst, 0.0, 1.0, "radial reparametrization") * (1.0 - 1e-9)
    return shrunk(s), s


@dataclass(frozen=True)
class SeedDisc:
    """
    Seed of an extremal problem: a round disc of the complex line through the data,
    parametrized so that phi(0) = z.

    Attributes:
        disc (AnalyticDisc): Degree-1 tilted disc, feasible on the boundary grid.
        alpha (float): Target parameter in `disc` (phi(alpha) = w, or alpha phi'(0) = X).
        tilt (tuple): Automorphism (p, e) before the grid fit, |e| = 1.
        alpha_start (float): Target parameter before the grid fit.
        radius (float): Radius of the round disc.
        center (complex): Center of the round disc in the line coordinate lambda, z + lambda v.
    """

    disc: AnalyticDisc
    alpha: float
    tilt: Tuple[complex, complex]
    alpha_start: float
    radius: float
    center: complex


def _pseudo_distance(a: complex, b: complex) -> complex:
    """(b - a) / (1 - conj(a) b); its modulus is the pseudo-hyperbolic distance."""
    return (b - a) / (1.0 - np.conj(a) * b)


def round_disc_seed(domain: DomainSpec, z, target, kind: str = "pair", M: int = BOUNDARY_GRID) -> SeedDisc:
    """
    Best round disc of the complex line L = {z + lambda v} through the data.

    For the pair problem (target w, v = (w - z) / |w - z|) the disc center c minimizes the
    pseudo-hyperbolic distance of the preimages of z and w; for the direction problem
    (target X, v = X / |X|) it minimizes |X| / (rho (1 - |z-preimage|^2)). The disc is
    then phi(zeta) = z + rho v (T(zeta) - p), T(zeta) = (e zeta + p) / (1 + conj(p) e zeta),
    with p = -c / rho the preimage of z.

    Exact on every complex line of the unit ball, whose slices are round.

    Raises:
        DegenerateInputError: w = z or X = 0.
        SeedFailure: No round disc of L contains both z and w.
    """
    z = domain.require_inside(z, "z")
    if kind == "pair":
        target = domain.require_inside(target, "w")
        lin = target - z
    else:
        lin = as_point(target, domain.dim)
    size = float(np.linalg.norm(lin))
    if size == 0:
        raise DegenerateInputError("round-disc seed needs w != z and X != 0")
    v = lin / size

    def radius(c: complex) -> float:
        return _inscribed_radius(domain, z + c * v, v, M)

    def objective(x: np.ndarray) -> float:
        c = complex(x[0], x[1])
        rho = radius(c)
        if kind == "pair":
            violation = max(abs(c), abs(size - c)) - rho
            if violation >= 0:
                return 1.0 + violation
            return float(abs(_pseudo_distance(-c / rho, (size - c) / rho)))
        if abs(c) >= rho:
            return np.inf
        return float(rho / (rho * rho - abs(c) ** 2))

    starts = [np.zeros(2), np.array([0.5 * size, 0.0])] if kind == "pair" else [np.zeros(2)]
    x0 = min(starts, key=objective)
    step = 0.25 * (size if kind == "pair" else radius(0j))
    simplex = np.array([x0, x0 + [step, 0.0], x0 + [0.0, step]])
    res = minimize(objective, x0, method="Nelder-Mead",
                   options={"initial_simplex": simplex, "xatol": 1e-12, "fatol": 1e-15, "maxiter": 400, "maxfev": 800})
    x = res.x if res.fun <= objective(x0) else x0
    c = complex(x[0], x[1])
    rho = radius(c)
    if kind == "pair" and not max(abs(c), abs(size - c)) < rho:
        raise SeedFailure("no round disc of the complex line through z and w contains both points")

    p = -c / rho
    if kind == "pair":
        q = _pseudo_distance(p, (size - c) / rho)
        alpha = float(abs(q))
        e = complex(q / alpha)
    else:
        alpha = size / (rho * (1.0 - abs(p) ** 2))
        e = 1 + 0j
    coeffs = np.zeros((2, domain.dim), dtype=complex)
    coeffs[0] = z
    coeffs[1] = rho * v
    disc, s = _radial_fit(domain, AnalyticDisc(coeffs, tilt=(p, e)), M)
    if kind == "pair" and alpha / s >= 1.0:
        raise SeedFailure("round-disc seed does not fit the boundary grid")
    logger.debug("[SOLVER] %s seed: center %s, radius %.6g, alpha %.12g (grid shrink %.2e)",
                 kind, np.round(c, 8), rho, alpha / s, 1.0 - s)
    return SeedDisc(disc=disc, alpha=float(alpha / s), tilt=(complex(p), e),
                    alpha_start=alpha, radius=float(rho), center=c)


def affine_seed_disc(domain: DomainSpec, z, w, M: int = BOUNDARY_GRID) -> AnalyticDisc:
    """
    Degree-1 seed disc through z and w: an affine disc of the complex line through
    them, precomposed with a disc automorphism so that phi(0) = z.

    phi(alpha) = w for the seed's alpha, so tanh^-1(alpha) bounds the Lempert function from above.
    """
    return round_disc_seed(domain, z, w, "pair", M).disc


def affine_upper_bound(domain: DomainSpec, z, w, M: int = BOUNDARY_GRID) -> float:
    """tanh^-1(alpha) for the seed disc through z and w."""
    return atanh_clamped(round_disc_seed(domain, z, w, "pair", M).alpha)


# --- Penalty problem ---
class _PenaltyProblem:
    """
    Objective, gradient and feasibility projection for one extremal problem.

    Discs are phi = z + sum_k c_k (T^k - p^k) for the fixed automorphism T of the
    seed. Variables x = [alpha, Re c_2..c_K, Im c_2..c_K]; c_1 is eliminated so
    that phi(alpha) = w (pair) or alpha phi'(0) = X (direction).
    """

    def __init__(self, domain: DomainSpec, z: np.ndarray, target: np.ndarray, kind: str,
                 cfg: SolverConfig, tilt: Tuple[complex, complex] = _UNTILTED):
        self.domain = domain
        self.z = z
        self.target = target
        self.kind = kind
        self.cfg = cfg
        self.K = cfg.degree
        self.d = domain.dim
        self.kk = np.arange(2, self.K + 1)
        self.template = AnalyticDisc(np.zeros((self.K + 1, self.d)), tilt=tilt)
        self.tilt = self.template.tilt
        self.p, self.scale = self.tilt
        grid_basis = self.template.boundary_basis(cfg.grid)
        self.b1 = grid_basis[:, 1]
        self.bk = grid_basis[:, 2:]
        self.lin = (target - z) if kind == "pair" else target
        # phi'(0) = T'(0) sum_k k p^{k-1} c_k
        self.slope0 = self.scale * (1.0 - abs(self.p) ** 2)
        self.dir_weights = self.kk * self.p ** (self.kk - 1)

    def unpack(self, x: np.ndarray) -> Tuple[float, np.ndarray]:
        n = (self.K - 1) * self.d
        c = (x[1:1 + n] + 1j * x[1 + n:]).reshape(self.K - 1, self.d)
        return float(x[0]), c

    def pack(self, alpha: float, c: np.ndarray) -> np.ndarray:
        return np.concatenate([[alpha], c.real.ravel(), c.imag.ravel()])

    def _endpoint(self, alpha: float):
        """T(alpha) - p, d/dalpha T(alpha), and q_k = (T^k - p^k) / (T - p) with its alpha-derivative."""
        tau = complex(self.template.inner(alpha))
        dtau = self.slope0 / (1.0 + np.conj(self.p) * self.scale * alpha) ** 2
        gap = tau - self.p
        top = tau ** self.kk - self.p ** self.kk
        q = top / gap
        dq = dtau * (self.kk * tau ** (self.kk - 1) * gap - top) / gap ** 2
        return gap, dtau, q, dq

    def _basis(self, alpha: float):
        """Grid basis of c_2..c_K, its alpha-derivative, and the coefficient of lin with its derivative."""
        if self.kind == "pair":
            gap, dtau, q, dq = self._endpoint(alpha)
            basis = self.bk - self.b1[:, None] * q
            dbasis = -self.b1[:, None] * dq
            lead = self.b1 / gap
            dlead = -self.b1 * dtau / gap ** 2
        else:
            basis = self.bk - self.b1[:, None] * self.dir_weights
            dbasis = np.zeros_like(self.bk)
            lead = self.b1 / (alpha * self.slope0)
            dlead = -self.b1 / (alpha ** 2 * self.slope0)
        return basis, dbasis, lead, dlead

    def objective(self, alpha: float) -> Tuple[float, float]:
        if self.kind == "pair":
            return float(np.arctanh(alpha)), 1.0 / (1.0 - alpha ** 2)
        return alpha, 1.0

    def value_and_grad(self, x: np.ndarray, weight: float) -> Tuple[float, np.ndarray]:
        alpha, c = self.unpack(x)
        basis, dbasis, lead, dlead = self._basis(alpha)
        phi = self.z + np.outer(lead, self.lin) + basis @ c
        dphi = np.outer(dlead, self.lin) + dbasis @ c

        r = self.domain.defining(phi)
        rp = np.maximum(r, 0.0)
        amp = 2.0 * weight * rp
        gbar = np.conj(self.domain.dbar(phi))

        obj, dobj = self.objective(alpha)
        value = obj + weight * float(rp @ rp)
        s = basis.T @ (amp[:, None] * gbar)
        grad_alpha = dobj + float(amp @ (2.0 * np.real(np.sum(dphi * gbar, axis=1))))
        grad = np.concatenate([[grad_alpha], 2.0 * s.real.ravel(), -2.0 * s.imag.ravel()])
        return value, grad

    def disc(self, x: np.ndarray) -> Tuple[float, AnalyticDisc]:
        """alpha and the full disc encoded by x."""
        alpha, c = self.unpack(x)
        coeffs = np.zeros((self.K + 1, self.d), dtype=complex)
        coeffs[0] = self.z
        coeffs[2:] = c
        if self.kind == "pair":
            gap, _, q, _ = self._endpoint(alpha)
            coeffs[1] = (self.lin - q @ c) / gap
        else:
            coeffs[1] = self.lin / (alpha * self.slope0) - self.dir_weights @ c
        return alpha, AnalyticDisc(coeffs, tilt=self.tilt)

    def project(self, x: np.ndarray) -> Tuple[float, float, AnalyticDisc, float]:
        """
        Make the disc feasible on the grid by radial reparametrization.

        Returns:
            (value, alpha', disc', s); value is inf when alpha' leaves (0, 1).
        """
        alpha, disc = self.disc(x)
        disc, s = _radial_fit(self.domain, disc, self.cfg.grid)
        alpha = alpha / s
        if self.kind == "pair":
            value = atanh_clamped(alpha) if alpha < 1.0 else np.inf
        else:
            value = alpha
        return value, alpha, disc, s

    def residual(self, alpha: float, disc: AnalyticDisc) -> float:
        if self.kind == "pair":
            return float(max(np.linalg.norm(disc.evaluate(0) - self.z),
                             np.linalg.norm(disc.evaluate(alpha) - self.target)))
        return float(max(np.linalg.norm(disc.evaluate(0) - self.z),
                         np.linalg.norm(alpha * disc.derivative(0) - self.target)))

    def bounds(self):
        hi = ALPHA_MAX if self.kind == "pair" else None
        return [(_ALPHA_MIN, hi)] + [(None, None)] * (2 * (self.K - 1) * self.d)


def _run_stages(problem: _PenaltyProblem, x0: np.ndarray, seed: Tuple[float, tuple]):
    """Penalty continuation from x0; keeps the best feasible candidate, starting from the seed."""
    cfg = problem.cfg
    best = seed
    trace = []
    x = x0
    last_shrink = 1.0
    for weight in cfg.penalty_schedule:
        res = minimize(
            problem.value_and_grad,
            x,
            args=(weight,),
            jac=True,
            method="L-BFGS-B",
            bounds=problem.bounds(),
            options={"maxiter": cfg.max_iter, "gtol": cfg.gtol, "ftol": 1e-15},
        )
        x = res.x
        value, alpha, disc, s = problem.project(x)
        logger.debug("[SOLVER] stage W=%.0e: %s, projected value %.12g (shrink %.3e)",
                     weight, res.message, value, 1.0 - s)
        trace.append(value)
        last_shrink = s
        if value < best[0]:
            best = (value, (alpha, disc, s))
    return best, tuple(trace), last_shrink


def _solve(domain: DomainSpec, z: np.ndarray, target: np.ndarray, kind: str,
           cfg: SolverConfig, restarts: int) -> GeodesicResult:
    seed = round_disc_seed(domain, z, target, kind, cfg.grid)
    problem = _PenaltyProblem(domain, z, target, kind, cfg, seed.tilt)
    seed_value = atanh_clamped(seed.alpha) if kind == "pair" else seed.alpha
    start = (seed_value, (seed.alpha, seed.disc.with_degree(cfg.degree), 1.0))
    x0 = problem.pack(seed.alpha_start, np.zeros((cfg.degree - 1, domain.dim), dtype=complex))

    (value, found), trace, shrink = _run_stages(problem, x0, start)
    values = [value]
    rng = np.random.default_rng(cfg.seed)
    for _ in range(restarts):
        noisy = x0.copy()
        noisy[1:] += 1e-2 * seed.radius * rng.normal(size=noisy.size - 1)
        (v, f), _, _ = _run_stages(problem, noisy, start)
        values.append(v)
        if v < value:
            value, found = v, f
    if found is start[1]:
        logger.debug("[SOLVER] no stage improved on the seed")
    alpha, disc, s = found

    residual = problem.residual(alpha, disc)
    agree = (len(trace) < 2
             or abs(trace[-1] - trace[-2]) <= STAGE_RTOL * max(1.0, abs(trace[-1])))
    converged = bool(np.isfinite(value) and agree and residual <= cfg.residual_tol and 1.0 - shrink < 1e-4)
    if not converged:
        logger.warning("[SOLVER] %s problem at z=%s not converged (residual %.3e, last stages %s)",
                       kind, np.round(z, 6).tolist(), residual, [round(v, 10) for v in trace[-2:]])
    result = GeodesicResult(
        kind=kind,
        disc=disc,
        value=float(value),
        residual=residual,
        diam=disc_diameter(disc, cfg.grid),
        converged=converged,
        alpha=float(alpha) if kind == "pair" else None,
        lam=float(alpha) if kind == "dir" else None,
        trace=trace,
        restart_spread=float(np.ptp(values)) if restarts else 0.0,
        shrink=float(s),
    )
    logger.info("[SOLVER] %s value %.10g (converged=%s, diam %.4g)", kind, result.value, converged, result.diam)
    return result


def solve_extremal_dir(domain: DomainSpec, z, X, cfg: SolverConfig = None, restarts: int = 0) -> GeodesicResult:
    """
    Kobayashi metric kappa_D(z; X) and its extremal disc.

    Args:
        domain (DomainSpec): Convex model domain.
        z: Base point inside D.
        X: Nonzero tangent vector.
        cfg (SolverConfig, optional): Solver settings.
        restarts (int): Extra solves from perturbed seeds (uniqueness check).

    Returns:
        GeodesicResult: kind "dir", value = lam.
    """
    cfg = cfg or SolverConfig()
    z = domain.require_inside(z, "z")
    X = as_point(X, domain.dim)
    if np.linalg.norm(X) == 0:
        raise DegenerateInputError("solve_extremal_dir needs X != 0")
    return _solve(domain, z, X, "dir", cfg, restarts)


def solve_extremal_pair(domain: DomainSpec, z, w, cfg: SolverConfig = None, restarts: int = 0) -> GeodesicResult:
    """
    Kobayashi distance k_D(z, w) and an approximate complex geodesic through z, w.

    Args:
        domain (DomainSpec): Convex model domain.
        z, w: Distinct points inside D.
        cfg (SolverConfig, optional): Solver settings.
        restarts (int): Extra solves from perturbed seeds (uniqueness check).

    Returns:
        GeodesicResult: kind "pair", value = tanh^-1(alpha). Non-convergence is flagged, never raised.

    Raises:
        DegenerateInputError: z == w.
    """
    cfg = cfg or SolverConfig()
    z = domain.require_inside(z, "z")
    w = domain.require_inside(w, "w")
    chord = float(np.linalg.norm(w - z))
    if chord == 0:
        raise DegenerateInputError("solve_extremal_pair needs z != w")
    if chord < DEGENERATE_PAIR:
        metric = solve_extremal_dir(domain, z, w - z, cfg)
        logger.info("[SOLVER] degenerate pair |z-w|=%.3e, using the metric", chord)
        return replace(metric, kind="pair", alpha=float(np.tanh(metric.value)), lam=None, degenerate_pair=True)
    return _solve(domain, z, w, "pair", cfg, restarts)


def geodesic_residual(domain: DomainSpec, disc, cfg: SolverConfig = None,
                      n_points: int = INTERIOR_POINTS,
                      distance: Callable[[np.ndarray, np.ndarray], float] = None) -> float:
    """
    Max relative mismatch |k_D(phi(0), phi(zeta)) - k_Delta(0, zeta)| / k_Delta(0, zeta).

    k_D is re-solved at reduced settings unless an oracle `distance` is supplied.
    Returns nan when an inner solve does not converge.

    Raises:
        DegenerateInputError: The disc is constant.
    """
    cfg = cfg or SolverConfig()
    base = np.asarray(disc.evaluate(0))
    grid = interior_grid(n_points)
    images = np.asarray(disc.evaluate(grid))
    if np.max(np.linalg.norm(images - base, axis=1)) == 0:
        raise DegenerateInputError("geodesic residual is undefined for a constant disc")
    inner_cfg = cfg.reduced()
    worst = 0.0
    for zeta, image in zip(grid, images):
        k_disc = disc_distance(0.0, zeta)
        if distance is not None:
            k_dom = distance(base, image)
        else:
            inner = solve_extremal_pair(domain, base, image, inner_cfg)
            if not inner.converged:
                logger.warning("[SOLVER] inner solve failed at zeta=%s; residual flagged", np.round(zeta, 4))
                return float("nan")
            k_dom = inner.value
        worst = max(worst, abs(k_dom - k_disc) / k_disc)
    return float(worst)


def pullback_metric_ratio(domain: DomainSpec, disc, cfg: SolverConfig = None,
                          n_points: int = INTERIOR_POINTS, radius: float = INTERIOR_RADIUS,
                          metric: Callable[[np.ndarray, np.ndarray], float] = None) -> Tuple[float, float]:
    """
    Range of kappa_D(phi(zeta); phi'(zeta)) (1 - |zeta|^2) over the interior grid.

    Equal to 1 everywhere exactly when phi is a complex geodesic. kappa_D is re-solved
    at reduced settings unless an oracle `metric` is supplied.

    Returns:
        Tuple[float, float]: (min ratio, max ratio); (nan, nan) when an inner solve does not converge.

    Raises:
        DegenerateInputError: phi' vanishes at a grid point.
    """
    cfg = cfg or SolverConfig()
    grid = interior_grid(n_points, radius)
    points = np.asarray(disc.evaluate(grid))
    derivs = np.asarray(disc.derivative(grid))
    if np.any(np.linalg.norm(derivs, axis=1) == 0):
        raise DegenerateInputError("pullback metric is undefined where phi' vanishes")
    inner_cfg = cfg.reduced()
    ratios = []
    for zeta, point, deriv in zip(grid, points, derivs):
        if metric is not None:
            kappa = metric(point, deriv)
        else:
            inner = solve_extremal_dir(domain, point, deriv, inner_cfg)
            if not inner.converged:
                logger.warning("[SOLVER] metric solve failed at zeta=%s; ratio flagged", np.round(zeta, 4))
                return float("nan"), float("nan")
            kappa = inner.value
        ratios.append(kappa * (1.0 - abs(zeta) ** 2))
    return float(min(ratios)), float(max(ratios))


def distance_sandwich(domain: DomainSpec, z, w, M: int = BOUNDARY_GRID) -> Tuple[float, float]:
    """
    Lower and upper bounds of k_D(z, w).

    Lower: distance in the half-space bounded by the supporting hyperplane at the
    nearest boundary point of z, reduced to the half-plane {Re < 0}.
    Upper: the seed bound, which the solver never exceeds on the same grid.
    """
    z = domain.require_inside(z, "z")
    w = domain.require_inside(w, "w")
    if np.array_equal(z, w):
        return 0.0, 0.0
    frame = boundary_frame(domain, z)
    lower = halfplane_distance(hermitian(z - frame.nearest, frame.nu),
                               hermitian(w - frame.nearest, frame.nu))
    upper = affine_upper_bound(domain, z, w, M)
    return lower, upper


def finite_difference_gradient(domain: DomainSpec, z, w, cfg: SolverConfig, x: np.ndarray,
                               weight: float, kind: str = "pair",
                               tilt: Tuple[complex, complex] = _UNTILTED) -> Tuple[np.ndarray, np.ndarray]:
    """Analytic and central-difference gradients of the penalty objective at x."""
    problem = _PenaltyProblem(domain, as_point(z), as_point(w), kind, cfg, tilt)
    _, grad = problem.value_and_grad(x, weight)
    fd = np.zeros_like(x)
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = cfg.fd_step
        fd[i] = (problem.value_and_grad(x + step, weight)[0] - problem.value_and_grad(x - step, weight)[0]) / (2 * cfg.fd_step)
    return grad, fd

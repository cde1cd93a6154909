"""
bounds.py

Both sides of the boundary estimates for the Kobayashi distance, evaluated on
point pairs and solved geodesics.

Every estimate becomes a `BoundReport`. Besides lhs/rhs/margin each report
carries its critical constant: the extreme value of the bound's constant for
which this sample still satisfies it. Lower bounds with a constant c hold iff
c <= critical ("inf" fits); upper bounds and band widths hold iff C >= critical
("sup" fits). Constant fitting and fresh-seed checks only compare constants
with criticals.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import AmbiguityError, DegenerateInputError, DomainError, PreconditionError
from src.geometry.disc import disc_distance, disc_lower_bound, mean_log_inequality
from src.geometry.domains import DomainSpec, as_point
from src.geometry.frame import boundary_frame, nontangentiality, normal_split, signed_distance
from src.solver.discs import boundary_grid, interior_grid
from src.solver.lempert import GeodesicResult, solve_extremal_pair

logger = logging.getLogger(__name__)

ENDPOINT_TOL = 1e-6
MARGIN_TOL = 1e-9
EPS_RTOL = 1e-9  # rounding slack on |(z - w)_N| >= eps |z - w|


class BoundId(str, Enum):
    NA = "NA"
    NT = "NT"
    BB_LOWER = "BB_LOWER"
    BB_UPPER = "BB_UPPER"
    C2 = "C2"
    C3 = "C3"
    COMBINED = "COMBINED"
    THGEN = "THGEN"
    D1 = "D1"
    D2 = "D2"
    CRU = "CRU"
    IMD = "IMD"
    CHORD = "CHORD"


# How the constant of each bound is fitted; None means a fixed constant.
FIT_KIND: Dict[BoundId, Optional[str]] = {
    BoundId.NA: None,
    BoundId.NT: "inf",
    BoundId.BB_LOWER: "sup",
    BoundId.BB_UPPER: "sup",
    BoundId.C2: "inf",
    BoundId.C3: "inf",
    BoundId.COMBINED: "inf",
    BoundId.THGEN: "sup",
    BoundId.D1: "inf",
    BoundId.D2: "sup",
    BoundId.CRU: None,
    BoundId.IMD: None,
    BoundId.CHORD: None,
}


@dataclass(frozen=True)
class PairMetrics:
    """
    Boundary data of a pair (z, w).

    Attributes:
        delta_z, delta_w (float): Boundary distances.
        dist_zw (float): |z - w|.
        xn (float): |(z - w)_n|, real normal length in z's frame.
        xN (float): |(z - w)_N|, complex normal length in z's frame.
        eps (float): xN / |z - w| (0 for z = w).
        eps_w (float): The same ratio in w's frame.
        diam (float): Diameter of the geodesic, nan when none was solved.
        residual (float): Solver endpoint residual, nan when none was solved.
    """

    delta_z: float
    delta_w: float
    dist_zw: float
    xn: float
    xN: float
    eps: float
    eps_w: float
    diam: float = float("nan")
    residual: float = float("nan")

    @property
    def h(self) -> float:
        return float(np.sqrt(self.delta_z * self.delta_w))


@dataclass(frozen=True)
class BoundReport:
    """
    One instance of an estimate.

    `direction` is "lower" when rhs bounds lhs from below (margin = lhs - rhs)
    and "upper" when rhs bounds lhs from above (margin = rhs - lhs), so a
    nonnegative margin always means the bound holds.
    """

    bound_id: BoundId
    z: np.ndarray
    w: np.ndarray
    lhs: float
    rhs: float
    direction: str
    constant_used: float
    critical: float
    metrics: PairMetrics
    applicable: bool = True
    parameter: float = float("nan")
    converged: bool = True
    provenance: str = "solver"

    @property
    def margin(self) -> float:
        if self.direction == "lower":
            return float(self.lhs - self.rhs)
        return float(self.rhs - self.lhs)

    @property
    def holds(self) -> bool:
        return self.margin >= -MARGIN_TOL * (1.0 + abs(self.lhs))

    def holds_with(self, constant: float) -> bool:
        """Whether the bound holds for this sample with another constant."""
        kind = FIT_KIND[self.bound_id]
        if kind is None:
            return self.holds
        slack = MARGIN_TOL * (1.0 + abs(constant))
        if kind == "inf":
            return constant <= self.critical + slack
        return constant >= self.critical - slack

    def to_row(self) -> dict:
        row = {"bound_id": self.bound_id.value}
        for name, point in (("z", self.z), ("w", self.w)):
            for j, c in enumerate(point, start=1):
                row[f"{name}{j}_re"] = float(c.real)
                row[f"{name}{j}_im"] = float(c.imag)
        m = self.metrics
        row.update({
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "constant_used": self.constant_used,
            "critical": self.critical,
            "delta_z": m.delta_z,
            "delta_w": m.delta_w,
            "dist_zw": m.dist_zw,
            "xn": m.xn,
            "xN": m.xN,
            "eps": m.eps,
            "eps_w": m.eps_w,
            "diam": m.diam,
            "residual": m.residual,
            "converged": self.converged,
            "applicable": self.applicable,
            "provenance": self.provenance,
        })
        return row


@dataclass(frozen=True)
class ConstantFit:
    bound_id: BoundId
    kind: str
    value: float
    n_samples: int
    witness: Optional[BoundReport] = None

    def to_json(self) -> dict:
        out = {"bound_id": self.bound_id.value, "kind": self.kind, "value": self.value, "n_samples": self.n_samples}
        if self.witness is not None:
            out["witness"] = {
                "z": [[float(c.real), float(c.imag)] for c in self.witness.z],
                "w": [[float(c.real), float(c.imag)] for c in self.witness.w],
                "delta_z": self.witness.metrics.delta_z,
            }
        return out


# --- Scalar helpers ---

def s_function(x: float) -> float:
    """s(x) = -x^{1/2} log x, with s(0) = 0."""
    if x < 0:
        raise DomainError("s(x) needs x >= 0")
    if x == 0:
        return 0.0
    return float(-np.sqrt(x) * np.log(x))


def eps_shape(eps: float) -> float:
    """Expected shape -eps / log^2 eps of the nontangential constant, eps in (0, 1/2)."""
    if not 0.0 < eps < 0.5:
        raise DomainError("eps_shape needs eps in (0, 1/2)")
    return float(-eps / np.log(eps) ** 2)


def gd_max_form(c1: float, xn: float, dist: float) -> float:
    """max{c1 xn - dist^2 / c1, c1 dist^2}; dominates c1^3 / (c1^2 + 1) xn."""
    if c1 <= 0:
        raise DomainError("gd_max_form needs c1 > 0")
    return float(max(c1 * xn - dist * dist / c1, c1 * dist * dist))


def _ratio(num: float, den: float) -> float:
    if den == 0:
        return float("inf") if num > 0 else float("nan")
    return float(num / den)


# --- Pair data ---

def pair_metrics(domain: DomainSpec, z, w, diam: float = float("nan"),
                 residual: float = float("nan")) -> PairMetrics:
    z = domain.require_inside(z, "z")
    w = domain.require_inside(w, "w")
    dist = float(np.linalg.norm(z - w))
    frame_z = boundary_frame(domain, z)
    delta_w = -signed_distance(domain, w)
    if dist == 0:
        return PairMetrics(frame_z.delta, delta_w, 0.0, 0.0, 0.0, 0.0, 0.0, diam, residual)
    x_big, _, xn = normal_split(frame_z, z - w)
    xN = float(np.linalg.norm(x_big))
    try:
        eps_w = nontangentiality(boundary_frame(domain, w), z, w)
    except AmbiguityError:
        eps_w = float("nan")
    return PairMetrics(frame_z.delta, delta_w, dist, float(xn), xN, xN / dist, eps_w, diam, residual)


def _resolve(domain, z, w, distance, metrics):
    """Distance and metrics for a pair, solving when no distance is supplied."""
    z, w = as_point(z, domain.dim), as_point(w, domain.dim)
    provenance = "given"
    converged = True
    if distance is None:
        if np.array_equal(z, w):
            distance = 0.0
        else:
            result = solve_extremal_pair(domain, z, w)
            distance, converged, provenance = result.value, result.converged, "solver"
            if metrics is None:
                metrics = pair_metrics(domain, z, w, result.diam, result.residual)
    if metrics is None:
        metrics = pair_metrics(domain, z, w)
    return z, w, float(distance), metrics, provenance, converged


def _report(bound_id, z, w, lhs, rhs, direction, constant, critical, metrics, **extra) -> BoundReport:
    return BoundReport(
        bound_id=bound_id, z=z, w=w, lhs=float(lhs), rhs=float(rhs), direction=direction,
        constant_used=float(constant), critical=float(critical), metrics=metrics, **extra,
    )


# --- Pair estimates ---

def bound_upper_na(domain: DomainSpec, z, w, distance: float = None,
                   metrics: PairMetrics = None) -> BoundReport:
    """k_D(z, w) <= log(1 + 2|z - w| / h_D(z, w)) near a boundary point."""
    z, w, k, m, prov, conv = _resolve(domain, z, w, distance, metrics)
    rhs = float(np.log1p(2.0 * m.dist_zw / m.h)) if m.dist_zw else 0.0
    return _report(BoundId.NA, z, w, k, rhs, "upper", 2.0, float("nan"), m,
                   provenance=prov, converged=conv)


def bound_lower_nt(domain: DomainSpec, z, w, c: float, distance: float = None,
                   metrics: PairMetrics = None) -> BoundReport:
    """log((1 + c|z - w| / delta(z)^{1/2}) (1 + c|z - w| / delta(w)^{1/2})) <= k_D(z, w)."""
    z, w, k, m, prov, conv = _resolve(domain, z, w, distance, metrics)
    a = m.dist_zw / np.sqrt(m.delta_z)
    b = m.dist_zw / np.sqrt(m.delta_w)
    rhs = float(np.log1p(c * a) + np.log1p(c * b))
    # Positive root of ab c^2 + (a + b) c + 1 - e^k = 0.
    gap = np.expm1(k)
    critical = _ratio(2.0 * gap, (a + b) + np.sqrt((a + b) ** 2 + 4.0 * a * b * gap))
    return _report(BoundId.NT, z, w, k, rhs, "lower", c, critical, m, provenance=prov, converged=conv)


def bound_band_bb(domain: DomainSpec, z, w, C: float, distance: float = None,
                  metrics: PairMetrics = None) -> Tuple[BoundReport, BoundReport]:
    """log(1 + |z-w|^2 / h) - C <= k_D(z, w) <= log(1 + |z-w| / h) + C."""
    z, w, k, m, prov, conv = _resolve(domain, z, w, distance, metrics)
    if m.dist_zw == 0:
        low = high = 0.0
    else:
        low = float(np.log1p(m.dist_zw ** 2 / m.h))
        high = float(np.log1p(m.dist_zw / m.h))
    lower = _report(BoundId.BB_LOWER, z, w, k, low - C, "lower", C, low - k, m, provenance=prov, converged=conv)
    upper = _report(BoundId.BB_UPPER, z, w, k, high + C, "upper", C, k - high, m, provenance=prov, converged=conv)
    return lower, upper


def bound_lower_c2(domain: DomainSpec, z, w, c: float, distance: float = None,
                   metrics: PairMetrics = None) -> BoundReport:
    """log(1 + c|(z - w)_n| / h_D(z, w)) <= k_D(z, w)."""
    z, w, k, m, prov, conv = _resolve(domain, z, w, distance, metrics)
    rhs = float(np.log1p(c * m.xn / m.h)) if m.xn else 0.0
    critical = _ratio(np.expm1(k) * m.h, m.xn)
    return _report(BoundId.C2, z, w, k, rhs, "lower", c, critical, m, provenance=prov, converged=conv)


def bound_lower_c3(domain: DomainSpec, z, w, c: float, eps: float, distance: float = None,
                   metrics: PairMetrics = None) -> BoundReport:
    """
    log(1 + c|(z - w)_N| / h_D(z, w)) <= k_D(z, w) for eps-nontangential pairs.

    Pairs with |(z - w)_N| < eps |z - w| are reported as not applicable.
    """
    if not 0.0 <= eps <= 1.0:
        raise DomainError("eps must lie in [0, 1]")
    z, w, k, m, prov, conv = _resolve(domain, z, w, distance, metrics)
    applicable = m.xN >= eps * m.dist_zw * (1.0 - EPS_RTOL)
    rhs = float(np.log1p(c * m.xN / m.h)) if m.xN else 0.0
    critical = _ratio(np.expm1(k) * m.h, m.xN)
    return _report(BoundId.C3, z, w, k, rhs, "lower", c, critical, m, applicable=applicable,
                   parameter=eps, provenance=prov, converged=conv)


def combined_lower(domain: DomainSpec, z, w, c: float, distance: float = None,
                   metrics: PairMetrics = None) -> BoundReport:
    """log(1 + c((|(z-w)_n| + |z-w|^2) / h + |z-w| / delta(z)^{1/2} + |z-w| / delta(w)^{1/2})) <= k_D."""
    z, w, k, m, prov, conv = _resolve(domain, z, w, distance, metrics)
    x = ((m.xn + m.dist_zw ** 2) / m.h + m.dist_zw / np.sqrt(m.delta_z)
         + m.dist_zw / np.sqrt(m.delta_w)) if m.dist_zw else 0.0
    rhs = float(np.log1p(c * x))
    return _report(BoundId.COMBINED, z, w, k, rhs, "lower", c, _ratio(np.expm1(k), x), m,
                   provenance=prov, converged=conv)


def bound_lower_imd(domain: DomainSpec, z, w, distance: float = None,
                    metrics: PairMetrics = None) -> BoundReport:
    """log(1 + |delta(w) - delta(z)| / (2 h)) <= 1/2 |log(delta(w) / delta(z))| <= k_D(z, w)."""
    z, w, k, m, prov, conv = _resolve(domain, z, w, distance, metrics)
    rhs = float(np.log1p(abs(m.delta_w - m.delta_z) / (2.0 * m.h)))
    return _report(BoundId.IMD, z, w, k, rhs, "lower", 1.0, float("nan"), m, provenance=prov, converged=conv)


def combined_max_average(x1: float, x2: float) -> float:
    """max(log(1 + x1), log(1 + x2)) - log(1 + (x1 + x2) / 2), never negative."""
    big, avg = mean_log_inequality(x1, x2)
    return float(big - avg)


# --- Geodesic estimates ---

def _endpoints(result: GeodesicResult) -> Tuple[np.ndarray, np.ndarray]:
    z = np.asarray(result.disc.evaluate(0.0))
    w = np.asarray(result.disc.evaluate(result.alpha if result.alpha is not None else 0.0))
    return z, w


def thmgen_ratio(domain: DomainSpec, result: GeodesicResult, z, w, C: float = 1.0,
                 metrics: PairMetrics = None) -> BoundReport:
    """
    |(z - w)_N| <= C |z - w| diam(phi) on a solved geodesic through z and w.

    Raises:
        PreconditionError: The result did not converge or does not pass through z and w.
    """
    if not result.converged:
        raise PreconditionError("thmgen_ratio needs a converged geodesic")
    z, w = as_point(z, domain.dim), as_point(w, domain.dim)
    phi0, phia = _endpoints(result)
    if np.linalg.norm(phi0 - z) > ENDPOINT_TOL or np.linalg.norm(phia - w) > ENDPOINT_TOL:
        raise PreconditionError("z and w are not phi(0) and phi(alpha)")
    m = metrics or pair_metrics(domain, z, w, result.diam, result.residual)
    factor = m.dist_zw * result.diam
    critical = 0.0 if m.xN == 0 else _ratio(m.xN, factor)
    return _report(BoundId.THGEN, z, w, m.xN, C * factor, "upper", C, critical, m,
                   converged=result.converged)


def _sample_points() -> np.ndarray:
    return np.concatenate([[0.0 + 0j], interior_grid()])


def _depths(domain: DomainSpec, disc, zeta: np.ndarray) -> np.ndarray:
    return np.array([-signed_distance(domain, p) for p in np.asarray(disc.evaluate(zeta))])


def geodesic_depth(domain: DomainSpec, disc) -> float:
    """max over the interior grid (and 0) of delta_D(phi(zeta))."""
    return float(np.max(_depths(domain, disc, _sample_points())))


def max_derivative(disc, M: int = 256) -> float:
    """max |phi'| over the closed disc, attained on the boundary."""
    return float(np.max(np.linalg.norm(np.asarray(disc.derivative(boundary_grid(M))), axis=1)))


def diam_bounds(domain: DomainSpec, result: GeodesicResult, c: float = 1.0,
                C: float = 1.0) -> Tuple[BoundReport, BoundReport]:
    """
    Diameter bounds of a solved geodesic.

    D1: c (delta(phi(zeta))^{1/2} + |phi'(zeta)|_N / |phi'(zeta)|) <= diam on the grid,
        which also covers c max(delta o phi)^{1/2} <= diam.
    D2: diam <= C max(s o delta o phi), s(x) = -x^{1/2} log x.
    """
    disc = result.disc
    if disc.is_constant():
        raise DegenerateInputError("diameter bounds need a nonconstant disc")
    zeta = _sample_points()
    points = np.asarray(disc.evaluate(zeta))
    derivs = np.asarray(disc.derivative(zeta))
    lower_terms, s_terms = [], []
    for point, deriv in zip(points, derivs):
        speed = np.linalg.norm(deriv)
        try:
            frame = boundary_frame(domain, point)
        except AmbiguityError:
            logger.debug("[HARNESS] skipping ambiguous frame at %s", np.round(point, 4))
            continue
        normal = np.linalg.norm(normal_split(frame, deriv)[0]) / speed if speed else 0.0
        lower_terms.append(np.sqrt(frame.delta) + normal)
        s_terms.append(s_function(min(frame.delta, 1.0)))

    z, w = _endpoints(result)
    m = pair_metrics(domain, z, w, result.diam, result.residual) if result.kind == "pair" \
        else PairMetrics(-signed_distance(domain, z), -signed_distance(domain, z), 0.0, 0.0, 0.0, 0.0, 0.0,
                         result.diam, result.residual)
    if not lower_terms:
        logger.warning("[HARNESS] no usable boundary frame on the disc; diameter bounds undefined")
    lower_max = float(max(lower_terms)) if lower_terms else float("nan")
    s_max = float(max(s_terms)) if s_terms else float("nan")
    d1 = _report(BoundId.D1, z, w, result.diam, c * lower_max, "lower", c, _ratio(result.diam, lower_max), m,
                 converged=result.converged, applicable=bool(lower_terms))
    d2 = _report(BoundId.D2, z, w, result.diam, C * s_max, "upper", C, _ratio(result.diam, s_max), m,
                 converged=result.converged, applicable=bool(s_terms))
    return d1, d2


def equiv_form_ratio(domain: DomainSpec, result: GeodesicResult) -> float:
    """max over the interior grid of delta(phi(zeta)) / (diam |phi'(zeta)| delta_Delta(zeta))."""
    zeta = _sample_points()
    depths = _depths(domain, result.disc, zeta)
    speeds = np.linalg.norm(np.asarray(result.disc.derivative(zeta)), axis=1)
    den = result.diam * speeds * (1.0 - np.abs(zeta))
    if np.any(den == 0):
        raise DegenerateInputError("equivalent form is undefined for a constant disc")
    return float(np.max(depths / den))


def ball_diam_prediction(z, X) -> float:
    """delta^{1/2} + |X_N| / |X| for the unit ball's extremal disc at (z, X)."""
    z = as_point(z)
    X = as_point(X, z.size)
    norm = np.linalg.norm(X)
    if norm == 0:
        raise DegenerateInputError("ball_diam_prediction needs X != 0")
    frame = boundary_frame(DomainSpec.ball(z.size), z)
    return float(np.sqrt(frame.delta) + np.linalg.norm(normal_split(frame, X)[0]) / norm)


def cru_report(domain: DomainSpec, result: GeodesicResult, n_points: int = 32) -> BoundReport:
    """Worst pair of interior grid points for k_Delta(zeta, eta) >= disc_lower_bound(zeta, eta)."""
    grid = interior_grid(n_points)
    worst = None
    for a, b in combinations(grid, 2):
        lhs = disc_distance(a, b)
        rhs = disc_lower_bound(a, b)
        if worst is None or lhs - rhs < worst[0]:
            worst = (lhs - rhs, a, b, lhs, rhs)
    _, a, b, lhs, rhs = worst
    z, w = np.asarray(result.disc.evaluate(a)), np.asarray(result.disc.evaluate(b))
    m = pair_metrics(domain, z, w, result.diam, result.residual)
    return _report(BoundId.CRU, z, w, lhs, rhs, "lower", 1.0, float("nan"), m, converged=result.converged)


def chord_lower(domain: DomainSpec, result: GeodesicResult, zeta: complex, eta: complex) -> BoundReport:
    """
    Chord bound on a solved geodesic, reported only:

        k_Delta(zeta, eta) >= log(1 + delta(phi(0)) / (4 max|phi'|) |phi(zeta) - phi(eta)| / (h of the images)).
    """
    disc = result.disc
    z, w = np.asarray(disc.evaluate(zeta)), np.asarray(disc.evaluate(eta))
    m = pair_metrics(domain, z, w, result.diam, result.residual)
    center_depth = -signed_distance(domain, np.asarray(disc.evaluate(0.0)))
    scale = center_depth / (4.0 * max_derivative(disc))
    rhs = float(np.log1p(scale * m.dist_zw / m.h)) if m.dist_zw else 0.0
    lhs = disc_distance(zeta, eta)
    return _report(BoundId.CHORD, z, w, lhs, rhs, "lower", 0.25, float("nan"), m, converged=result.converged)


@dataclass(frozen=True)
class CompactReport:
    """Minimum geodesic depth per delta decade for eps-nontangential pairs."""

    eps: float
    depth_by_decade: Dict[float, float]
    n_pairs: int

    @property
    def depth(self) -> float:
        return min(self.depth_by_decade.values()) if self.depth_by_decade else float("nan")

    @property
    def stable(self) -> bool:
        depths = [d for d in self.depth_by_decade.values() if d > 0]
        return len(depths) < 2 or max(depths) / min(depths) <= 2.0

    def to_json(self) -> dict:
        return {
            "eps": self.eps,
            "depth": self.depth,
            "depth_by_decade": {str(k): v for k, v in self.depth_by_decade.items()},
            "n_pairs": self.n_pairs,
            "stable": self.stable,
        }


def geod_compact_check(domain: DomainSpec, eps: float,
                       samples: Iterable[Tuple[float, PairMetrics, GeodesicResult]]) -> CompactReport:
    """
    Depth max(delta o phi) of the geodesics of eps-nontangential pairs.

    Args:
        domain (DomainSpec): Model domain.
        eps (float): Nontangentiality threshold; eps = 0 pairs are not checked.
        samples: (delta decade, pair metrics, solved geodesic) triples.
    """
    depth_by_decade: Dict[float, float] = {}
    count = 0
    for decade, metrics, result in samples:
        if eps <= 0 or metrics.eps < eps * (1.0 - EPS_RTOL) or not result.converged:
            continue
        depth = geodesic_depth(domain, result.disc)
        depth_by_decade[decade] = min(depth, depth_by_decade.get(decade, np.inf))
        count += 1
    report = CompactReport(eps=eps, depth_by_decade=depth_by_decade, n_pairs=count)
    logger.info("[HARNESS] compact check eps=%.2f: depth %.4g over %d pairs (stable=%s)",
                eps, report.depth, count, report.stable)
    return report


def conjecture_probe(domain: DomainSpec, result: GeodesicResult) -> Dict[str, float]:
    """
    (diam, max(delta o phi)^{1/2}, max|phi'|) and their pairwise ratios.

    Logged as evidence only; nothing is asserted.
    """
    if result.disc.is_constant():
        raise DegenerateInputError("conjecture probe needs a nonconstant disc")
    root_depth = float(np.sqrt(geodesic_depth(domain, result.disc)))
    speed = max_derivative(result.disc)
    probe = {
        "diam": result.diam,
        "sqrt_max_delta": root_depth,
        "max_derivative": speed,
        "diam_over_sqrt_delta": _ratio(result.diam, root_depth),
        "diam_over_derivative": _ratio(result.diam, speed),
        "sqrt_delta_over_derivative": _ratio(root_depth, speed),
    }
    logger.info("[HARNESS] conjecture probe %s", {k: round(v, 6) for k, v in probe.items()})
    return probe


# --- Constant fitting ---

def _fit(rows: Sequence[BoundReport], kind: str) -> ConstantFit:
    usable = [r for r in rows if r.applicable and r.converged and np.isfinite(r.critical)]
    if not rows:
        raise DomainError("cannot fit a constant without samples")
    bound_id = rows[0].bound_id
    if not usable:
        return ConstantFit(bound_id, kind, float("inf") if kind == "inf" else 0.0, 0)
    pick = min if kind == "inf" else max
    witness = pick(usable, key=lambda r: r.critical)
    return ConstantFit(bound_id, kind, float(witness.critical), len(usable), witness)


def fit_lower_constant(rows: Sequence[BoundReport]) -> ConstantFit:
    """Largest admissible constant of a lower bound: inf of criticals, with the witness row."""
    return _fit(rows, "inf")


def fit_upper_constant(rows: Sequence[BoundReport]) -> ConstantFit:
    """Smallest admissible constant of an upper bound: sup of criticals, with the witness row."""
    return _fit(rows, "sup")


def fit_constants(reports: Sequence[BoundReport]) -> Dict[BoundId, ConstantFit]:
    """Fit every fittable bound present in the reports."""
    grouped: Dict[BoundId, List[BoundReport]] = {}
    for report in reports:
        grouped.setdefault(report.bound_id, []).append(report)
    fits = {}
    for bound_id, rows in grouped.items():
        kind = FIT_KIND[bound_id]
        if kind == "inf":
            fits[bound_id] = fit_lower_constant(rows)
        elif kind == "sup":
            fits[bound_id] = fit_upper_constant(rows)
    return fits


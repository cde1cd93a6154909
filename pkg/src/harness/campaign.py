"""
campaign.py

Reproducible verification campaigns near a boundary point.

Responsibilities:
- Sample point pairs per delta decade with a target nontangentiality mix
- Solve each pair (or use the ball oracle) in worker processes
- Evaluate every estimate, merge results by sample index, fit constants
- Emit the CSV of BoundReports and the JSON summary atomically
- Fresh-seed generalization and non-vacuity checks
"""

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from src.config import (
    DEGENERATE_PAIR,
    DELTA_DECADES,
    FAILURE_BUDGET,
    GEODESIC_RESIDUAL_TOL,
    PAIRS_PER_DECADE,
    get_campaign_paths,
)
from src.errors import CampaignFailure, DomainError, LempertError, PreconditionError, SeedFailure, UnsupportedDomainError
from src.geometry.ball import ball_distance, ball_geodesic
from src.geometry.domains import DomainSpec, as_point, boundary_point
from src.geometry.frame import boundary_frame, tangent_basis
from src.harness.bounds import (
    BoundId,
    BoundReport,
    ConstantFit,
    PairMetrics,
    ball_diam_prediction,
    bound_band_bb,
    bound_lower_c2,
    bound_lower_c3,
    bound_lower_imd,
    bound_lower_nt,
    bound_upper_na,
    chord_lower,
    combined_lower,
    conjecture_probe,
    cru_report,
    diam_bounds,
    eps_shape,
    equiv_form_ratio,
    fit_constants,
    geod_compact_check,
    pair_metrics,
    thmgen_ratio,
)
from src.scaling.automorphisms import choose_t, claim_diameter
from src.scaling.normalize import normalize_boundary
from src.solver.discs import disc_diameter, map_disc
from src.solver.lempert import GeodesicResult, SolverConfig, distance_sandwich, solve_extremal_pair
from src.utils.file_utils import atomic_write_csv, atomic_write_json
from src.utils.service_status import get_runtime_status, worker_count

logger = logging.getLogger(__name__)

MIN_DELTA = 1e-5
EPS_JITTER = 0.05
CHORD_POINT = 0.45

DEFAULT_CONSTANTS = {
    "NT": 1.0,
    "BB": 1.0,
    "C2": 1.0,
    "C3": 1.0,
    "COMBINED": 1.0,
    "THGEN": 1.0,
    "D1": 1.0,
    "D2": 1.0,
}


@dataclass(frozen=True)
class CampaignConfig:
    """
    Campaign settings.

    Attributes:
        domain (DomainSpec): Domain under test.
        base_point (np.ndarray, optional): Boundary point p; defaults to the boundary point along e_1.
        decades (tuple): Boundary distances delta, positive and decreasing.
        eps (float): Nontangentiality threshold for C3 and the compact check.
        pairs_per_decade (int): Samples per decade (0 gives an empty campaign).
        seed (int): Master seed; sample (decade j, index i) uses the stream [seed, j, i].
        solver (SolverConfig): Solver settings.
        use_oracle (bool): Use closed-form ball distances and geodesics (ball only).
        constants (dict): Nominal constants used for the reported rhs values.
        workers (int, optional): Worker processes, capped by LEMPERT_THREADS.
        name (str): Campaign name, used for the default output directory.
    """

    domain: DomainSpec
    base_point: Optional[np.ndarray] = None
    decades: Tuple[float, ...] = DELTA_DECADES
    eps: float = 0.5
    pairs_per_decade: int = PAIRS_PER_DECADE
    seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)
    use_oracle: bool = False
    constants: Dict[str, float] = field(default_factory=lambda: dict(DEFAULT_CONSTANTS))
    workers: Optional[int] = None
    name: str = "campaign"

    def __post_init__(self):
        decades = tuple(float(d) for d in self.decades)
        if any(d <= 0 for d in decades) or any(a <= b for a, b in zip(decades, decades[1:])):
            raise DomainError("delta decades must be positive and decreasing")
        if decades and decades[-1] < MIN_DELTA:
            raise PreconditionError(f"campaigns are not run below delta = {MIN_DELTA}")
        if self.pairs_per_decade < 0:
            raise DomainError("pairs per decade must be nonnegative")
        if not 0.0 <= self.eps <= 1.0:
            raise DomainError("eps must lie in [0, 1]")
        if self.use_oracle and self.domain.variant != "ball":
            raise UnsupportedDomainError("the oracle path is only available for the ball")
        object.__setattr__(self, "decades", decades)
        base = self.base_point
        if base is None:
            base = boundary_point(self.domain, np.eye(self.domain.dim, dtype=complex)[0])
        base = as_point(base, self.domain.dim)
        if abs(float(self.domain.defining(base))) > 1e-8:
            raise DomainError("base point is not on the boundary")
        object.__setattr__(self, "base_point", base)
        object.__setattr__(self, "constants", {**DEFAULT_CONSTANTS, **self.constants})

    def to_json(self) -> dict:
        return {
            "domain": self.domain.to_json(),
            "base_point": [[float(c.real), float(c.imag)] for c in self.base_point],
            "decades": list(self.decades),
            "eps": self.eps,
            "pairs_per_decade": self.pairs_per_decade,
            "seed": self.seed,
            "solver": self.solver.to_json(),
            "use_oracle": self.use_oracle,
            "constants": dict(sorted(self.constants.items())),
            "name": self.name,
        }


@dataclass(frozen=True)
class SampleOutcome:
    index: int
    decade: float
    z: np.ndarray
    w: np.ndarray
    reports: Tuple[BoundReport, ...] = ()
    metrics: Optional[PairMetrics] = None
    result: Optional[GeodesicResult] = None
    sandwich: Tuple[float, float] = (float("nan"), float("nan"))
    claim_diam: float = float("nan")
    t: float = float("nan")
    probe: Optional[dict] = None
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


# --- Sampling ---

def _unit_tangent(basis: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    k = basis.shape[1]
    if k == 0:
        return np.zeros(basis.shape[0], dtype=complex)
    v = basis @ (rng.normal(size=k) + 1j * rng.normal(size=k))
    return v / np.linalg.norm(v)


def sample_pair(domain: DomainSpec, p: np.ndarray, delta: float,
                rng: np.random.Generator, eps: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    z = p - delta nu + tangential jitter, w = z + l u with |u_N| = eps_t in the frame of z.

    eps_t is drawn from [eps, eps + EPS_JITTER (1 - eps)], or uniformly from [0, 1]
    when eps is None. The normal part of u points inward, and the length
    l ~ delta^{1/2} keeps w inside.
    """
    grad = domain.dbar(p)
    nu = grad / np.linalg.norm(grad)
    jitter = 0.25 * delta * rng.uniform()
    z = p - delta * nu + jitter * _unit_tangent(tangent_basis(nu), rng)
    if not domain.contains(z):
        z = p - delta * nu

    nu = boundary_frame(domain, z).nu
    basis = tangent_basis(nu)
    if not basis.shape[1]:
        eps_t = 1.0
    elif eps is None:
        eps_t = rng.uniform()
    else:
        eps_t = min(1.0, eps + EPS_JITTER * (1.0 - eps) * rng.uniform())
    theta = rng.uniform(0.5 * np.pi, 1.5 * np.pi)
    u = eps_t * np.exp(1j * theta) * nu + np.sqrt(1.0 - eps_t ** 2) * _unit_tangent(basis, rng)
    length = np.sqrt(delta) * rng.uniform(0.05, 0.5)
    for _ in range(30):
        w = z + length * u
        if domain.contains(w) and np.linalg.norm(w - z) > 10 * DEGENERATE_PAIR:
            return z, w
        length *= 0.5
    raise SeedFailure(f"could not place w inside the domain at delta={delta}")


# --- Per-sample evaluation (module level so ProcessPoolExecutor can pickle it) ---

def ball_oracle_result(z, w, M: int) -> GeodesicResult:
    """Closed-form geodesic of the ball wrapped as a solver result."""
    spec = ball_geodesic(z, w)
    return GeodesicResult(
        kind="pair",
        disc=spec,
        value=ball_distance(z, w),
        residual=0.0,
        diam=disc_diameter(spec, M),
        converged=True,
        alpha=spec.alpha,
    )


def _claim_statistic(domain: DomainSpec, z: np.ndarray, result: GeodesicResult,
                     cfg: SolverConfig) -> Tuple[float, float]:
    """diam(A_t^{-1} o phi) and t for the geodesic in normalized coordinates."""
    try:
        nmap, _ = normalize_boundary(domain, z)
        moved = map_disc(result.disc, nmap.apply, cfg.grid, min(2 * cfg.degree, cfg.grid - 1))
        params = choose_t(moved, cfg.grid)
        if params.at_boundary:
            return float("nan"), 1.0
        return claim_diameter(params.t, moved, cfg.grid), params.t
    except LempertError as exc:
        logger.debug("[CAMPAIGN] scaling statistic unavailable: %s", exc)
        return float("nan"), float("nan")


def _evaluate_sample(task) -> SampleOutcome:
    cfg, index, decade, z, w = task
    domain = cfg.domain
    c = cfg.constants
    try:
        if cfg.use_oracle:
            result, provenance = ball_oracle_result(z, w, cfg.solver.grid), "oracle"
        else:
            result, provenance = solve_extremal_pair(domain, z, w, cfg.solver), "solver"
            if not (result.converged and result.residual < GEODESIC_RESIDUAL_TOL):
                if domain.variant != "ball":
                    return SampleOutcome(index, decade, z, w, error="solver did not converge")
                result, provenance = ball_oracle_result(z, w, cfg.solver.grid), "oracle"

        metrics = pair_metrics(domain, z, w, result.diam, result.residual)
        k = result.value
        pair = dict(distance=k, metrics=metrics)
        reports = [
            bound_upper_na(domain, z, w, **pair),
            bound_lower_nt(domain, z, w, c["NT"], **pair),
            *bound_band_bb(domain, z, w, c["BB"], **pair),
            bound_lower_c2(domain, z, w, c["C2"], **pair),
            bound_lower_c3(domain, z, w, c["C3"], cfg.eps, **pair),
            combined_lower(domain, z, w, c["COMBINED"], **pair),
            bound_lower_imd(domain, z, w, **pair),
            thmgen_ratio(domain, result, z, w, c["THGEN"], metrics),
            *diam_bounds(domain, result, c["D1"], c["D2"]),
            cru_report(domain, result),
            chord_lower(domain, result, 0.0, CHORD_POINT),
        ]
        reports = tuple(replace(r, provenance=provenance) for r in reports)
        sandwich = distance_sandwich(domain, z, w, cfg.solver.grid)
        claim, t = _claim_statistic(domain, z, result, cfg.solver)
        probe = {**conjecture_probe(domain, result), "equiv_form_ratio": equiv_form_ratio(domain, result)}
        if domain.variant == "ball":
            probe["ball_diam_ratio"] = result.diam / ball_diam_prediction(z, result.disc.derivative(0.0))
        return SampleOutcome(index, decade, z, w, reports, metrics, result, sandwich, claim, t, probe)
    except LempertError as exc:
        logger.warning("[CAMPAIGN] sample %d (delta=%.0e) failed: %s", index, decade, exc)
        return SampleOutcome(index, decade, z, w, error=f"{type(exc).__name__}: {exc}")


# --- Campaign report ---

def to_jsonable(value):
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if np.isfinite(value) else None
    return value


@dataclass
class CampaignReport:
    config: CampaignConfig
    outcomes: List[SampleOutcome]

    @property
    def reports(self) -> List[BoundReport]:
        return [r for o in self.outcomes for r in o.reports]

    @property
    def succeeded(self) -> List[SampleOutcome]:
        return [o for o in self.outcomes if not o.failed]

    @property
    def n_failed(self) -> int:
        return sum(o.failed for o in self.outcomes)

    @property
    def failure_fraction(self) -> float:
        return self.n_failed / len(self.outcomes) if self.outcomes else 0.0

    def fits(self) -> Dict[BoundId, ConstantFit]:
        return fit_constants(self.reports)

    def fits_by_decade(self) -> Dict[float, Dict[BoundId, ConstantFit]]:
        return {
            decade: fit_constants([r for o in self.succeeded if o.decade == decade for r in o.reports])
            for decade in self.config.decades
            if any(o.decade == decade for o in self.succeeded)
        }

    def csv_fieldnames(self) -> List[str]:
        coords = [f"{name}{j}_{part}" for name in ("z", "w")
                  for j in range(1, self.config.domain.dim + 1) for part in ("re", "im")]
        return ["bound_id", *coords, "lhs", "rhs", "margin", "constant_used", "critical",
                "delta_z", "delta_w", "dist_zw", "xn", "xN", "eps", "eps_w", "diam", "residual",
                "converged", "applicable", "provenance"]

    def assertions(self) -> Dict[str, bool]:
        """Hard checks on this campaign's own samples."""
        ok = self.succeeded
        sandwich = all(
            o.sandwich[0] <= o.result.value + 1e-9 * (1 + o.result.value) for o in ok
        )
        sandwich_upper = all(
            o.result.value <= o.sandwich[1] + 1e-9 * (1 + abs(o.sandwich[1])) for o in ok
        )
        upper_na = all(r.holds for r in self.reports if r.bound_id is BoundId.NA)
        fits = self.fits()
        d1, d2 = fits.get(BoundId.D1), fits.get(BoundId.D2)
        diam_constants = (d1 is None or d1.value > 0) and (d2 is None or np.isfinite(d2.value))

        def stable(bound_id):
            values = [f[bound_id].value for f in self.fits_by_decade().values()
                      if bound_id in f and np.isfinite(f[bound_id].value) and f[bound_id].value > 0]
            return len(values) < 2 or max(values) / min(values) <= 2.0

        return {
            "sandwich": sandwich,
            "sandwich_upper": sandwich_upper,
            "upper_na": upper_na,
            "diam_constants": bool(diam_constants),
            "diam_stability": stable(BoundId.D1) and stable(BoundId.D2),
            "thgen_stability": stable(BoundId.THGEN),
            "compact_stability": self.compact().stable,
        }

    def compact(self):
        samples = [(o.decade, o.metrics, o.result) for o in self.succeeded]
        return geod_compact_check(self.config.domain, self.config.eps, samples)

    @property
    def passed(self) -> bool:
        return self.failure_fraction <= FAILURE_BUDGET and all(self.assertions().values())

    def summary(self) -> dict:
        cfg = self.config
        fits = self.fits()
        c3 = fits.get(BoundId.C3)
        shape_ratio = None
        if c3 is not None and 0.0 < cfg.eps < 0.5:
            shape_ratio = c3.value / eps_shape(cfg.eps)
        claims = [o.claim_diam for o in self.succeeded if np.isfinite(o.claim_diam)]
        probes = {}
        for decade in cfg.decades:
            rows = [o.probe for o in self.succeeded if o.decade == decade and o.probe]
            if rows:
                probes[decade] = {k: float(np.median([p[k] for p in rows])) for k in sorted(rows[0])}
        summary = {
            "name": cfg.name,
            "seed": cfg.seed,
            "config": cfg.to_json(),
            "runtime": get_runtime_status(),
            "n_samples": len(self.outcomes),
            "n_failed": self.n_failed,
            "failure_fraction": self.failure_fraction,
            "failures": [{"index": o.index, "delta": o.decade, "error": o.error}
                         for o in self.outcomes if o.failed],
            "fits": {b.value: f.to_json() for b, f in sorted(fits.items(), key=lambda kv: kv[0].value)},
            "fits_by_decade": {
                decade: {b.value: f.value for b, f in sorted(dfits.items(), key=lambda kv: kv[0].value)}
                for decade, dfits in self.fits_by_decade().items()
            },
            "c3_shape_ratio": shape_ratio,
            "compact": self.compact().to_json(),
            "claim_min_diameter": min(claims) if claims else None,
            "conjecture_by_decade": probes,
            "assertions": self.assertions(),
            "passed": self.passed,
        }
        return to_jsonable(summary)

    def check_budget(self):
        """
        Raises:
            CampaignFailure: More than FAILURE_BUDGET of the samples failed.
        """
        if self.failure_fraction > FAILURE_BUDGET:
            raise CampaignFailure(
                f"{self.n_failed}/{len(self.outcomes)} samples failed "
                f"({self.failure_fraction:.1%} > {FAILURE_BUDGET:.0%})"
            )


def build_tasks(cfg: CampaignConfig) -> list:
    """All (cfg, index, decade, z, w) tasks, sampled from per-sample RNG streams."""
    tasks = []
    index = 0
    for j, decade in enumerate(cfg.decades):
        for i in range(cfg.pairs_per_decade):
            rng = np.random.default_rng([cfg.seed, j, i])
            z, w = sample_pair(cfg.domain, cfg.base_point, decade, rng, cfg.eps)
            tasks.append((cfg, index, decade, z, w))
            index += 1
    return tasks


def run_campaign(cfg: CampaignConfig, verbose: bool = False) -> CampaignReport:
    """
    Run a campaign; outcomes are merged in sample-index order whatever the execution order.

    Args:
        cfg (CampaignConfig): Campaign settings.
        verbose (bool): Show a progress bar.

    Returns:
        CampaignReport: Outcomes, fits and summary. The failure budget is not enforced here,
        see `CampaignReport.check_budget`.
    """
    tasks = build_tasks(cfg)
    workers = worker_count(cfg.workers)
    logger.info("[CAMPAIGN] %s: %d samples over %d decades, %d workers",
                cfg.name, len(tasks), len(cfg.decades), workers)

    outcomes: Dict[int, SampleOutcome] = {}
    pbar = tqdm(total=len(tasks), desc=f"Campaign {cfg.name}", unit="pair", ncols=100, disable=not verbose)
    if workers == 1 or len(tasks) <= 1:
        for task in tasks:
            outcome = _evaluate_sample(task)
            outcomes[outcome.index] = outcome
            pbar.update(1)
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(_evaluate_sample, task): task[1] for task in tasks}
            for future in as_completed(futures):
                outcome = future.result()
                outcomes[outcome.index] = outcome
                pbar.update(1)
    pbar.close()

    report = CampaignReport(cfg, [outcomes[i] for i in sorted(outcomes)])
    logger.info("[CAMPAIGN] %s done: %d failed (%.1f%%)", cfg.name, report.n_failed, 100 * report.failure_fraction)
    return report


def write_campaign(report: CampaignReport, out_dir: Path = None) -> Dict[str, Path]:
    """Write campaign.csv and summary.json (each with a .sha256 digest) atomically."""
    paths = get_campaign_paths(report.config.name, out_dir)
    rows = [r.to_row() for r in report.reports]
    atomic_write_csv(paths["csv"], report.csv_fieldnames(), rows, digest=True)
    atomic_write_json(paths["summary"], report.summary(), digest=True)
    logger.info("[CAMPAIGN] wrote %s and %s", paths["csv"], paths["summary"])
    return paths


@dataclass(frozen=True)
class FreshSeedCheck:
    seed: int
    checks: Dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {"seed": self.seed, "checks": dict(self.checks), "passed": self.passed}


def _usable(rows: List[BoundReport]) -> List[BoundReport]:
    return [r for r in rows if r.applicable and r.converged and np.isfinite(r.critical)]


def check_fresh_seed(cfg: CampaignConfig, report: CampaignReport) -> FreshSeedCheck:
    """
    Re-run under seed + 1 and test the fitted constants on the fresh samples.

    Lower-bound constants: c/2 holds everywhere, 2c fails at least once.
    Band width: fitted C + 0.5 holds everywhere. Diameter ratio: fresh sup <= 2 C.
    """
    fits = report.fits()
    fresh = run_campaign(replace(cfg, seed=cfg.seed + 1))
    by_id: Dict[BoundId, List[BoundReport]] = {}
    for r in fresh.reports:
        by_id.setdefault(r.bound_id, []).append(r)

    checks: Dict[str, bool] = {}
    for bound_id in (BoundId.C2, BoundId.C3, BoundId.COMBINED):
        fit = fits.get(bound_id)
        rows = _usable(by_id.get(bound_id, []))
        if fit is None or not rows or not np.isfinite(fit.value):
            continue
        checks[f"{bound_id.value}_half_holds"] = all(r.holds_with(0.5 * fit.value) for r in rows)
        checks[f"{bound_id.value}_double_fails"] = any(not r.holds_with(2.0 * fit.value) for r in rows)

    band = [fits[b].value for b in (BoundId.BB_LOWER, BoundId.BB_UPPER) if b in fits]
    band_rows = _usable(by_id.get(BoundId.BB_LOWER, []) + by_id.get(BoundId.BB_UPPER, []))
    if band and band_rows:
        C = max(band) + 0.5
        checks["BB_holds"] = all(r.holds_with(C) for r in band_rows)

    thgen = fits.get(BoundId.THGEN)
    th_rows = _usable(by_id.get(BoundId.THGEN, []))
    if thgen is not None and th_rows:
        checks["THGEN_within_2C"] = max(r.critical for r in th_rows) <= 2.0 * thgen.value

    result = FreshSeedCheck(seed=cfg.seed + 1, checks=checks)
    logger.info("[CAMPAIGN] fresh seed %d: %s", result.seed, checks)
    return result

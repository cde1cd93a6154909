"""
commands.py

Subcommand handlers of the command line. Each handler takes the parsed
arguments, prints one JSON document to stdout and returns the exit code:

    0  success (converged / all campaign assertions passed)
    1  input error (malformed literal, point outside the domain, bad domain file)
    2  computed but flagged (non-convergence, failed assertions, t at the boundary,
       numerical or seed failure, too many failed campaign samples)

`verify` writes its CSV and summary only under --out; without it only stdout is used.
"""

import csv
import io
import json
import logging
from argparse import Namespace
from pathlib import Path
from typing import Callable, Dict

import numpy as np

from src.config import INTERIOR_POINTS
from src.errors import CampaignFailure, DegenerateInputError, LempertError, NumericalFailure, SeedFailure
from src.geometry.ball import ball_geodesic
from src.geometry.domains import DomainSpec
from src.harness.bounds import conjecture_probe, diam_bounds
from src.harness.campaign import CampaignConfig, check_fresh_seed, run_campaign, to_jsonable, write_campaign
from src.scaling.automorphisms import (
    cayley_At_inverse,
    choose_t,
    sqrt_one_minus_t2_ratio,
    tangential_ratio,
    touching_identity,
    transport_disc,
)
from src.scaling.normalize import normalize_boundary
from src.solver.discs import map_disc
from src.solver.lempert import (
    SolverConfig,
    distance_sandwich,
    geodesic_residual,
    solve_extremal_dir,
    solve_extremal_pair,
)
from src.utils.file_utils import atomic_write_json, atomic_write_text

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FLAGGED = 2


def solver_config(args: Namespace) -> SolverConfig:
    return SolverConfig(degree=args.degree, grid=args.grid, gtol=args.tol, seed=args.seed)


def _pair(c) -> list:
    return [float(np.real(c)), float(np.imag(c))]


def emit(payload: dict, args: Namespace):
    """Print the payload (JSON, or a flat key,value CSV) and mirror it to --out."""
    payload = to_jsonable(payload)
    if args.format == "csv":
        flat = {k: v for k, v in payload.items() if not isinstance(v, (dict, list))}
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=sorted(flat), lineterminator="\n")
        writer.writeheader()
        writer.writerow(flat)
        text = buffer.getvalue()
    else:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    print(text, end="")
    if args.out:
        atomic_write_text(Path(args.out), text)


def cmd_distance(args: Namespace, domain: DomainSpec) -> int:
    z = domain.require_inside(args.z, "z")
    w = domain.require_inside(args.w, "w")
    if np.array_equal(z, w):
        emit({"value": 0.0, "display": "0.000000", "lower": 0.0, "upper": 0.0,
              "residual": 0.0, "converged": True}, args)
        return EXIT_OK
    result = solve_extremal_pair(domain, z, w, solver_config(args), restarts=args.restarts)
    lower, upper = distance_sandwich(domain, z, w, args.grid)
    logger.info("[CLI] k_D = %.6f in [%.6f, %.6f]", result.value, lower, upper)
    emit({
        "value": result.value,
        "display": f"{result.value:.6f}",
        "lower": lower,
        "upper": upper,
        "residual": result.residual,
        "converged": result.converged,
        "result": result.to_json(),
    }, args)
    return EXIT_OK if result.converged else EXIT_FLAGGED


def cmd_metric(args: Namespace, domain: DomainSpec) -> int:
    result = solve_extremal_dir(domain, args.z, args.X, solver_config(args))
    emit({
        "value": result.value,
        "display": f"{result.value:.6f}",
        "residual": result.residual,
        "converged": result.converged,
        "result": result.to_json(),
    }, args)
    return EXIT_OK if result.converged else EXIT_FLAGGED


def cmd_geodesic(args: Namespace, domain: DomainSpec) -> int:
    cfg = solver_config(args)
    result = solve_extremal_pair(domain, args.z, args.w, cfg)
    payload = {"result": result.to_json(), "converged": result.converged}
    ok = result.converged
    if args.certify:
        residual = geodesic_residual(domain, result.disc, cfg, INTERIOR_POINTS)
        payload["geodesic_residual"] = residual
        ok = ok and bool(np.isfinite(residual))
    emit(payload, args)
    return EXIT_OK if ok else EXIT_FLAGGED


def _geodesic_disc(domain: DomainSpec, z, w, cfg: SolverConfig):
    if domain.variant == "ball":
        return ball_geodesic(z, w), True
    result = solve_extremal_pair(domain, z, w, cfg)
    return result.disc, result.converged


def cmd_scale(args: Namespace, domain: DomainSpec) -> int:
    z = domain.require_inside(args.z, "z")
    w = domain.require_inside(args.w, "w")
    if np.array_equal(z, w):
        raise DegenerateInputError("scale needs z != w")
    cfg = solver_config(args)
    nmap, params = normalize_boundary(domain, z)
    disc, converged = _geodesic_disc(domain, z, w, cfg)

    degree = min(2 * cfg.degree, cfg.grid - 1)
    moved = map_disc(disc, nmap.apply, cfg.grid, degree)
    touch = choose_t(moved, cfg.grid)
    payload = {
        "map": nmap.to_json(),
        "gamma": _pair(params.gamma),
        "params": touch.to_json(),
        "normalized_refit_residual": moved.fit_residual,
        "converged": converged,
    }
    if touch.at_boundary:
        emit(payload, args)
        return EXIT_FLAGGED

    t = touch.t
    transported = transport_disc(t, moved, cfg.grid, degree)
    payload["transport_refit_residual"] = transported.fit_residual
    payload["touching_min_re"] = float(np.min(transported.boundary_values(cfg.grid)[:, 0].real))
    phi1_eta = complex(moved.evaluate(touch.eta_touch)[0])
    lhs, rhs = touching_identity(t, phi1_eta)
    payload["touching_identity"] = {"lhs": lhs, "rhs": rhs}
    payload["sqrt_one_minus_t2_ratio"] = sqrt_one_minus_t2_ratio(t, phi1_eta)
    x = cayley_At_inverse(t, nmap.apply(z))
    y = cayley_At_inverse(t, nmap.apply(w))
    try:
        ratio, factor = tangential_ratio(t, x, y)
        payload["tangential_ratio"] = {"ratio": ratio, "sqrt_one_minus_t2": factor}
    except DegenerateInputError as exc:
        logger.info("[CLI] tangential ratio skipped: %s", exc)
        payload["tangential_ratio"] = None
    emit(payload, args)
    return EXIT_OK if converged else EXIT_FLAGGED


def cmd_probe(args: Namespace, domain: DomainSpec) -> int:
    result = solve_extremal_pair(domain, args.z, args.w, solver_config(args))
    d1, d2 = diam_bounds(domain, result)
    emit({
        "probe": conjecture_probe(domain, result),
        "diam_lower": {"lhs": d1.lhs, "rhs": d1.rhs, "critical": d1.critical},
        "diam_upper": {"lhs": d2.lhs, "rhs": d2.rhs, "critical": d2.critical},
        "converged": result.converged,
    }, args)
    return EXIT_OK if result.converged else EXIT_FLAGGED


def cmd_verify(args: Namespace, domain: DomainSpec) -> int:
    cfg = CampaignConfig(
        domain=domain,
        decades=args.decades,
        eps=args.eps,
        pairs_per_decade=args.pairs,
        seed=args.seed,
        solver=solver_config(args),
        use_oracle=args.oracle,
        workers=args.workers,
        name=args.name,
    )
    report = run_campaign(cfg, verbose=args.progress)
    summary = report.summary()
    passed = report.passed
    if args.fresh_seed:
        fresh = check_fresh_seed(cfg, report)
        summary["fresh_seed"] = fresh.to_json()
        passed = passed and fresh.passed
    if args.out:
        paths = write_campaign(report, Path(args.out))
        atomic_write_json(paths["summary"], summary, digest=True)
    print(json.dumps(to_jsonable(summary), indent=2, sort_keys=True))
    return EXIT_OK if passed else EXIT_FLAGGED


COMMANDS: Dict[str, Callable[[Namespace, DomainSpec], int]] = {
    "distance": cmd_distance,
    "metric": cmd_metric,
    "geodesic": cmd_geodesic,
    "scale": cmd_scale,
    "verify": cmd_verify,
    "probe": cmd_probe,
}

# Errors raised after the input was accepted: the computation ran and failed.
FLAGGED_ERRORS = (NumericalFailure, SeedFailure, CampaignFailure)


def exit_code_for(exc: LempertError) -> int:
    """EXIT_FLAGGED for failed computations, EXIT_INPUT for everything the caller supplied wrong."""
    return EXIT_FLAGGED if isinstance(exc, FLAGGED_ERRORS) else EXIT_INPUT


def run_command(args: Namespace) -> int:
    """Load the domain file and dispatch; library errors become exit code 1 or 2."""
    try:
        domain = DomainSpec.load(args.domain)
        return COMMANDS[args.command](args, domain)
    except LempertError as exc:
        logger.error("[CLI] %s: %s", type(exc).__name__, exc)
        return exit_code_for(exc)

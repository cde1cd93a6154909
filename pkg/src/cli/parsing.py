"""
parsing.py

Argument grammar of the `lempertkit` command line.

Points and vectors are comma-separated complex literals such as
"0.9,0.1-0.2i" (real part optional, "0.4i" is purely imaginary).
"""

import argparse
import re
from typing import Tuple

import numpy as np

from src.__version__ import __version__
from src.config import BOUNDARY_GRID, DELTA_DECADES, DISC_DEGREE, LOG_LEVEL, PAIRS_PER_DECADE, SOLVER_GTOL
from src.errors import UsageError

_NUMBER = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_REAL = re.compile(rf"^[+-]?{_NUMBER}$")
_FULL = re.compile(rf"^(?P<re>[+-]?{_NUMBER})(?P<im>[+-](?:{_NUMBER})?)i$")
_IMAG = re.compile(rf"^(?P<im>[+-]?(?:{_NUMBER})?)i$")


def _coefficient(text: str) -> float:
    if text in ("", "+"):
        return 1.0
    if text == "-":
        return -1.0
    return float(text)


def parse_complex(token: str) -> complex:
    """'a+bi', 'a', 'bi' or 'a-i' -> complex; raises UsageError on anything else."""
    text = token.strip().replace(" ", "")
    if _REAL.match(text):
        return complex(float(text), 0.0)
    full = _FULL.match(text)
    if full:
        return complex(float(full["re"]), _coefficient(full["im"]))
    imag = _IMAG.match(text)
    if imag:
        return complex(0.0, _coefficient(imag["im"]))
    raise UsageError(f"malformed complex literal {token!r}")


def parse_point(text: str) -> np.ndarray:
    """'0.9,0.1i' -> array([0.9, 0.1j])"""
    parts = [p for p in text.split(",")]
    if not parts or any(not p.strip() for p in parts):
        raise UsageError(f"malformed point {text!r}")
    return np.array([parse_complex(p) for p in parts], dtype=complex)


def parse_decades(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError as exc:
        raise UsageError(f"malformed decade list {text!r}") from exc


def _typed(fn):
    """Turn UsageError into argparse's type error so the message names the argument."""
    def convert(text):
        try:
            return fn(text)
        except UsageError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
    convert.__name__ = fn.__name__
    return convert


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError (exit code 1) instead of exiting with 2."""

    def error(self, message):
        raise UsageError(message)


def build_parser() -> CliParser:
    common = CliParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed")
    common.add_argument("--degree", type=int, default=DISC_DEGREE, help="disc degree K")
    common.add_argument("--grid", type=int, default=BOUNDARY_GRID, help="boundary grid size M (>= 4K)")
    common.add_argument("--tol", type=float, default=SOLVER_GTOL, help="solver gradient tolerance")
    common.add_argument("--out", type=str, default=None, help="output file (directory for verify)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--log-level", default=LOG_LEVEL, help="logging level (overrides LEMPERT_LOG_LEVEL)")

    parser = CliParser(prog="lempertkit", description="Kobayashi distance, extremal discs and boundary estimates.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    point = _typed(parse_point)

    distance = sub.add_parser("distance", parents=[common], help="k_D(z, w) with its sandwich")
    distance.add_argument("domain")
    distance.add_argument("z", type=point)
    distance.add_argument("w", type=point)
    distance.add_argument("--restarts", type=int, default=0)

    metric = sub.add_parser("metric", parents=[common], help="kappa_D(z; X)")
    metric.add_argument("domain")
    metric.add_argument("z", type=point)
    metric.add_argument("X", type=point)

    geodesic = sub.add_parser("geodesic", parents=[common], help="extremal disc through z and w")
    geodesic.add_argument("domain")
    geodesic.add_argument("z", type=point)
    geodesic.add_argument("w", type=point)
    geodesic.add_argument("--certify", action="store_true", help="also compute the geodesic residual")

    scale = sub.add_parser("scale", parents=[common], help="normalization map, t and tangential ratio")
    scale.add_argument("domain")
    scale.add_argument("z", type=point)
    scale.add_argument("w", type=point)

    verify = sub.add_parser("verify", parents=[common], help="run an estimates campaign")
    verify.add_argument("domain")
    verify.add_argument("--eps", type=float, default=0.5)
    verify.add_argument("--decades", type=_typed(parse_decades), default=DELTA_DECADES)
    verify.add_argument("--pairs", type=int, default=PAIRS_PER_DECADE)
    verify.add_argument("--oracle", action="store_true", help="use closed-form ball distances")
    verify.add_argument("--fresh-seed", action="store_true", help="re-check fitted constants under seed + 1")
    verify.add_argument("--workers", type=int, default=None)
    verify.add_argument("--name", default="campaign")
    verify.add_argument("--progress", action="store_true")

    probe = sub.add_parser("probe", parents=[common], help="diameter bounds and comparability probe")
    probe.add_argument("domain")
    probe.add_argument("z", type=point)
    probe.add_argument("w", type=point)

    return parser

"""
app.py

Main entry point for LempertKit, a command-line toolkit for the Kobayashi
distance of convex domains: extremal discs, boundary normalization and
verification campaigns for the boundary estimates.

Subcommands:
- distance: k_D(z, w) with its half-plane / affine sandwich
- metric:   kappa_D(z; X)
- geodesic: extremal disc through z and w (optionally certified)
- scale:    normalization map, touching parameter t, tangential ratio
- verify:   estimates campaign, CSV + JSON summary
- probe:    diameter bounds and comparability probe on one geodesic

Exit codes: 0 success, 1 input error, 2 flagged result.
"""

import logging
import sys

from src.cli.commands import EXIT_INPUT, run_command
from src.cli.parsing import build_parser
from src.errors import UsageError


# --- Logging ---
def configure_logging(level: str):
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, str(level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"lempertkit: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_INPUT

    configure_logging(args.log_level)
    return run_command(args)


if __name__ == "__main__":
    sys.exit(main())

"""
config.py

Configuration module for global constants, environment variables,
and directory paths used throughout LempertKit.

Includes:
- Extremal disc solver defaults (degree, boundary grid, tolerances)
- Nearest-point Newton iteration limits
- Campaign defaults (delta decades, failure budget, output paths)
- Logging and parallelism settings
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# --- Load environment variables from `.env` file (if present) ---
load_dotenv()

# --- Output Directory Paths ---
BASE_DIR = Path(os.getenv("LEMPERT_OUT_DIR", "data/campaigns"))


def get_campaign_paths(campaign_name: str, out_dir: Path = None) -> dict:
    """
    Returns all output paths for a given campaign.

    Args:
        campaign_name (str): Name of the campaign (e.g. "ellipsoid_e1")
        out_dir (Path, optional): Directory overriding BASE_DIR / campaign_name

    Returns:
        dict[str, Path]: Paths for 'dir', 'csv', and 'summary'
    """
    root = Path(out_dir) if out_dir is not None else BASE_DIR / campaign_name
    return {
        "dir": root,
        "csv": root / "campaign.csv",
        "summary": root / "summary.json",
    }


# --- Parallelism & Logging ---
LEMPERT_THREADS = int(os.getenv("LEMPERT_THREADS", os.cpu_count() or 1))  # Max campaign worker processes
LOG_LEVEL = os.getenv("LEMPERT_LOG_LEVEL", "INFO")

# --- Extremal Disc Solver ---
DISC_DEGREE = int(os.getenv("LEMPERT_DEGREE", 16))          # Taylor degree K
BOUNDARY_GRID = int(os.getenv("LEMPERT_GRID", 128))         # Boundary samples M (M >= 4K)
SOLVER_GTOL = float(os.getenv("LEMPERT_GTOL", 1e-10))       # Projected gradient tolerance
SOLVER_MAX_ITER = int(os.getenv("LEMPERT_MAX_ITER", 500))   # Iterations per penalty stage
FD_STEP = float(os.getenv("LEMPERT_FD_STEP", 1e-7))         # Finite-difference step for gradient checks
PENALTY_SCHEDULE = (1e1, 1e2, 1e3, 1e4, 1e5, 1e6)           # Boundary penalty weights, one stage each
ALPHA_MAX = 1.0 - 1e-6                                      # Upper bound of the disc parameter alpha
DEGENERATE_PAIR = 1e-8                                      # |z - w| below this uses the metric path
RESIDUAL_TOL = 1e-6                                         # Endpoint mismatch allowed for convergence
STAGE_RTOL = 1e-5                                           # Last two penalty stages must agree to this

# --- Nearest-Point Projection ---
NEWTON_MAX_ITER = 50
NEWTON_TOL = 1e-12
VALIDITY_RADIUS = 2.0       # Frames and distances are only computed for |z| <= 2
BOUNDARY_TOL = 1e-8         # |r(p)| accepted as "on the boundary"

# --- Hyperbolic Geometry ---
ATANH_CLAMP = 1e-15         # tanh^-1 argument is clamped to 1 - ATANH_CLAMP

# --- Scaling ---
NORMALIZE_MAX_DELTA = 0.2   # normalize_boundary needs delta_D(z) below this
POSTCONDITION_TOL = 1e-8

# --- Estimates Harness ---
DELTA_DECADES = (1e-2, 1e-3, 1e-4)
PAIRS_PER_DECADE = 30
FAILURE_BUDGET = 0.10       # Campaign fails above this fraction of failed solves
GEODESIC_RESIDUAL_TOL = 5e-2
INTERIOR_RADIUS = 0.9       # Interior grid |zeta| <= 0.9
INTERIOR_POINTS = 32

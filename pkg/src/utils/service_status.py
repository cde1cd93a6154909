"""
service_status.py

Runtime status for LempertKit campaigns.

Responsibilities:
- Resolve the number of campaign worker processes (LEMPERT_THREADS cap)
- Report versions of the numerical backends for campaign provenance
"""

import os
import platform

import numpy as np
import scipy

from src.__version__ import __version__
from src.config import LEMPERT_THREADS


def worker_count(requested: int = None) -> int:
    """
    Number of worker processes to use.

    Args:
        requested (int, optional): Explicit request; capped by LEMPERT_THREADS.

    Returns:
        int: At least 1.
    """
    cap = max(int(LEMPERT_THREADS), 1)
    if requested is None:
        return min(cap, os.cpu_count() or 1)
    return max(1, min(int(requested), cap))


def get_runtime_status() -> dict:
    """
    Return versions and parallelism settings recorded in campaign summaries.

    Returns:
        dict: Dictionary containing:
            - 'lempertkit': package version
            - 'numpy' / 'scipy': backend versions
            - 'python': interpreter version
            - 'threads': worker cap
    """
    return {
        "lempertkit": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
        "threads": worker_count(),
    }

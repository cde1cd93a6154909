import json

import numpy as np
from pytest import fixture

from src.geometry.domains import DomainSpec
from src.solver.lempert import SolverConfig

PERTURBATION = {"x1^3": 1.0, "x1*y2^2": 0.5}


@fixture
def ball():
    return DomainSpec.ball(2)


@fixture
def ellipsoid():
    return DomainSpec.ellipsoid((1.0, 4.0))


@fixture
def perturbed():
    return DomainSpec.perturbed_ball(2, 0.05, PERTURBATION)


@fixture
def small_solver():
    """Cheap settings for solver regressions on discs with rational or linear extremals."""
    return SolverConfig(degree=8, grid=64)


@fixture
def domain_file(tmp_path):
    def write(spec: dict):
        path = tmp_path / f"{spec['variant']}.json"
        path.write_text(json.dumps(spec))
        return str(path)
    return write


@fixture
def rng():
    return np.random.default_rng(1234)

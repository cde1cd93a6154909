import json
from dataclasses import replace

import numpy as np

from pytest import approx
from pytest import fixture
from pytest import mark
from pytest import raises

from src.errors import CampaignFailure
from src.errors import DomainError
from src.errors import PreconditionError
from src.errors import UnsupportedDomainError
from src.geometry.domains import boundary_point
from src.geometry.frame import boundary_frame
from src.geometry.frame import nontangentiality
from src.harness.bounds import BoundId
from src.harness.campaign import EPS_JITTER
from src.harness.campaign import CampaignConfig
from src.harness.campaign import CampaignReport
from src.harness.campaign import SampleOutcome
from src.harness.campaign import build_tasks
from src.harness.campaign import check_fresh_seed
from src.harness.campaign import run_campaign
from src.harness.campaign import sample_pair
from src.harness.campaign import write_campaign
from src.solver.lempert import SolverConfig

BOUNDS_PER_SAMPLE = 13


@fixture
def oracle_config(ball):
    return CampaignConfig(domain=ball, decades=(1e-2,), pairs_per_decade=2, seed=7,
                          solver=SolverConfig(degree=8, grid=64), use_oracle=True, workers=1, name="ball_oracle")


def test_config_defaults_base_point(ball):
    cfg = CampaignConfig(domain=ball, pairs_per_decade=0)
    assert np.allclose(cfg.base_point, [1, 0])
    assert cfg.constants["C2"] == 1.0


def test_config_rejects_bad_settings(ball, ellipsoid):
    with raises(UnsupportedDomainError):
        CampaignConfig(domain=ellipsoid, use_oracle=True)
    with raises(DomainError):
        CampaignConfig(domain=ball, decades=(1e-3, 1e-2))
    with raises(PreconditionError):
        CampaignConfig(domain=ball, decades=(1e-2, 1e-6))
    with raises(DomainError):
        CampaignConfig(domain=ball, base_point=[0.5, 0])


def test_sample_pair_stays_inside(ball, rng):
    p = np.array([1, 0], dtype=complex)
    for _ in range(20):
        z, w = sample_pair(ball, p, 1e-3, rng)
        assert ball.contains(z) and ball.contains(w)
        assert np.linalg.norm(z - w) > 0
        assert 1 - np.linalg.norm(z) == approx(1e-3, rel=0.5)


def test_tasks_are_reproducible(oracle_config):
    first, second = build_tasks(oracle_config), build_tasks(oracle_config)
    assert len(first) == 2
    for a, b in zip(first, second):
        assert np.array_equal(a[3], b[3]) and np.array_equal(a[4], b[4])


def test_empty_campaign_writes_header_only(ball, tmp_path):
    cfg = CampaignConfig(domain=ball, pairs_per_decade=0, use_oracle=True, workers=1, name="empty")
    report = run_campaign(cfg)
    paths = write_campaign(report, tmp_path)
    lines = paths["csv"].read_text().splitlines()
    assert len(lines) == 1
    assert lines[0].startswith("bound_id,z1_re,z1_im")
    summary = json.loads(paths["summary"].read_text())
    assert summary["n_samples"] == 0
    assert summary["passed"] is True
    assert (tmp_path / "campaign.csv.sha256").exists()


def test_oracle_campaign(oracle_config, tmp_path):
    report = run_campaign(oracle_config)
    assert report.n_failed == 0
    assert len(report.reports) == 2 * BOUNDS_PER_SAMPLE
    assert all(r.provenance == "oracle" for r in report.reports)
    assert report.assertions()["sandwich"]
    assert BoundId.C2 in report.fits()

    summary = report.summary()
    assert summary["config"]["use_oracle"] is True
    assert "0.01" in summary["fits_by_decade"]


def test_oracle_campaign_is_byte_identical(oracle_config, tmp_path):
    first = write_campaign(run_campaign(oracle_config), tmp_path / "a")
    second = write_campaign(run_campaign(oracle_config), tmp_path / "b")
    assert first["csv"].read_bytes() == second["csv"].read_bytes()
    assert first["summary"].read_bytes() == second["summary"].read_bytes()


def test_failure_budget(ball):
    cfg = CampaignConfig(domain=ball, pairs_per_decade=0)
    z = np.array([0.9, 0], dtype=complex)
    outcomes = [SampleOutcome(i, 1e-2, z, z, error="NumericalFailure: diverged") for i in range(3)]
    report = CampaignReport(cfg, outcomes)
    assert report.failure_fraction == 1.0
    assert not report.passed
    with raises(CampaignFailure):
        report.check_budget()


def _scaled(outcome, bound_id, factor):
    reports = tuple(replace(r, critical=r.critical * factor) if r.bound_id is bound_id else r
                    for r in outcome.reports)
    return replace(outcome, reports=reports)


@mark.parametrize("eps", (0.25, 0.5, 1.0))
def test_sample_pair_honours_eps(perturbed, rng, eps):
    p = boundary_point(perturbed, [1, 0])
    for _ in range(20):
        z, w = sample_pair(perturbed, p, 1e-3, rng, eps)
        ratio = nontangentiality(boundary_frame(perturbed, z), z, w)
        assert eps - 1e-9 <= ratio <= eps + EPS_JITTER * (1 - eps) + 1e-9


@mark.parametrize("eps", (0.25, 0.5, 1.0))
def test_oracle_campaign_at_eps(ball, eps):
    cfg = CampaignConfig(domain=ball, decades=(1e-2, 1e-3), eps=eps, pairs_per_decade=2, seed=11,
                         solver=SolverConfig(degree=8, grid=64), use_oracle=True, workers=1)
    report = run_campaign(cfg)
    assert report.n_failed == 0
    c3 = [r for r in report.reports if r.bound_id is BoundId.C3]
    assert c3 and all(r.applicable for r in c3)
    checks = report.assertions()
    assert checks["sandwich"] and checks["sandwich_upper"]


def test_injected_upper_violation_fails_the_campaign(oracle_config):
    report = run_campaign(oracle_config)
    assert report.assertions()["sandwich_upper"]
    first = report.outcomes[0]
    broken = replace(first, sandwich=(first.sandwich[0], first.result.value - 0.1))
    injected = CampaignReport(oracle_config, [broken, *report.outcomes[1:]])
    assert not injected.assertions()["sandwich_upper"]
    assert not injected.passed


def test_injected_thgen_drift_fails_the_campaign(ball):
    cfg = CampaignConfig(domain=ball, decades=(1e-2, 1e-3), pairs_per_decade=2, seed=7,
                         solver=SolverConfig(degree=8, grid=64), use_oracle=True, workers=1)
    report = run_campaign(cfg)
    assert "thgen_stability" in report.assertions()
    drifted = [_scaled(o, BoundId.THGEN, 10.0) if o.decade == 1e-3 else _scaled(o, BoundId.THGEN, 0.1)
               for o in report.outcomes]
    injected = CampaignReport(cfg, drifted)
    assert not injected.assertions()["thgen_stability"]
    assert not injected.passed


def test_fresh_seed_check(oracle_config):
    report = run_campaign(oracle_config)
    fresh = check_fresh_seed(oracle_config, report)
    assert fresh.seed == oracle_config.seed + 1
    assert all(isinstance(v, bool) for v in fresh.checks.values())
    assert fresh.to_json()["passed"] == fresh.passed


@mark.slow
def test_ellipsoid_campaign(ellipsoid, tmp_path):
    cfg = CampaignConfig(domain=ellipsoid, decades=(1e-2,), pairs_per_decade=2, seed=3,
                         solver=SolverConfig(degree=8, grid=64), workers=1, name="ellipsoid")
    report = run_campaign(cfg)
    assert report.failure_fraction <= 0.5
    assert all(r.provenance == "solver" for r in report.reports)
    checks = report.assertions()
    assert checks["sandwich"] and checks["sandwich_upper"]

    first = write_campaign(report, tmp_path / "a")
    second = write_campaign(run_campaign(cfg), tmp_path / "b")
    assert first["csv"].read_bytes() == second["csv"].read_bytes()

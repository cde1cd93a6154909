from dataclasses import replace

import numpy as np

from pytest import approx
from pytest import raises
from hypothesis import given
from hypothesis.strategies import floats

from src.errors import DegenerateInputError
from src.errors import DomainError
from src.errors import PreconditionError
from src.geometry.ball import ball_distance
from src.harness.bounds import BoundId
from src.harness.bounds import CompactReport
from src.harness.bounds import PairMetrics
from src.harness.bounds import ball_diam_prediction
from src.harness.bounds import bound_band_bb
from src.harness.bounds import bound_lower_c2
from src.harness.bounds import bound_lower_c3
from src.harness.bounds import bound_lower_imd
from src.harness.bounds import bound_lower_nt
from src.harness.bounds import bound_upper_na
from src.harness.bounds import combined_max_average
from src.harness.bounds import cru_report
from src.harness.bounds import diam_bounds
from src.harness.bounds import eps_shape
from src.harness.bounds import equiv_form_ratio
from src.harness.bounds import fit_constants
from src.harness.bounds import fit_lower_constant
from src.harness.bounds import gd_max_form
from src.harness.bounds import pair_metrics
from src.harness.bounds import s_function
from src.harness.bounds import thmgen_ratio
from src.harness.campaign import ball_oracle_result

nonneg = floats(min_value=0, max_value=1e3)

Z, W = [0.5, 0], [0.6, 0]
EXAMPLE = PairMetrics(delta_z=0.01, delta_w=0.01, dist_zw=0.1, xn=0.1, xN=0.1, eps=1.0, eps_w=1.0)


def test_upper_na_ball_example(ball):
    z, w = [0.9, 0], [0.99, 0]
    report = bound_upper_na(ball, z, w, distance=ball_distance(z, w))
    assert report.rhs == approx(np.log1p(0.18 / np.sqrt(0.001)), abs=1e-9)
    assert report.rhs == approx(1.9009, abs=1e-4)
    assert report.direction == "upper"
    assert report.holds
    assert report.provenance == "given"


def test_pair_metrics_radial_pair(ball):
    m = pair_metrics(ball, [0.9, 0], [0.99, 0])
    assert m.delta_z == approx(0.1)
    assert m.delta_w == approx(0.01)
    assert m.dist_zw == approx(0.09)
    assert m.xn == approx(0.09)
    assert m.eps == approx(1.0)
    assert m.h == approx(np.sqrt(0.001))


def test_pair_metrics_tangential_pair(ball):
    m = pair_metrics(ball, [0.9, 0.01], [0.9, -0.01])
    assert m.eps < 0.2
    assert m.dist_zw == approx(0.02)


def test_c2_example_and_critical(ball):
    report = bound_lower_c2(ball, Z, W, 1.0, distance=np.log(11), metrics=EXAMPLE)
    assert report.rhs == approx(np.log(11))
    assert report.critical == approx(1.0)
    assert report.holds_with(1.0)
    assert not report.holds_with(1.1)


def test_nt_critical_is_tight(ball):
    report = bound_lower_nt(ball, Z, W, 1.0, distance=2.0, metrics=EXAMPLE)
    tight = bound_lower_nt(ball, Z, W, report.critical, distance=2.0, metrics=EXAMPLE)
    assert tight.rhs == approx(2.0)
    assert tight.holds


def test_band_criticals(ball):
    lower, upper = bound_band_bb(ball, Z, W, 1.0, distance=1.5, metrics=EXAMPLE)
    assert lower.bound_id is BoundId.BB_LOWER and upper.bound_id is BoundId.BB_UPPER
    assert lower.critical == approx(np.log1p(1.0) - 1.5)
    assert upper.critical == approx(1.5 - np.log1p(10.0))
    assert upper.holds_with(upper.critical)
    assert not upper.holds_with(upper.critical - 0.1)


def test_c3_applicability(ball):
    tangential = replace(EXAMPLE, xN=0.01, eps=0.1)
    assert not bound_lower_c3(ball, Z, W, 1.0, 0.5, distance=1.0, metrics=tangential).applicable
    assert bound_lower_c3(ball, Z, W, 1.0, 0.5, distance=1.0, metrics=EXAMPLE).applicable
    with raises(DomainError):
        bound_lower_c3(ball, Z, W, 1.0, 1.5, distance=1.0, metrics=EXAMPLE)


def test_c3_applicability_survives_rounding_at_eps_one(ball):
    normal = replace(EXAMPLE, xN=EXAMPLE.dist_zw * (1 - 1e-15), eps=1 - 1e-15)
    assert bound_lower_c3(ball, Z, W, 1.0, 1.0, distance=1.0, metrics=normal).applicable


def test_imd_below_half_log_ratio(ball):
    metrics = replace(EXAMPLE, delta_w=1e-4)
    report = bound_lower_imd(ball, Z, W, distance=5.0, metrics=metrics)
    assert report.rhs <= 0.5 * abs(np.log(1e-4 / 1e-2)) + 1e-12


def test_scalar_helpers():
    assert s_function(0.01) == approx(0.460517, abs=1e-6)
    assert s_function(0.0) == 0.0
    with raises(DomainError):
        s_function(-1.0)
    assert eps_shape(0.25) == approx(-0.25 / np.log(0.25) ** 2)
    with raises(DomainError):
        eps_shape(0.5)


@given(nonneg, nonneg)
def test_combined_max_average_nonnegative(x1, x2):
    assert combined_max_average(x1, x2) >= -1e-12


@given(floats(min_value=1e-3, max_value=1e3), nonneg, nonneg)
def test_gd_max_form_dominates_linear_form(c1, xn, dist):
    linear = c1 ** 3 / (c1 ** 2 + 1) * xn
    assert gd_max_form(c1, xn, dist) >= linear - 1e-9 * (1 + linear)


def test_fit_constants_picks_witnesses(ball):
    rows = [bound_lower_c2(ball, Z, W, 1.0, distance=k, metrics=EXAMPLE) for k in (1.0, 2.0, 3.0)]
    fit = fit_constants(rows)[BoundId.C2]
    assert fit.kind == "inf"
    assert fit.value == approx(np.expm1(1.0) * 0.01 / 0.1)
    assert fit.witness is rows[0]
    assert fit.n_samples == 3

    lower, upper = zip(*(bound_band_bb(ball, Z, W, 1.0, distance=k, metrics=EXAMPLE) for k in (1.0, 3.0)))
    fits = fit_constants([*lower, *upper])
    assert fits[BoundId.BB_UPPER].value == approx(3.0 - np.log1p(10.0))
    assert fits[BoundId.BB_LOWER].value == approx(np.log1p(1.0) - 1.0)


def test_fit_ignores_fixed_constant_bounds(ball):
    report = bound_upper_na(ball, Z, W, distance=0.1, metrics=EXAMPLE)
    assert fit_constants([report]) == {}
    with raises(DomainError):
        fit_lower_constant([])


def test_compact_report_stability():
    assert CompactReport(0.5, {1e-2: 0.1, 1e-3: 0.15}, 10).stable
    assert not CompactReport(0.5, {1e-2: 0.1, 1e-3: 0.3}, 10).stable
    assert CompactReport(0.5, {1e-2: 0.1, 1e-3: 0.15}, 10).depth == 0.1


def test_geodesic_bounds_on_ball_oracle(ball):
    z, w = np.array([0.9, 0.1]), np.array([0.9, -0.1])
    result = ball_oracle_result(z, w, 128)
    report = thmgen_ratio(ball, result, z, w)
    assert report.bound_id is BoundId.THGEN
    assert np.isfinite(report.critical) and report.critical >= 0

    d1, d2 = diam_bounds(ball, result)
    assert d1.critical > 0
    assert np.isfinite(d2.critical)
    assert cru_report(ball, result).holds
    assert 0 < equiv_form_ratio(ball, result) < np.inf


def test_diam_bounds_without_usable_frames(ball, monkeypatch):
    z, w = np.array([0.9, 0.1]), np.array([0.9, -0.1])
    result = ball_oracle_result(z, w, 64)
    monkeypatch.setattr("src.harness.bounds._sample_points", lambda: np.zeros(0, dtype=complex))
    d1, d2 = diam_bounds(ball, result)
    assert np.isnan(d1.rhs) and np.isnan(d2.rhs)
    assert not d1.applicable and not d2.applicable
    assert fit_constants([d1, d2])[BoundId.D1].n_samples == 0


def test_thmgen_preconditions(ball):
    z, w = np.array([0.5, 0]), np.array([0.7, 0])
    result = ball_oracle_result(z, w, 64)
    with raises(PreconditionError):
        thmgen_ratio(ball, replace(result, converged=False), z, w)
    with raises(PreconditionError):
        thmgen_ratio(ball, result, z, [0.6, 0])


def test_ball_diam_prediction():
    assert ball_diam_prediction([0.9, 0], [0, 1]) == approx(np.sqrt(0.1))
    assert ball_diam_prediction([0.9, 0], [1, 0]) == approx(np.sqrt(0.1) + 1.0)
    with raises(DegenerateInputError):
        ball_diam_prediction([0.9, 0], [0, 0])

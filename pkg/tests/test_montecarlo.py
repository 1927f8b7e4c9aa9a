import math

import numpy as np
import pytest

from thp.analytics import TfhpModel, lt_diff, lt_sum, tfhp_mean
from thp.bernstein import BernsteinSpec
from thp.errors import ParameterError
from thp.hawkes import HawkesParams, MarkLaw, hp_covariance, hp_mean, hp_variance
from thp.montecarlo import (
    MomentReport,
    MomentRow,
    compare,
    estimate_hp_moments,
    estimate_inverse_lts,
    estimate_tfhp_moments,
    report_to_csv,
    report_to_dict,
)

HAWKES = HawkesParams(theta=1.0, kappa=2.0, eta=1.0, lambda0=2.0, marks=MarkLaw.deterministic(0.5))
TSS = BernsteinSpec.tempered_stable(0.7, 0.5)


def _toy_report(rows):
    return MomentReport(rows=tuple(rows), n_paths=1000, seed=1, bias_bound=1e-4, gamma=1.5)


def test_compare_identical_values_pass():
    rows = [MomentRow("mean", None, 1.0, 1.5, 0.01), MomentRow("variance", None, 1.0, 0.2, 0.02)]
    result = compare([1.5, 0.2], _toy_report(rows))
    assert result.passed and result.max_abs_z == 0.0
    assert all(r.z == 0.0 for r in result.report.rows)


def test_compare_flags_ten_sigma():
    rows = [MomentRow("mean", None, 1.0, 1.5, 0.01)]
    result = compare([1.5 + 0.1], _toy_report(rows))
    assert not result.passed
    assert result.max_abs_z == pytest.approx(10.0)


def test_compare_index_mismatch_and_empty():
    rows = [MomentRow("mean", None, 1.0, 1.5, 0.01)]
    with pytest.raises(ParameterError):
        compare([1.0, 2.0], _toy_report(rows))
    with pytest.raises(ParameterError):
        compare([], _toy_report([]))


def test_eligibility_rule():
    rows = [MomentRow("mean", None, 1.0, 1.5, 0.01)]
    assert _toy_report(rows).eligible  # 1.5*1e-4 < 0.25*0.01
    tight = MomentReport(rows=tuple(rows), n_paths=1000, seed=1, bias_bound=0.01, gamma=1.5)
    assert not tight.eligible


def test_determinism_bit_identical():
    model = TfhpModel(hawkes=HAWKES, sub=TSS)
    a = estimate_tfhp_moments(model, [0.5, 1.0], [(0.5, 1.0)], 300, 42, 2e-3)
    b = estimate_tfhp_moments(model, [0.5, 1.0], [(0.5, 1.0)], 300, 42, 2e-3)
    assert report_to_csv(a) == report_to_csv(b)
    assert report_to_dict(a) == report_to_dict(b)


def test_parallel_matches_serial():
    model = TfhpModel(hawkes=HAWKES, sub=TSS)
    a = estimate_tfhp_moments(model, [0.5, 1.0], [(0.5, 1.0)], 400, 7, 2e-3, threads=1)
    b = estimate_tfhp_moments(model, [0.5, 1.0], [(0.5, 1.0)], 400, 7, 2e-3, threads=2)
    assert report_to_csv(a) == report_to_csv(b)


def test_pure_drift_clock_matches_hp():
    model = TfhpModel(hawkes=HAWKES, sub=BernsteinSpec.custom(b=1.0))
    times, pairs = [0.5, 1.0], [(0.5, 1.0)]
    report = estimate_tfhp_moments(model, times, pairs, 20_000, 11, 1e-4)
    analytic = (
        [hp_mean(HAWKES, t) for t in times]
        + [hp_variance(HAWKES, t) for t in times]
        + [hp_covariance(HAWKES, s, t) for s, t in pairs]
    )
    result = compare(analytic, report)
    assert result.passed, result.failures
    assert report.eligible


def test_tfhp_estimates_match_analytics_small_run():
    model = TfhpModel(hawkes=HAWKES, sub=TSS)
    report = estimate_tfhp_moments(model, [1.0], [], 5000, 23, 5e-4)
    result = compare([tfhp_mean(model, 1.0)], MomentReport(
        rows=report.rows[:1], n_paths=report.n_paths, seed=report.seed,
        bias_bound=report.bias_bound, gamma=report.gamma,
    ))
    assert result.passed, result.failures


def test_clt_scaling_of_se():
    model = TfhpModel(hawkes=HAWKES, sub=BernsteinSpec.custom(b=1.0))
    small = estimate_tfhp_moments(model, [1.0], [], 10_000, 31, 1e-3)
    big = estimate_tfhp_moments(model, [1.0], [], 20_000, 31, 1e-3)
    ratio = big.rows[0].se / small.rows[0].se
    assert abs(ratio - 1.0 / math.sqrt(2.0)) < 0.2 * (1.0 / math.sqrt(2.0))


def test_estimate_inverse_lts_equal_times():
    report = estimate_inverse_lts(TSS, 1.5, 1.0, 1.0, 500, 5, 1e-3)
    sum_row, diff_row = report.rows
    # differences vanish pathwise, so the diff estimator is exactly one
    assert diff_row.estimate == 1.0 and diff_row.se == 0.0
    assert 0.0 < sum_row.estimate < 1.0


def test_estimate_inverse_lts_small_gamma():
    report = estimate_inverse_lts(TSS, 1e-8, 0.5, 1.0, 500, 5, 1e-3)
    for row in report.rows:
        assert row.estimate == pytest.approx(1.0, abs=1e-6)


def test_estimate_inverse_lts_matches_analytics():
    gamma, s, t = 1.5, 0.5, 1.0
    report = estimate_inverse_lts(TSS, gamma, s, t, 20_000, 17, 2e-4)
    result = compare([lt_sum(TSS, gamma, s, t), lt_diff(TSS, gamma, s, t)], report)
    assert result.passed, result.failures


def test_estimate_validation():
    model = TfhpModel(hawkes=HAWKES, sub=TSS)
    with pytest.raises(ParameterError):
        estimate_tfhp_moments(model, [1.0], [], 50, 1, 1e-3)
    with pytest.raises(ParameterError):
        estimate_inverse_lts(TSS, -1.0, 0.5, 1.0, 500, 1, 1e-3)
    with pytest.raises(ParameterError):
        estimate_inverse_lts(TSS, 1.0, 2.0, 1.0, 500, 1, 1e-3)


def test_hp_estimator_against_closed_forms():
    report = estimate_hp_moments(HAWKES, [0.5, 1.0], [(0.5, 1.0)], 20_000, 19)
    analytic = [hp_mean(HAWKES, 0.5), hp_mean(HAWKES, 1.0), hp_variance(HAWKES, 0.5),
                hp_variance(HAWKES, 1.0), hp_covariance(HAWKES, 0.5, 1.0)]
    result = compare(analytic, report)
    assert result.passed, result.failures
    assert report.eligible  # zero bias bound


def test_csv_round_trip_format():
    rows = [MomentRow("mean", None, 1.0, 1.5, 0.01, analytic=1.49, z=-1.0),
            MomentRow("covariance", 0.5, 1.0, 0.06, 0.002, analytic=0.061, z=0.5)]
    text = report_to_csv(_toy_report(rows))
    lines = text.strip().split("\n")
    assert lines[0] == "quantity,s,t,analytic,estimate,se,z"
    assert lines[1].startswith("mean,,1.0,1.49,1.5,0.01,")
    assert lines[2].startswith("covariance,0.5,1.0,")

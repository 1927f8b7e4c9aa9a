import math

import numpy as np
import pytest
from scipy.integrate import quad

from thp import analytics
from thp.analytics import (
    TfhpModel,
    convolve_kernel_phi,
    gfhp_covariance,
    gfhp_mean,
    gfhp_variance,
    lt_diff,
    lt_sum,
    phi_of,
    tfhp_covariance,
    tfhp_mean,
    tfhp_mean_series,
    tfhp_variance,
    tfhp_variance_series,
)
from thp.bernstein import BernsteinSpec
from thp.errors import InversionError, ParameterError, StationarityError
from thp.hawkes import HawkesParams, MarkLaw
from thp.special_functions import kernel_h_renewal, ml_integral_series, phi

HAWKES = HawkesParams(theta=1.0, kappa=2.0, eta=1.0, lambda0=2.0, marks=MarkLaw.deterministic(0.5))
TSS = BernsteinSpec.tempered_stable(0.7, 0.5)
MODEL = TfhpModel(hawkes=HAWKES, sub=TSS)
GAMMA = 1.5


def test_model_requires_stationarity():
    bad = HawkesParams(theta=1.0, kappa=1.0, eta=3.0, lambda0=2.0, marks=MarkLaw.deterministic(0.5))
    with pytest.raises(StationarityError):
        TfhpModel(hawkes=bad, sub=TSS)
    with pytest.raises(ParameterError):
        TfhpModel(hawkes=HAWKES, sub=TSS, lemma41_variant="guess")


def test_tfhp_mean_boundary_and_limit():
    assert tfhp_mean(MODEL, 0.0) == pytest.approx(HAWKES.lambda0)
    # Phi -> 0 under tempering, so the mean approaches kappa*theta/gamma = 4/3
    assert abs(tfhp_mean(MODEL, 200.0) - 4.0 / 3.0) < 1e-4


def test_tfhp_mean_series_consistency():
    for t in (0.1, 0.5, 1.0, 2.0, 5.0):
        assert abs(tfhp_mean_series(MODEL, t) - tfhp_mean(MODEL, t)) < 1e-8


def test_tfhp_variance_boundary_and_sign():
    assert tfhp_variance(MODEL, 0.0) == 0.0
    for t in np.linspace(0.05, 6.0, 24):
        assert tfhp_variance(MODEL, float(t)) >= 0.0


def test_tfhp_variance_series_consistency():
    for t in (0.1, 0.5, 1.0, 2.0, 5.0):
        assert abs(tfhp_variance_series(MODEL, t) - tfhp_variance(MODEL, t)) < 1e-6


def test_lt_sum_boundaries():
    assert lt_sum(TSS, GAMMA, 0.0, 0.0) == pytest.approx(1.0, abs=1e-12)
    for t in (0.5, 2.0):
        assert lt_sum(TSS, GAMMA, 0.0, t) == pytest.approx(phi_of(TSS, GAMMA, t), abs=1e-12)


def test_lt_sum_equal_times_reduces_to_double_rate():
    for t in (0.5, 1.0, 2.0):
        assert abs(lt_sum(TSS, GAMMA, t, t) - phi_of(TSS, 2.0 * GAMMA, t)) < 1e-4


def test_lt_sum_variants_differ():
    proof = lt_sum(TSS, GAMMA, 0.5, 1.0, variant="proof")
    statement = lt_sum(TSS, GAMMA, 0.5, 1.0, variant="statement")
    assert abs(proof - statement) > 0.1


def test_lt_sum_monotone_in_t():
    vals = [lt_sum(TSS, GAMMA, 0.5, t) for t in (0.5, 1.0, 2.0, 4.0)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_lt_diff_boundaries():
    for t in (0.5, 1.0, 2.0):
        assert lt_diff(TSS, GAMMA, 0.0, t) == pytest.approx(phi_of(TSS, GAMMA, t), abs=1e-12)
        assert abs(lt_diff(TSS, GAMMA, t, t) - 1.0) < 1e-4


def test_bivariate_argument_validation():
    with pytest.raises(ParameterError):
        lt_sum(TSS, GAMMA, 1.0, 0.5)
    with pytest.raises(ParameterError):
        lt_diff(TSS, 0.0, 0.5, 1.0)


def test_covariance_reduces_to_variance():
    for t in (0.5, 1.0, 2.0, 5.0):
        assert abs(tfhp_covariance(MODEL, t, t) - tfhp_variance(MODEL, t)) < 1e-6


def test_covariance_cauchy_schwarz():
    grid = [(0.5, 1.0), (0.5, 2.0), (1.0, 2.0), (2.0, 5.0)]
    for s, t in grid:
        c = tfhp_covariance(MODEL, s, t)
        assert c * c <= tfhp_variance(MODEL, s) * tfhp_variance(MODEL, t) * (1.0 + 1e-9)
        assert c >= 0.0


def test_covariance_argument_validation():
    with pytest.raises(ParameterError):
        tfhp_covariance(MODEL, 0.0, 1.0)
    with pytest.raises(ParameterError):
        tfhp_covariance(MODEL, 2.0, 1.0)


def test_convolve_vanishes_at_zero_width():
    assert abs(convolve_kernel_phi("sum", TSS, GAMMA, 1e-8, 1.0)) < 1e-6


def test_convolve_gamma_zero_matches_closed_sum():
    # Phi_0 = 1 inside the integrand: the convolution reduces to the kernel primitive
    beta, nu, s = 0.6, 0.4, 1.0
    spec = BernsteinSpec.tempered_stable(beta, nu)
    got = convolve_kernel_phi("renewal", spec, 0.0, s, s)
    assert got == pytest.approx(ml_integral_series(beta, nu, nu**beta, s), abs=1e-6)


def test_convolve_self_convergence():
    ref = convolve_kernel_phi("sum", TSS, GAMMA, 0.5, 1.0, tol=1e-11)
    err_loose = abs(convolve_kernel_phi("sum", TSS, GAMMA, 0.5, 1.0, tol=1e-4) - ref)
    err_tight = abs(convolve_kernel_phi("sum", TSS, GAMMA, 0.5, 1.0, tol=1e-8) - ref)
    assert err_tight <= max(err_loose, 1e-12)
    assert err_tight < 1e-8


def test_convolve_argument_validation():
    with pytest.raises(ParameterError):
        convolve_kernel_phi("other", TSS, GAMMA, 0.5, 1.0)
    with pytest.raises(ParameterError):
        convolve_kernel_phi("sum", TSS, GAMMA, 2.0, 1.0)


def test_gfhp_boundaries():
    assert gfhp_mean(MODEL, 0.0) == HAWKES.lambda0
    assert gfhp_variance(MODEL, 0.0) == 0.0


def test_gfhp_coincides_with_tfhp_on_tempered_stable():
    for t in (0.1, 0.5, 1.0, 2.0, 5.0):
        assert abs(gfhp_mean(MODEL, t) - tfhp_mean(MODEL, t)) < 1e-5
        assert abs(gfhp_variance(MODEL, t) - tfhp_variance(MODEL, t)) < 1e-5
    for s, t in [(0.5, 1.0), (1.0, 2.0)]:
        assert abs(gfhp_covariance(MODEL, s, t) - tfhp_covariance(MODEL, s, t)) < 1e-5


def test_gfhp_gamma_clock_reductions():
    gspec = BernsteinSpec.gamma_family(1.0, 1.0)
    gmodel = TfhpModel(hawkes=HAWKES, sub=gspec)
    for t in (0.5, 1.0, 2.0):
        assert gfhp_variance(gmodel, t) >= 0.0
        assert abs(gfhp_covariance(gmodel, t, t) - gfhp_variance(gmodel, t)) < 1e-4
    assert abs(lt_diff(gspec, GAMMA, 1.0, 1.0) - 1.0) < 1e-4
    assert abs(lt_sum(gspec, GAMMA, 1.0, 1.0) - phi_of(gspec, 2.0 * GAMMA, 1.0, "inversion")) < 1e-4


def test_gfhp_drift_clock_reproduces_hp():
    from thp.hawkes import hp_mean, hp_variance

    dmodel = TfhpModel(hawkes=HAWKES, sub=BernsteinSpec.custom(b=1.0))
    for t in (0.5, 1.0, 2.0):
        assert abs(gfhp_mean(dmodel, t) - hp_mean(HAWKES, t)) < 1e-5
        assert abs(gfhp_variance(dmodel, t) - hp_variance(HAWKES, t)) < 1e-5


def test_series_route_requires_tempered_stable():
    gspec = BernsteinSpec.gamma_family(1.0, 1.0)
    gmodel = TfhpModel(hawkes=HAWKES, sub=gspec)
    with pytest.raises(ParameterError):
        tfhp_mean(gmodel, 1.0)
    with pytest.raises(ParameterError):
        convolve_kernel_phi("sum", gspec, GAMMA, 0.5, 1.0)


def test_ill_conditioned_inversion_raises(monkeypatch):
    monkeypatch.setattr(analytics, "order_stable", lambda F, t, **kw: False)
    with pytest.raises(InversionError):
        gfhp_mean(MODEL, 1.0)


def test_phi_of_series_matches_direct():
    for t in (0.5, 1.0, 2.0):
        assert phi_of(TSS, GAMMA, t) == pytest.approx(phi(0.7, 0.5, GAMMA, t), rel=1e-12)

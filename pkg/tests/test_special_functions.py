import itertools
import math

import pytest
from scipy.integrate import quad

from thp.errors import DomainError, ParameterError, RangeError, SeriesError
from thp.special_functions import (
    kernel_h_renewal,
    kernel_h_sum,
    ml3,
    ml3_term,
    ml_integral_series,
    phi,
    phi_by_inversion,
    phi_info,
    upper_incomplete_gamma,
    _ml3_terms,
)

# frozen with mpmath at 40 digits: e*erfc(1) and 2*(exp(-1) - sqrt(pi)*erfc(1))
E_ERFC_1 = 0.4275835761558070044107503
UIG_HALF_1 = 0.1781477117815606901925823


def test_ml3_exponential():
    assert ml3(1.0, 1.0, 1.0, 1.0) == pytest.approx(math.e, abs=1e-12)


def test_ml3_zero_argument_is_reciprocal_gamma():
    assert ml3(0.7, 1.7, 1.0, 0.0) == pytest.approx(1.0 / math.gamma(1.7), rel=1e-14)
    assert ml3(0.4, 0.9, 2.3, 0.0) == pytest.approx(1.0 / math.gamma(0.9), rel=1e-14)


def test_ml3_mittag_leffler_half_identity():
    assert ml3(0.5, 1.0, 1.0, -1.0) == pytest.approx(E_ERFC_1, abs=1e-12)


def test_ml3_validation():
    with pytest.raises(ParameterError):
        ml3(-0.5, 1.0, 1.0, 0.5)
    with pytest.raises(RangeError):
        ml3(0.5, 1.0, 1.0, 51.0)
    with pytest.raises(DomainError):
        ml3(0.5, 1.0, 1.0, math.nan)


def test_ml3_overflow_raises():
    # a small order with a large positive argument overflows double range
    with pytest.raises((OverflowError, SeriesError)):
        ml3(0.3, 1.0, 1.0, 49.0)


def test_ml3_precision_loss_refuses():
    # strongly alternating series for small a: cancellation eats the tolerance
    with pytest.raises(SeriesError):
        ml3(0.3, 1.3, 1.0, -3.0)


def test_recurrence_matches_direct_term_at_25():
    for a, b, c, z in [(0.5, 1.0, 1.0, -1.0), (0.7, 1.7, 1.0, 2.5), (0.4, 0.4, 1.0, -3.0)]:
        gen = _ml3_terms(a, b, c, z)
        terms = [next(gen) for _ in range(26)]
        direct = ml3_term(a, b, c, z, 25)
        assert terms[25] == pytest.approx(direct, rel=1e-10)


def test_phi_at_zero_is_one():
    for beta, nu, gamma in itertools.product((0.3, 0.5, 0.7, 0.9), (0.0, 0.5, 2.0), (0.5, 1.5)):
        assert phi(beta, nu, gamma, 0.0) == 1.0


def test_phi_untempered_reduces_to_one_parameter_ml():
    # nu=0 collapses the tilted sum to E_beta(-gamma t^beta)
    assert phi(0.5, 0.0, 1.0, 1.0) == pytest.approx(ml3(0.5, 1.0, 1.0, -1.0), abs=1e-10)


def test_phi_matches_inversion_at_acceptance_point():
    val = phi(0.7, 0.5, 1.5, 2.0)
    inv = phi_by_inversion(0.7, 0.5, 1.5, 2.0)
    assert abs(val - inv) < 1e-5


def test_phi_monotone_in_t_and_gamma():
    grid = [0.05 * k for k in range(1, 21)]
    for beta, nu in [(0.5, 0.0), (0.7, 0.5), (0.3, 2.0)]:
        vals = [phi(beta, nu, 1.0, t) for t in grid]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
        assert all(0.0 < v <= 1.0 for v in vals)
        lo = [phi(beta, nu, 0.5, t) for t in grid]
        hi = [phi(beta, nu, 1.5, t) for t in grid]
        assert all(a >= b - 1e-12 for a, b in zip(lo, hi))


def test_phi_series_inversion_agreement_grid():
    # light version of the acceptance sweep: one tempering per regime
    for beta, nu, gamma, t in [(0.5, 0.0, 1.5, 1.0), (0.7, 0.5, 0.5, 5.0), (0.9, 2.0, 1.5, 2.0)]:
        res = phi_info(beta, nu, gamma, t)
        assert res.method == "series"
        assert abs(res.value - phi_by_inversion(beta, nu, gamma, t)) < 1e-5


def test_phi_flags_inversion_fallback():
    assert phi_info(0.7, 0.5, 1.5, 100.0).method == "inversion"  # nu*t beyond series regime
    assert phi_info(0.3, 0.0, 1.5, 10.0).method == "inversion"  # cancellation-dominated series


def test_phi_validation():
    with pytest.raises(ParameterError):
        phi(1.2, 0.0, 1.0, 1.0)
    with pytest.raises(ParameterError):
        phi(0.5, -0.5, 1.0, 1.0)
    with pytest.raises(DomainError):
        phi(0.5, 0.0, 1.0, -1.0)


def test_kernel_h_sum_value_and_small_y_scaling():
    # 2*gamma - nu^beta = 1 at beta=0.5, nu=0, gamma=0.5
    assert kernel_h_sum(0.5, 0.0, 0.5, 1.0) == pytest.approx(ml3(0.5, 0.5, 1.0, -1.0), rel=1e-12)
    # leading-term scaling: the first series correction is y^beta * |w|, so y
    # must make that smaller than the tolerance
    y = 1e-14
    assert kernel_h_sum(0.5, 0.0, 0.5, y) * y**0.5 == pytest.approx(1.0 / math.gamma(0.5), abs=1e-6)
    y = 1e-8
    assert kernel_h_sum(0.8, 0.0, 0.5, y) * y**0.2 == pytest.approx(1.0 / math.gamma(0.8), abs=1e-6)


def test_kernel_h_sum_nonnegative_on_grid():
    for beta, nu, gamma in [(0.5, 0.0, 0.5), (0.7, 0.5, 1.5), (0.6, 0.4, 0.8)]:
        for y in [0.01 * k for k in range(1, 101)]:
            assert kernel_h_sum(beta, nu, gamma, y) >= 0.0


def test_kernel_h_renewal_untempered_and_value():
    for y in (0.2, 1.0, 3.0):
        assert kernel_h_renewal(0.5, 0.0, y) == pytest.approx(y**-0.5 / math.gamma(0.5), rel=1e-12)
    assert kernel_h_renewal(0.5, 1.0, 1.0) == pytest.approx(math.exp(-1.0) * ml3(0.5, 0.5, 1.0, 1.0), rel=1e-12)


def test_kernel_renewal_integral_matches_closed_sum():
    beta, nu, s = 0.6, 0.4, 1.0
    w = nu**beta

    def integrand(u):
        y = u ** (1.0 / beta)
        return math.exp(-nu * y) * ml3(beta, beta, 1.0, w * u) / beta

    val, _ = quad(integrand, 0.0, s**beta, epsabs=1e-12, epsrel=1e-10, limit=200)
    assert val == pytest.approx(ml_integral_series(beta, nu, w, s), abs=1e-6)


def test_upper_incomplete_gamma_identity():
    assert upper_incomplete_gamma(-0.5, 1.0) == pytest.approx(UIG_HALF_1, abs=1e-9)


def test_upper_incomplete_gamma_against_doubled_resolution():
    for x in (0.25, 1.0, 4.0):
        got = upper_incomplete_gamma(-0.5, x)
        oracle, _ = quad(lambda z: math.exp(-z) * z**-1.5, x, math.inf, epsabs=0.0, epsrel=5e-11, limit=400)
        assert got == pytest.approx(oracle, rel=1e-8)


def test_upper_incomplete_gamma_monotone_and_bounded():
    vals = [upper_incomplete_gamma(-0.7, x) for x in (0.5, 1.0, 2.0, 4.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    for x in (0.5, 1.0, 2.0, 4.0):
        assert upper_incomplete_gamma(-0.7, x) < x ** (-0.7 - 1.0) * math.exp(-x)


def test_upper_incomplete_gamma_domain():
    with pytest.raises(DomainError):
        upper_incomplete_gamma(-0.5, 0.0)

import math

import numpy as np
import pytest
from scipy import special

from lcineq.bounds import (
    BK_THRESHOLD,
    UPPER_LC_THRESHOLD,
    NotApplicableError,
    bk_lower,
    check_bk,
    check_hensley,
    check_power,
    check_upper_lc,
    check_upper_sc,
    check_weighted,
    entropy_upper_check,
    hensley_lower,
    hensley_upper,
    make_report,
    pnorm_inner,
    pnorm_threshold,
    pnorm_threshold_certificate,
    power_lower,
    sconcave_threshold,
    upper_logconcave,
    upper_sconcave,
    weighted_classical,
    weighted_lower,
)
from lcineq.measures import LEBESGUE, DomainError, WeightedMeasure
from lcineq.profiles import (
    ConvexWeight,
    Indicator,
    PlateauPower,
    TruncatedExponential,
    mass,
    random_logconcave,
    stats,
    weighted_moment,
)
from lcineq.bounds import pnorm_upper_check

T2 = ConvexWeight.power(2)
EXP = TruncatedExponential(1.0, 1.0, math.inf)
LN2 = math.log(2)


def theta_oracle(x, p):
    """Independent evaluation of the p-norm threshold expression via Lambert W."""
    w = (p * x / (1 - (1 - x) ** p)) ** (1 / (p - 1))
    v = -np.real(special.lambertw(-w * np.exp(-w), 0)) / w
    return (1 - v) / x


def test_hensley():
    assert hensley_lower(1, 1) == pytest.approx(1 / 3)
    assert hensley_lower(2, 2) == pytest.approx(2 / 3)
    assert hensley_upper(1, 1) == 2.0
    rep = check_hensley(Indicator(1, 1))
    assert rep.satisfied and abs(rep.slack) < 1e-12
    rep = check_hensley(EXP)
    assert rep.lhs == pytest.approx(2.0) and rep.rhs == pytest.approx(1 / 3)
    rep = check_hensley(Indicator(2, 1))
    assert rep.lhs == pytest.approx(2 / 3, rel=1e-12) and rep.rhs == pytest.approx(2 / 3)


def test_bk():
    rep = check_bk(Indicator(1, 2), 1.0)
    assert rep.rhs == pytest.approx(8 / 3, rel=1e-12) and rep.lhs == pytest.approx(8 / 3, rel=1e-12)
    assert rep.satisfied and rep.applicable
    assert bk_lower(LN2, 0.5, 1.0) == pytest.approx(4 * LN2 ** 2 / 3, rel=1e-14)
    rep = check_bk(EXP, LN2)
    assert rep.satisfied and rep.lhs == pytest.approx(2.0)
    with pytest.raises(NotApplicableError):
        bk_lower(1.0, 0.8, 1.0)
    assert not check_bk(Indicator(1, 1), 0.9).applicable


def test_bk_small_h_limit():
    f = random_logconcave(4, 5)
    V = mass(f)
    h = 1e-5
    st = stats(f, LEBESGUE, h)
    assert bk_lower(h, st.u, st.V) == pytest.approx(hensley_lower(f.f0, V), rel=1e-4)


def test_upper_lc():
    rep = check_upper_lc(EXP, 1.0)
    assert rep.rhs == pytest.approx(2.0, rel=1e-9) and rep.lhs == pytest.approx(2.0, rel=1e-9)
    assert rep.satisfied
    assert upper_logconcave(0.5, 0.5, 1.0) == pytest.approx(0.5 / LN2 ** 2, rel=1e-14)
    assert check_upper_lc(Indicator(1, 1), 0.5).satisfied
    with pytest.raises(NotApplicableError):
        upper_logconcave(1.0, 0.9, 1.0)


def test_upper_lc_scaling():
    f = random_logconcave(8, 5)
    k = 3.0
    st = stats(f, LEBESGUE, 0.2)
    # f(t/k) has head mass k u at width k h and total k V
    assert upper_logconcave(k * 0.2, k * st.u, k * st.V) == pytest.approx(
        k ** 3 * upper_logconcave(0.2, st.u, st.V), rel=1e-13)


def test_monotone_improvement():
    for seed in range(20):
        f = random_logconcave(seed, 6)
        V = mass(f)
        hs = np.linspace(1e-4, 1.0, 60) * f.support_end
        u = np.array([stats(f, LEBESGUE, h).u for h in hs])
        keep = u / V <= UPPER_LC_THRESHOLD
        ratio = hs[keep] / -np.log1p(-u[keep] / V)
        scale = np.max(ratio)
        assert np.all(np.diff(ratio) <= 1e-9 * scale)
        assert np.all(upper_logconcave(hs[keep], u[keep], V) <= hensley_upper(f.f0, V) * (1 + 1e-9))


def test_sconcave_threshold():
    assert sconcave_threshold(1.0) == 0.75
    assert sconcave_threshold(0.5) == pytest.approx(1 - (3 / 5) ** 3, rel=1e-15)
    for n in range(2, 11):
        exact = 1 - (n / (n + 2)) ** n
        assert sconcave_threshold(1 / (n - 1)) == pytest.approx(exact, rel=1e-14, abs=1e-15)
        assert exact >= 0.75
    s = np.geomspace(1e-6, 1e-1, 20)[::-1]
    vals = np.array([sconcave_threshold(x) for x in s])
    assert np.all(np.diff(vals) > 0)
    assert vals[-1] == pytest.approx(1 - math.exp(-2), abs=1e-5)
    with pytest.raises(DomainError):
        sconcave_threshold(0.0)


def test_upper_sconcave():
    rep = check_upper_sc(PlateauPower(1, 0, 1, 1), 0.5, 1.0)
    assert rep.rhs == pytest.approx(1 / 12, rel=1e-9) and rep.lhs == pytest.approx(1 / 12, rel=1e-9)
    assert rep.satisfied and rep.applicable
    rep = check_upper_sc(Indicator(1, 1), 0.3, 1.0)
    assert rep.satisfied and rep.rhs >= 1 / 3


@pytest.mark.parametrize("ratio", [0.05, 0.3, 0.6, 0.8])
def test_upper_sconcave_small_s(ratio):
    lc = upper_logconcave(0.7, ratio, 1.0)
    assert upper_sconcave(0.7, ratio, 1.0, 1e-4) == pytest.approx(lc, rel=1e-2)
    assert upper_sconcave(0.7, ratio, 1.0, 1e-7) == pytest.approx(lc, rel=1e-5)


def test_weighted_examples():
    rep = check_weighted(Indicator(1, 2), T2, LEBESGUE, 1.0)
    assert rep.rhs == pytest.approx(8 / 3, rel=1e-10) and rep.lhs == pytest.approx(8 / 3, rel=1e-12)
    mu = WeightedMeasure(0.0, 1.0)
    d = 3.0
    oracle = 2 - math.exp(-d) * (d * d + 2 * d + 2)
    rep = check_weighted(Indicator(1, d), T2, mu, 1.0)
    assert rep.rhs == pytest.approx(oracle, rel=1e-9) and rep.lhs == pytest.approx(oracle, rel=1e-9)
    assert weighted_lower(T2, LEBESGUE, LN2, 0.5, 1.0) == pytest.approx(4 / 3 * LN2 ** 2, rel=1e-10)


def test_weighted_indicator_equality_weighted_measures():
    for mu in (WeightedMeasure(0.5, 0.0), WeightedMeasure(0.3, 1.0), WeightedMeasure(0.5, 1.0)):
        for N in (T2, ConvexWeight.power(3), ConvexWeight.cosh(1.0)):
            rep = check_weighted(Indicator(2.0, 1.5), N, mu, 0.5)
            assert rep.lhs == pytest.approx(rep.rhs, rel=1e-9)


def test_weighted_classical_limit():
    f = random_logconcave(2, 5)
    for mu in (LEBESGUE, WeightedMeasure(0.5, 0.0), WeightedMeasure(0.0, 1.0), WeightedMeasure(0.5, 1.0)):
        st = stats(f, mu, 1e-5)
        lim = weighted_classical(T2, mu, f.f0, st.V)
        assert weighted_lower(T2, mu, 1e-5, st.u, st.V) == pytest.approx(lim, rel=1e-4)


def test_power():
    rep = check_power(Indicator(1, 1), 1.0, 0.5)
    assert rep.rhs == pytest.approx(0.5) and rep.lhs == pytest.approx(0.5)
    for h, u, V in [(0.3, 0.2, 1.0), (2.0, 1.0, 5.0)]:
        assert power_lower(2, h, u, V) == pytest.approx(bk_lower(h, u, V), rel=1e-15)
    assert power_lower(3, LN2, 0.5, 1.0) == pytest.approx(2 * LN2 ** 3, rel=1e-14)
    assert check_power(EXP, 3.0, LN2).satisfied
    with pytest.raises(DomainError):
        power_lower(0.5, 1, 0.1, 1)
    with pytest.raises(NotApplicableError):
        power_lower(2, 1, 0.6, 1)


def test_theta_p():
    for p in (1.1, 1.5, 2.0):
        assert pnorm_threshold(p) >= 0.5
    cert = pnorm_threshold_certificate(2.0)
    assert cert.argmin == pytest.approx(1.0)
    assert cert.value == pytest.approx(0.7968121300200202, abs=1e-10)
    assert cert.limit_at_zero == pytest.approx(1.0, abs=1e-5)
    with pytest.raises(DomainError):
        pnorm_threshold(1.0)


def test_theta_brute_force():
    x = np.linspace(1e-5, 1.0, 100_000)
    brute = np.min(theta_oracle(x, 2.0))
    assert pnorm_threshold(2.0) == pytest.approx(brute, abs=1e-6)


@pytest.mark.parametrize("p", [1.1, 1.5, 2.0, 3.0])
def test_pnorm_inner_matches_oracle(p):
    x = np.geomspace(1e-3, 1.0, 200)
    # the exponent 1/(p-1) amplifies rounding in the base
    np.testing.assert_allclose(pnorm_inner(x, p), theta_oracle(x, p), rtol=1e-9 / (p - 1))
    assert float(pnorm_inner(1e-7, p)) == pytest.approx(1.0, abs=1e-5)


def test_pnorm_examples():
    rep = pnorm_upper_check(Indicator(1, 2), 2.0, 1.5)
    assert rep.lhs == pytest.approx(2.0) and rep.rhs == pytest.approx(2.0) and rep.satisfied
    rep = pnorm_upper_check(EXP, 2.0, 1e-3)
    assert rep.lhs == pytest.approx(0.5) and rep.satisfied
    for c in (0.3, 5.0):
        for p in (1.5, 2.0, 4.0):
            rep = pnorm_upper_check(Indicator(c, 2.0), p, 0.5)
            assert rep.lhs == pytest.approx(rep.rhs, rel=1e-12)


def test_entropy_examples():
    rep = entropy_upper_check(Indicator(1, 2), 1.0)
    assert rep.lhs == 0 and rep.rhs == 0 and rep.satisfied
    rep = entropy_upper_check(EXP, LN2)
    assert rep.lhs == pytest.approx(-1.0, rel=1e-9)
    assert rep.rhs == pytest.approx(math.log(0.5 / LN2), rel=1e-12) and rep.satisfied
    rep = entropy_upper_check(Indicator(2, 1), 0.25)
    assert rep.lhs == pytest.approx(2 * LN2) and rep.rhs == pytest.approx(2 * LN2)
    assert not entropy_upper_check(EXP, 2.0).applicable
    assert entropy_upper_check(EXP, 2.0, threshold=0.9).applicable


def test_report_slack_direction():
    lo = make_report("x", 2.0, 1.0, 0.1, 0.5, "lower")
    up = make_report("x", 2.0, 1.0, 0.1, 0.5, "upper")
    assert lo.slack == 1.0 and lo.satisfied
    assert up.slack == -1.0 and not up.satisfied
    assert make_report("x", math.inf, 1.0, 0.1, 0.5, "lower").satisfied
    assert not make_report("x", math.nan, 1.0, 0.1, 0.5, "lower").satisfied


def test_sandwich_on_random_profiles():
    for seed in range(200):
        f = random_logconcave(seed, 6)
        h = 0.1 * f.support_end
        lo = check_bk(f, h)
        if lo.applicable:
            assert lo.satisfied
        up = check_upper_lc(f, h)
        if up.applicable:
            assert up.satisfied


def test_domain_errors():
    with pytest.raises(DomainError):
        bk_lower(0.0, 0.1, 1.0)
    with pytest.raises(DomainError):
        bk_lower(1.0, 2.0, 1.0)
    assert BK_THRESHOLD == 0.75
    assert UPPER_LC_THRESHOLD == pytest.approx(1 - math.exp(-math.sqrt(3)))
    assert weighted_moment(Indicator(1, 1), T2) == pytest.approx(1 / 3)

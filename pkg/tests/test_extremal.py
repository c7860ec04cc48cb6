import math

import numpy as np
import pytest
from scipy.optimize import brentq

from lcineq.bounds import sconcave_threshold, upper_logconcave, upper_sconcave, weighted_lower
from lcineq.extremal import (
    K_u,
    K_u_domain,
    objective_upper_lc,
    objective_upper_sc,
    reduce_lower,
    reduce_lower_batch,
    reduce_upper_logconcave,
    reduce_upper_logconcave_batch,
    reduce_upper_sconcave,
    sweep,
    sweep_grid,
)
from lcineq.measures import LEBESGUE, DivergentIntegralError, DomainError, WeightedMeasure
from lcineq.profiles import (
    ConvexWeight,
    Indicator,
    LogConcaveSampled,
    PlateauExponential,
    PlateauPower,
    TruncatedExponential,
    random_logconcave,
    random_sconcave,
    stats,
    weighted_moment,
)

T2 = ConvexWeight.power(2)
COSH = ConvexWeight.cosh(1.0)
MU = WeightedMeasure(0.3, 1.0)
D_LC = math.exp(-math.sqrt(3))


def test_objective_upper_lc_examples():
    assert objective_upper_lc(0.0, math.exp(-1)) == pytest.approx(2.0, rel=1e-15)
    assert objective_upper_lc(0.0, D_LC) == pytest.approx(2 / 3, rel=1e-14)
    v1 = objective_upper_lc(1.0, D_LC)
    assert v1 == pytest.approx(16 / (6 * (1 - math.log(2 * D_LC)) ** 2), rel=1e-14)
    assert v1 <= 2 / 3


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_objective_upper_sc_at_zero(s):
    for delta in (0.1, 0.25, 0.6):
        m = 1 / s
        exp = 2 / ((m + 2) * (m + 3) * (1 - delta ** (s / (s + 1))) ** 2)
        assert objective_upper_sc(0.0, delta, s) == pytest.approx(exp, rel=1e-13)
        assert objective_upper_sc(0.0, delta, s) == pytest.approx(
            upper_sconcave(1.0, 1 - delta, 1.0, s, strict=False), rel=1e-13)
    assert objective_upper_sc(0.0, 0.25, 1.0) == pytest.approx(2 / 3, rel=1e-14)


def test_objective_upper_sc_small_s():
    for delta in (D_LC, 0.3, 0.5):
        assert objective_upper_sc(0.0, delta, 1e-4) == pytest.approx(
            objective_upper_lc(0.0, delta), rel=1e-2)
        # the plateau parameter of the s-concave family scales with s
        for x in (0.5, 2.0, 10.0):
            assert objective_upper_sc(1e-4 * x, delta, 1e-4) == pytest.approx(
                objective_upper_lc(x, delta), rel=1e-2)


def test_objective_matches_reduced_profile_moment():
    # x = d * rate for the plateau-exponential family with V = h = 1
    for x, delta in [(0.7, 0.3), (2.5, 0.2)]:
        # find rate with tail mass fraction delta on [1, inf): c e^{-r(1-d)}/r = delta * V
        def resid(r):
            d = x / r
            V = d + 1 / r
            return math.exp(-r * (1 - d)) / r / V - delta

        r = brentq(resid, x + 1e-9, 1e3)
        f = PlateauExponential(1.0, x / r, r)
        V = x / r + 1 / r
        m = weighted_moment(f, T2) / (V * 1.0)
        assert objective_upper_lc(x, delta) == pytest.approx(m, rel=1e-9)


def test_objective_domain():
    with pytest.raises(DomainError):
        objective_upper_lc(0.0, 1.5)
    with pytest.raises(DomainError):
        objective_upper_lc(-1.0, 0.3)
    with pytest.raises(DomainError):
        objective_upper_sc(0.0, 0.3, 0.0)


def test_K_u_endpoint():
    lo, hi = K_u_domain(LEBESGUE, 0.5, 1.0, 1.0)
    assert lo == 0.0 and hi == 1.0
    assert K_u(T2, LEBESGUE, 0.5, 1.0, 1.0, 1e-7) == pytest.approx(4 / 3, rel=1e-5)
    assert weighted_lower(T2, LEBESGUE, 1.0, 0.5, 1.0) == pytest.approx(4 / 3, rel=1e-12)


def test_K_u_matches_truncated_exponential():
    # each x corresponds to a truncated exponential with head mass u and total V
    u, V, h = 0.3, 1.0, 0.8
    for x in (0.2, 0.5, 0.9):
        val = K_u(T2, LEBESGUE, u, V, h, x)
        assert val > weighted_lower(T2, LEBESGUE, h, u, V)
        assert np.isfinite(val)


def test_K_u_monotone_weighted():
    res = sweep("K_u", steps=300, N=T2, mu=WeightedMeasure(0.0, 1.0), u=0.5, V=1.0, h=0.3)
    assert res.monotone
    assert np.all(np.diff(res.value) >= -1e-9 * np.max(np.abs(res.value)))


def test_K_u_domain_errors():
    with pytest.raises(DomainError):
        K_u(T2, LEBESGUE, 0.6, 1.0, 1.0, 0.5)
    with pytest.raises(DomainError):
        K_u(T2, LEBESGUE, 0.5, 1.0, 1.0, 1.5)


@pytest.mark.parametrize("delta", [D_LC, 0.3, 0.5])
def test_sweep_upper_lc(delta):
    res = sweep("upper-lc", (0.0, 10.0), 4096, Delta=delta)
    assert res.argmax == 0.0
    assert res.monotone
    assert res.max == pytest.approx(upper_logconcave(1.0, 1 - delta, 1.0), rel=1e-12)


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_sweep_upper_sc_boundary(s):
    delta = 1 - sconcave_threshold(s)
    res = sweep("upper-sc", (0.0, 10.0), 4096, Delta=delta, s=s)
    assert res.argmax == 0.0
    assert res.max == pytest.approx(upper_sconcave(1.0, 1 - delta, 1.0, s), rel=1e-6)


def test_threshold_witness_runs():
    res = sweep("upper-lc", (0.0, 10.0), 512, Delta=0.9 * D_LC)
    assert np.isfinite(res.max)


def test_sweep_grid_and_outputs():
    x = sweep_grid(0.0, 10.0, 4096)
    assert x.size == 4096 and x[0] == 0.0 and x[1] == pytest.approx(1e-6) and x[-1] == 10.0
    res = sweep("upper-lc", (0.0, 1.0), 8, Delta=0.3)
    lines = res.to_csv().splitlines()
    assert lines[0] == "x,value" and len(lines) == 9
    assert '"monotone": true' in res.summary_json()
    with pytest.raises(DomainError):
        sweep_grid(0.0, 1.0, 1)
    with pytest.raises(DomainError):
        sweep("nope")


def test_reduce_upper_lc_fixed_point():
    for mu in (LEBESGUE, MU):
        f = PlateauExponential(1.0, 0.5, 2.0)
        g = reduce_upper_logconcave(f, mu, 1.0)
        a, b = stats(f, mu, 1.0), stats(g, mu, 1.0)
        assert b.u == pytest.approx(a.u, rel=1e-9) and b.V == pytest.approx(a.V, rel=1e-9)
        assert weighted_moment(g, T2, mu) == pytest.approx(weighted_moment(f, T2, mu), rel=1e-8)
        assert (g.c, g.d, g.rate) == (pytest.approx(1.0), pytest.approx(0.5), pytest.approx(2.0))


def test_reduce_upper_lc_truncated_exponential():
    f = TruncatedExponential(1.0, 2.0, 1.5)
    for mu in (LEBESGUE, MU):
        g = reduce_upper_logconcave(f, mu, 0.5)
        a, b = stats(f, mu, 0.5), stats(g, mu, 0.5)
        assert b.u == pytest.approx(a.u, rel=1e-9) and b.V == pytest.approx(a.V, rel=1e-9)
        assert weighted_moment(g, T2, mu) >= weighted_moment(f, T2, mu)


def test_reduce_lower_indicator():
    g = reduce_lower(Indicator(1.0, 2.0), LEBESGUE, 1.0)
    assert g.a == 0.0 and g.c == pytest.approx(1.0) and g.d == pytest.approx(2.0, rel=1e-12)
    g = reduce_lower(Indicator(1.0, 2.0), MU, 1.0)
    assert g.a == pytest.approx(0.0, abs=1e-12) and g.d == pytest.approx(2.0, rel=1e-12)


def test_reduce_lower_plateau_weighted_mass():
    f = PlateauExponential(1.0, 0.5, 2.0)
    g = reduce_lower(f, MU, 0.7)
    a, b = stats(f, MU, 0.7), stats(g, MU, 0.7)
    assert b.u == pytest.approx(a.u, rel=1e-8) and b.V == pytest.approx(a.V, rel=1e-8)
    assert weighted_moment(g, T2, MU) <= weighted_moment(f, T2, MU)


def test_reduce_lower_exponential_stretch():
    # f coincides with its reduction up to a kink far out; the cut must track the kink
    knots = [0.0, 30.93516037, 35.14405115, 57.62559464]
    phi = [-0.440294185, -43.2075998, -51.5787537, -162.233989]
    f = LogConcaveSampled(knots, phi)
    g = reduce_lower(f, LEBESGUE, 0.2795854442419017)
    assert weighted_moment(g, COSH) <= weighted_moment(f, COSH) * (1 + 1e-8)
    a, b = stats(f, LEBESGUE, 0.28), stats(g, LEBESGUE, 0.28)
    assert b.V == pytest.approx(a.V, rel=1e-9)


def test_reduce_upper_sc_fixed_point():
    for s in (0.5, 1.0, 2.0):
        f = PlateauPower(1.0, 0.0, 1.0, s)
        g = reduce_upper_sconcave(f, LEBESGUE, 0.3, s)
        assert g.d == pytest.approx(0.0, abs=1e-7)
        assert g.b == pytest.approx(1.0, rel=1e-8)
        assert weighted_moment(g, T2) == pytest.approx(weighted_moment(f, T2), rel=1e-8)


def test_reduce_upper_sc_indicator():
    f = Indicator(1.0, 2.0)
    for h in (1.0, 1.9):
        g = reduce_upper_sconcave(f, LEBESGUE, h, 1.0)
        a, b = stats(f, LEBESGUE, h), stats(g, LEBESGUE, h)
        assert b.u == pytest.approx(a.u, rel=1e-9) and b.V == pytest.approx(a.V, rel=1e-9)
        assert weighted_moment(g, T2) >= weighted_moment(f, T2) * (1 - 1e-12)


def _moment(f, N, mu):
    try:
        return weighted_moment(f, N, mu)
    except DivergentIntegralError:
        return math.inf


def _check_batch(fn, profiles, mu, h, direction, **kw):
    reduced = fn(profiles, mu, h, **kw)
    for f, g, hk in zip(profiles, reduced, h):
        a, b = stats(f, mu, hk), stats(g, mu, hk)
        assert b.u == pytest.approx(a.u, rel=1e-8)
        assert b.V == pytest.approx(a.V, rel=1e-8)
        for N in (T2, COSH):
            mf, mg = _moment(f, N, mu), _moment(g, N, mu)
            if direction == "upper":
                assert mg >= mf * (1 - 1e-8)
            else:
                assert mg <= mf * (1 + 1e-8)


@pytest.mark.parametrize("mu", [LEBESGUE, MU])
def test_reductions_random(mu):
    profiles = [random_logconcave(seed, 5) for seed in range(40)]
    h = np.array([0.2 * f.support_end for f in profiles])
    _check_batch(reduce_upper_logconcave_batch, profiles, mu, h, "upper")
    _check_batch(reduce_lower_batch, profiles, mu, h, "lower")


def test_reduction_rejects_degenerate():
    with pytest.raises(DomainError):
        reduce_lower(Indicator(1.0, 1.0), LEBESGUE, 1.0)
    with pytest.raises(DomainError):
        reduce_upper_sconcave(random_sconcave(1, 1.0, 3), LEBESGUE, 1.0, 0.0)

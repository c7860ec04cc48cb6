import math

import numpy as np
import pytest
from scipy import integrate as sci_integrate

from lcineq.measures import LEBESGUE, DomainError, WeightedMeasure
from lcineq.profiles import (
    BallSection,
    ConvexWeight,
    HalfGaussian,
    Indicator,
    LogConcaveSampled,
    PlateauExponential,
    PlateauPower,
    SConcaveSampled,
    TruncatedExponential,
    evaluate,
    is_valid,
    mass,
    profile_from_dict,
    profile_from_json,
    random_logconcave,
    random_sconcave,
    stats,
    weighted_moment,
)

EXP = TruncatedExponential(1.0, 1.0, math.inf)
RAMP = PlateauPower(1.0, 0.0, 1.0, 1.0)


def test_evaluate_examples():
    assert evaluate(Indicator(2, 1), 0.5) == 2.0
    assert evaluate(PlateauExponential(1, 1, 1), 2.0) == pytest.approx(math.exp(-1), rel=1e-15)
    assert evaluate(RAMP, 0.25) == pytest.approx(0.75, rel=1e-15)
    np.testing.assert_allclose(evaluate(EXP, np.array([0.0, 1.0])), [1.0, math.exp(-1)])


def test_stats_examples():
    st = stats(EXP, LEBESGUE, math.log(2))
    assert (st.u, st.V) == (pytest.approx(0.5, rel=1e-12), pytest.approx(1.0, rel=1e-12))
    st = stats(Indicator(1, 2), LEBESGUE, 1.0)
    assert (st.u, st.V) == (pytest.approx(1.0), pytest.approx(2.0))
    st = stats(RAMP, LEBESGUE, 0.5)
    assert (st.u, st.V) == (pytest.approx(3 / 8, rel=1e-12), pytest.approx(0.5, rel=1e-12))
    assert st.ratio == pytest.approx(0.75)
    assert st.delta == pytest.approx(0.25)


def test_weighted_moment_examples():
    t2 = ConvexWeight.power(2)
    assert weighted_moment(EXP, t2) == pytest.approx(2.0, rel=1e-9)
    assert weighted_moment(Indicator(1, 1), t2) == pytest.approx(1 / 3, rel=1e-12)
    assert weighted_moment(RAMP, t2) == pytest.approx(1 / 12, rel=1e-12)


def test_weighted_moment_cosh_with_damping():
    mu = WeightedMeasure(0.0, 1.0)
    f = TruncatedExponential(1.0, 0.5, math.inf)
    # int cosh(t) e^{-1.5 t} dt = 0.5 (1/0.5 + 1/2.5)
    assert weighted_moment(f, ConvexWeight.cosh(1.0), mu) == pytest.approx(1.2, rel=1e-9)


@pytest.mark.parametrize("mu", [LEBESGUE, WeightedMeasure(0.3, 1.0), WeightedMeasure(0.5, 0.0)])
def test_mass_consistency(mu):
    for seed in range(20):
        f = random_logconcave(seed, 5)
        h = 0.3 * f.support_end
        st = stats(f, mu, h)
        tail = mass(f, mu, (h, math.inf))
        assert st.u + tail == pytest.approx(st.V, rel=1e-9)


CLOSED_FORM = [
    (Indicator(2.0, 1.5), 3.0),
    (TruncatedExponential(1.5, 2.0, 0.8), 1.5 * (1 - math.exp(-1.6)) / 2.0),
    (PlateauExponential(1.0, 2.0, 0.5), 2.0 + 1 / 0.5),
    (PlateauPower(2.0, 0.5, 1.5, 0.5), 2.0 * 0.5 + 2.0 * 1.0 / 3.0),
    (HalfGaussian(1.0, 2.0), 2.0 * math.sqrt(math.pi / 2)),
    (BallSection(1.0, 1.0, 0.5), math.pi / 4),
]


@pytest.mark.parametrize("f,expected", CLOSED_FORM)
def test_closed_form_mass(f, expected):
    assert f.analytic_mass() == pytest.approx(expected, rel=1e-10)
    assert mass(f) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("f", [c[0] for c in CLOSED_FORM])
def test_closed_form_weighted_mass(f):
    mu = WeightedMeasure(0.3, 1.0)
    end = f.support_end
    ref, _ = sci_integrate.quad(lambda t: f(t) * t ** -0.3 * math.exp(-t), 0, min(end, 60.0),
                                points=[x for x in f.breakpoints() if 0 < x < 60], limit=400,
                                epsabs=1e-14, epsrel=1e-12)
    assert mass(f, mu) == pytest.approx(ref, rel=1e-9)
    ana = f.analytic_mass(mu)
    if ana is not None:
        assert ana == pytest.approx(ref, rel=1e-9)


def test_generator_soundness():
    for seed in range(10_000):
        k = 2 + seed % 7
        assert is_valid(random_logconcave(seed, k)), seed


def test_sconcave_generator_soundness():
    for seed in range(3000):
        s = (0.5, 1.0, 2.0)[seed % 3]
        f = random_sconcave(seed, s, 2 + seed % 7)
        assert is_valid(f), seed
        assert is_valid(f, s=s)


def test_generator_examples():
    f = random_logconcave(1, 2)
    assert f.knots.size == 2 and f.slopes.size == 1
    assert is_valid(random_logconcave(7, 8))
    for seed in range(50):
        f = random_logconcave(seed, 6)
        grid = np.linspace(0, f.support_end, 400)
        assert f(0.0) == pytest.approx(math.exp(f.phi[0]))
        assert np.max(f(grid)) == f(0.0)
    ramp = random_sconcave(0, 1.0, 2)
    assert ramp.g.size == 2
    f = random_sconcave(3, 0.5, 6)
    grid = np.linspace(0, f.support_end, 2001)
    v = f(grid)
    assert np.all(np.diff(v) <= 1e-12)
    assert np.all(np.diff(v ** 0.5, 2) <= 1e-9)


def test_generator_deterministic():
    a, b = random_logconcave(11, 6), random_logconcave(11, 6)
    assert a == b and a.to_json() == b.to_json()


def test_validity():
    assert is_valid(Indicator(1, 2))
    assert is_valid(PlateauExponential(1, 1, 0.0))
    assert is_valid(PlateauExponential(1, 1, 3.0))
    assert is_valid(HalfGaussian(1, 1))
    assert is_valid(BallSection(1, 1, 1.5), s=1 / 3)
    bad = LogConcaveSampled([0, 1, 2], [0, 0.5, -1])
    rep = is_valid(bad)
    assert not rep and rep.interval == (0.0, 1.0)
    bent = LogConcaveSampled([0, 1, 2], [0, -2, -2.5])
    assert not is_valid(bent)
    assert not is_valid(SConcaveSampled(1.0, [0, 1, 2], [1.0, 0.5, 0.4]))


def test_sconcave_not_log_concave_control():
    # (1 - t)^4 is 1/4-concave but not 1-concave
    f = PlateauPower(1.0, 0.0, 1.0, 0.25)
    assert is_valid(f, s=0.25)
    assert not is_valid(f, s=1.0)


@pytest.mark.parametrize("k", [0.5, 3.0, 17.0])
def test_scaling_covariance(k):
    t2 = ConvexWeight.power(2)
    mu = WeightedMeasure(0.3, 1.0)
    for f in (random_logconcave(5, 6), random_sconcave(5, 1.0, 5), PlateauExponential(1, 1, 2)):
        g = f.scaled(k)
        a, b = stats(f, mu, 0.4), stats(g, mu, 0.4)
        assert b.u == pytest.approx(k * a.u, rel=1e-12)
        assert b.V == pytest.approx(k * a.V, rel=1e-12)
        assert weighted_moment(g, t2, mu) == pytest.approx(k * weighted_moment(f, t2, mu),
                                                           rel=1e-12)


def test_json_round_trip():
    for f in (Indicator(1, 2), PlateauExponential(1, 0, 1), PlateauPower(1, 0.2, 1, 0.5),
              TruncatedExponential(1, 1, math.inf), random_logconcave(3, 4),
              random_sconcave(3, 2.0, 4)):
        assert profile_from_json(f.to_json()) == f
    assert profile_from_dict({"kind": "Indicator", "params": {"c": 1, "d": 2}}) == Indicator(1, 2)


def test_json_errors():
    with pytest.raises(DomainError):
        profile_from_json("{not json")
    with pytest.raises(DomainError):
        profile_from_dict({"kind": "Nope"})
    with pytest.raises(DomainError):
        profile_from_dict({"kind": "Indicator", "c": 1})


def test_construction_errors():
    with pytest.raises(DomainError):
        Indicator(-1, 1)
    with pytest.raises(DomainError):
        PlateauExponential(1, 1, -1)
    with pytest.raises(DomainError):
        LogConcaveSampled([0, 1], [0])


def test_convex_weight():
    N = ConvexWeight.power(3)
    assert N(2.0) == 8.0 and N.derivative(2.0) == 12.0
    C = ConvexWeight.cosh(2.0)
    assert C(1.0) == pytest.approx(math.cosh(2.0))
    assert C.damped(50.0, 3.0) == pytest.approx(0.5 * math.exp(-50.0), rel=1e-12)
    A = ConvexWeight.antiderivative(lambda t: t)
    assert A(2.0) == pytest.approx(2.0, rel=1e-9)
    assert ConvexWeight.parse("t^2") == ConvexWeight.power(2)
    assert ConvexWeight.parse("cosh") == ConvexWeight.cosh(1.0)
    with pytest.raises(DomainError):
        ConvexWeight.power(0.5)

"""Bound formulas for decreasing log-concave and s-concave profiles, and checkers.

Bound functions take the scalars ``(h, u, V)`` (numpy arrays work too) and
return the bound on the relevant functional.  Checkers pair a bound with the
quadrature value for a concrete profile and return a :class:`BoundReport`.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .measures import (
    DEFAULT_QUADRATURE,
    LEBESGUE,
    DomainError,
    WeightedMeasure,
    cdf_Phi,
    integrate,
    inverse_cdf_Phi,
)
from .profiles import ConvexWeight, DecreasingProfile, mass, stats, weighted_moment

__all__ = [
    "BK_THRESHOLD",
    "BoundReport",
    "ENTROPY_THRESHOLD",
    "NotApplicableError",
    "REL_TOL",
    "ThetaCertificate",
    "UPPER_LC_THRESHOLD",
    "WEIGHTED_THRESHOLD",
    "bk_lower",
    "check_bk",
    "check_hensley",
    "check_power",
    "check_upper_lc",
    "check_upper_sc",
    "check_weighted",
    "entropy_upper_check",
    "hensley_lower",
    "hensley_upper",
    "inverse_k",
    "make_report",
    "pnorm_inner",
    "pnorm_threshold",
    "pnorm_threshold_certificate",
    "pnorm_upper_check",
    "power_lower",
    "sconcave_threshold",
    "upper_logconcave",
    "upper_sconcave",
    "weighted_classical",
    "weighted_lower",
]

BK_THRESHOLD = 0.75
UPPER_LC_THRESHOLD = 1.0 - math.exp(-math.sqrt(3.0))
WEIGHTED_THRESHOLD = 0.5
ENTROPY_THRESHOLD = 0.5
REL_TOL = 1e-8


class NotApplicableError(ValueError):
    """The ratio u/V exceeds the admissible threshold of a bound."""


@dataclass(frozen=True)
class BoundReport:
    theorem: str
    lhs: float
    rhs: float
    ratio: float
    threshold: float
    applicable: bool
    satisfied: bool
    slack: float

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def make_report(theorem, lhs, rhs, ratio, threshold, direction, tol=REL_TOL):
    """Assemble a report; ``direction`` is ``"lower"`` (lhs >= rhs) or ``"upper"``."""
    lhs, rhs = float(lhs), float(rhs)
    slack = lhs - rhs if direction == "lower" else rhs - lhs
    scale = max(abs(lhs), abs(rhs))
    if math.isnan(slack):
        satisfied = False
    elif math.isinf(lhs) or math.isinf(rhs):
        satisfied = slack > 0
    else:
        satisfied = slack >= -tol * scale
    applicable = bool(ratio <= threshold * (1 + 1e-12))
    return BoundReport(theorem, lhs, rhs, float(ratio), float(threshold), applicable,
                       bool(satisfied), float(slack))


def _ratio(h, u, V):
    h, u, V = (np.asarray(x, dtype=float) for x in (h, u, V))
    if np.any(h <= 0) or np.any(u <= 0) or np.any(V < u):
        raise DomainError("need h > 0 and 0 < u <= V")
    return h, u, V, u / V


def _gate(ratio, threshold, name, strict):
    if strict and np.any(ratio > threshold * (1 + 1e-12)):
        raise NotApplicableError(f"{name}: u/V = {np.max(ratio):.6g} exceeds {threshold:.6g}")


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def hensley_lower(f0, V):
    """``V^3 / (3 f0^2)``: lower bound on ``int t^2 f`` from the value at 0."""
    f0, V = np.asarray(f0, dtype=float), np.asarray(V, dtype=float)
    if np.any(f0 <= 0) or np.any(V <= 0):
        raise DomainError("need f0 > 0 and V > 0")
    return _out(V ** 3 / (3.0 * f0 ** 2))


def hensley_upper(f0, V):
    """``2 V^3 / f0^2``: classical upper bound on ``int t^2 f``."""
    f0, V = np.asarray(f0, dtype=float), np.asarray(V, dtype=float)
    return _out(2.0 * V ** 3 / f0 ** 2)


def bk_lower(h, u, V, strict=True):
    """``h^2 V^3 / (3 u^2)``, valid for ``u <= 3V/4``."""
    h, u, V, r = _ratio(h, u, V)
    _gate(r, BK_THRESHOLD, "bk_lower", strict)
    return _out(h ** 2 * V ** 3 / (3.0 * u ** 2))


def upper_logconcave(h, u, V, strict=True):
    """``2 h^2 V / log(1 - u/V)^2``, valid for ``u/V <= 1 - e^{-sqrt 3}``."""
    h, u, V, r = _ratio(h, u, V)
    _gate(r, UPPER_LC_THRESHOLD, "upper_logconcave", strict)
    with np.errstate(divide="ignore"):
        return _out(2.0 * h ** 2 * V / np.log1p(-r) ** 2)


def sconcave_threshold(s):
    """``delta_s = 1 - ((s+1)/(3s+1))^(1/s + 1)``."""
    if not s > 0:
        raise DomainError("s must be positive")
    if s == 1.0:
        return 0.75
    e = 1.0 / s + 1.0
    return -math.expm1(e * math.log((s + 1.0) / (3.0 * s + 1.0)))


def upper_sconcave(h, u, V, s, strict=True):
    """``2 h^2 V / [(1/s+2)(1/s+3)(1 - (1-u/V)^(s/(s+1)))^2]``, valid for ``u/V <= delta_s``."""
    if not s > 0:
        raise DomainError("s must be positive")
    h, u, V, r = _ratio(h, u, V)
    _gate(r, sconcave_threshold(s), "upper_sconcave", strict)
    m = 1.0 / s
    with np.errstate(divide="ignore"):
        gap = -np.expm1(s / (s + 1.0) * np.log1p(-r))
    return _out(2.0 * h ** 2 * V / ((m + 2.0) * (m + 3.0) * gap ** 2))


def power_lower(q, h, u, V, strict=True):
    """``h^q V^(q+1) / ((q+1) u^q)`` for ``q >= 1``, valid for ``u <= V/2``."""
    if not q >= 1:
        raise DomainError("power_lower needs q >= 1")
    h, u, V, r = _ratio(h, u, V)
    _gate(r, WEIGHTED_THRESHOLD, "power_lower", strict)
    return _out(h ** q * V ** (q + 1.0) / ((q + 1.0) * u ** q))


def weighted_lower(N: ConvexWeight, mu: WeightedMeasure, h, u, V, strict=True,
                   cfg=DEFAULT_QUADRATURE):
    """``(u/Phi(h)) int_0^{Phi^{-1}((V/u) Phi(h))} N dmu``, valid for ``u <= V/2``."""
    h, u, V, r = _ratio(h, u, V)
    _gate(r, WEIGHTED_THRESHOLD, "weighted_lower", strict)
    ph = np.asarray(cdf_Phi(mu, h))
    target = ph / r
    if mu.lam > 0:
        total = mu.total_mass
        if np.any(target > total * (1 + 1e-9)):
            raise DomainError("(V/u) Phi(h) exceeds the total mass of the measure")
        # for decreasing f the target stays below the total; ties are rounding
        target = np.minimum(target, total * (1 - 1e-15))
    top = np.asarray(inverse_cdf_Phi(mu, target))
    return _out(u / ph * np.asarray(N.integral(top, mu, cfg)))


def weighted_classical(N: ConvexWeight, mu: WeightedMeasure, f0, V, cfg=DEFAULT_QUADRATURE):
    """``f0 int_0^{Phi^{-1}(V/f0)} N dmu``: the small-head limit of :func:`weighted_lower`."""
    top = np.asarray(inverse_cdf_Phi(mu, np.asarray(V, dtype=float) / f0))
    return _out(f0 * np.asarray(N.integral(top, mu, cfg)))


# --------------------------------------------------------------------------
# the p-norm threshold


def _k_minus_one(y):
    """``k(y) - 1`` with ``k(y) = -log(1-y)/y``, accurate for small ``y``."""
    y = np.asarray(y, dtype=float)
    small = y < 1e-3
    ys = np.where(small, y, 0.5)
    series = ys / 2 + ys ** 2 / 3 + ys ** 3 / 4 + ys ** 4 / 5 + ys ** 5 / 6
    yl = np.where(small, 0.5, y)
    with np.errstate(divide="ignore"):
        direct = -np.log1p(-yl) / yl - 1.0
    return np.where(small, series, direct)


def inverse_k(w_minus_one):
    """Solve ``k(y) = 1 + w_minus_one`` for ``y`` in ``(0, 1)`` by bisection."""
    target = np.asarray(w_minus_one, dtype=float)
    lo = np.zeros(target.shape)
    hi = np.ones(target.shape)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        big = _k_minus_one(mid) > target
        hi = np.where(big, mid, hi)
        lo = np.where(big, lo, mid)
        if np.all(hi - lo <= 4 * np.finfo(float).eps * np.maximum(hi, 1e-300)):
            break
    return 0.5 * (lo + hi)


def pnorm_inner(x, p):
    """``(1/x) k^{-1}([p x / (1 - (1-x)^p)]^(1/(p-1)))`` on ``(0, 1]``."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        denom = np.where(x >= 1.0, 1.0, -np.expm1(p * np.log1p(-np.minimum(x, 1.0))))
    log_w = np.log(p * x / denom) / (p - 1.0)
    return inverse_k(np.expm1(log_w)) / x


@dataclass(frozen=True)
class ThetaCertificate:
    p: float
    value: float
    argmin: float
    grid_min: float
    grid_argmin: float
    grid_points: int
    limit_at_zero: float

    def to_dict(self):
        return asdict(self)


def pnorm_threshold_certificate(p, grid_points=1024):
    """Infimum defining ``theta_p``: log-spaced grid search then golden-section refinement."""
    if not p > 1:
        raise DomainError("theta_p needs p > 1")
    x = np.geomspace(1e-6, 1.0, grid_points)
    vals = pnorm_inner(x, p)
    i = int(np.argmin(vals))
    lo, hi = x[max(i - 1, 0)], x[min(i + 1, grid_points - 1)]
    g = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = hi - g * (hi - lo), lo + g * (hi - lo)
    fc, fd = float(pnorm_inner(c, p)), float(pnorm_inner(d, p))
    for _ in range(200):
        if hi - lo <= 1e-14 * hi:
            break
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - g * (hi - lo)
            fc = float(pnorm_inner(c, p))
        else:
            lo, c, fc = c, d, fd
            d = lo + g * (hi - lo)
            fd = float(pnorm_inner(d, p))
    cands = [(float(vals[i]), float(x[i])), (fc, c), (fd, d)]
    best, arg = min(cands)
    limit = float(pnorm_inner(1e-7, p))
    return ThetaCertificate(float(p), best, float(arg), float(vals[i]), float(x[i]),
                            grid_points, limit)


def pnorm_threshold(p):
    """``theta_p``, the admissible ratio of the p-norm bound."""
    return pnorm_threshold_certificate(p).value


# --------------------------------------------------------------------------
# checkers


def _f0_V(f: DecreasingProfile, cfg):
    return f.f0, mass(f, LEBESGUE, (0.0, math.inf), cfg)


def check_hensley(f: DecreasingProfile, cfg=DEFAULT_QUADRATURE) -> BoundReport:
    f0, V = _f0_V(f, cfg)
    lhs = weighted_moment(f, ConvexWeight.power(2), LEBESGUE, cfg)
    return make_report("hensley", lhs, hensley_lower(f0, V), 0.0, 1.0, "lower")


def check_bk(f, h, cfg=DEFAULT_QUADRATURE) -> BoundReport:
    st = stats(f, LEBESGUE, h, cfg)
    lhs = weighted_moment(f, ConvexWeight.power(2), LEBESGUE, cfg)
    rhs = bk_lower(h, st.u, st.V, strict=False)
    return make_report("bk", lhs, rhs, st.ratio, BK_THRESHOLD, "lower")


def check_upper_lc(f, h, cfg=DEFAULT_QUADRATURE) -> BoundReport:
    st = stats(f, LEBESGUE, h, cfg)
    lhs = weighted_moment(f, ConvexWeight.power(2), LEBESGUE, cfg)
    rhs = upper_logconcave(h, st.u, st.V, strict=False)
    return make_report("upper-lc", lhs, rhs, st.ratio, UPPER_LC_THRESHOLD, "upper")


def check_upper_sc(f, h, s, cfg=DEFAULT_QUADRATURE) -> BoundReport:
    st = stats(f, LEBESGUE, h, cfg)
    lhs = weighted_moment(f, ConvexWeight.power(2), LEBESGUE, cfg)
    rhs = upper_sconcave(h, st.u, st.V, s, strict=False)
    return make_report("upper-sc", lhs, rhs, st.ratio, sconcave_threshold(s), "upper")


def check_weighted(f, N: ConvexWeight, mu: WeightedMeasure, h, cfg=DEFAULT_QUADRATURE):
    st = stats(f, mu, h, cfg)
    lhs = weighted_moment(f, N, mu, cfg)
    rhs = weighted_lower(N, mu, h, st.u, st.V, strict=False, cfg=cfg)
    return make_report("weighted", lhs, rhs, st.ratio, WEIGHTED_THRESHOLD, "lower")


def check_power(f, q, h, cfg=DEFAULT_QUADRATURE) -> BoundReport:
    st = stats(f, LEBESGUE, h, cfg)
    lhs = weighted_moment(f, ConvexWeight.power(q), LEBESGUE, cfg)
    rhs = power_lower(q, h, st.u, st.V, strict=False)
    return make_report("power", lhs, rhs, st.ratio, WEIGHTED_THRESHOLD, "lower")


def pnorm_upper_check(f, p, h, cfg=DEFAULT_QUADRATURE) -> BoundReport:
    """``int f^p <= (u/h)^(p-1) V`` for ``u/V <= theta_p``."""
    if not p > 1:
        raise DomainError("p-norm bound needs p > 1")
    st = stats(f, LEBESGUE, h, cfg)
    bps = [x for x in f.breakpoints() if math.isfinite(x)]
    lhs = integrate(lambda t: f(t) ** p, LEBESGUE, (0.0, f.support_end), cfg, bps)
    rhs = (st.u / h) ** (p - 1.0) * st.V
    return make_report("pnorm", lhs, rhs, st.ratio, pnorm_threshold(p), "upper")


def _xlogx(v):
    v = np.asarray(v, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(v > 0, v * np.log(np.where(v > 0, v, 1.0)), 0.0)


def entropy_upper_check(f, h, threshold=ENTROPY_THRESHOLD, cfg=DEFAULT_QUADRATURE):
    """``int f log f <= log(u/h) V``; ``threshold`` may be raised for experiments."""
    st = stats(f, LEBESGUE, h, cfg)
    bps = [x for x in f.breakpoints() if math.isfinite(x)]
    lhs = integrate(lambda t: _xlogx(f(t)), LEBESGUE, (0.0, f.support_end), cfg, bps)
    rhs = math.log(st.u / h) * st.V
    return make_report("entropy", lhs, rhs, st.ratio, threshold, "upper")

"""Seeded property suites over random log-concave and s-concave profiles.

Everything is batched: one piece table holds every trial, and all masses
and moments are computed by batched quadrature.  Trial ``i`` draws its
profile and head ratio from ``default_rng([seed, i])``, so results do not
depend on the batch size or evaluation order.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .bounds import (
    BK_THRESHOLD,
    ENTROPY_THRESHOLD,
    REL_TOL,
    UPPER_LC_THRESHOLD,
    WEIGHTED_THRESHOLD,
    bk_lower,
    pnorm_threshold,
    power_lower,
    sconcave_threshold,
    upper_logconcave,
    upper_sconcave,
    weighted_lower,
)
from .extremal import reduce_lower_batch, reduce_upper_logconcave_batch, reduce_upper_sconcave_batch
from .measures import (
    DEFAULT_QUADRATURE,
    LEBESGUE,
    DomainError,
    QuadratureConfig,
    WeightedMeasure,
    integrate_many,
)
from .profiles import (
    ConvexWeight,
    PieceTable,
    batch_integrate,
    batch_moment,
    random_logconcave,
    random_sconcave,
)

__all__ = [
    "SuiteResult",
    "Tally",
    "draw_logconcave",
    "draw_sconcave",
    "heads_for_ratio",
    "logconcave_suite",
    "reduction_suite",
    "sconcave_suite",
]

WEIGHTED_MEASURES = (WeightedMeasure(0.0, 0.0), WeightedMeasure(0.5, 0.0),
                     WeightedMeasure(0.0, 1.0), WeightedMeasure(0.5, 1.0))
WEIGHTED_NS = (ConvexWeight.power(2), ConvexWeight.power(3), ConvexWeight.cosh(1.0))
POWERS = (1.0, 2.0, 3.0)
S_VALUES = (0.5, 1.0, 2.0)
REDUCTION_MEASURES = (LEBESGUE, WeightedMeasure(0.3, 1.0))
REDUCTION_NS = (ConvexWeight.power(2), ConvexWeight.cosh(1.0))

# tiny masses deep in a tail need relative accuracy only
_CFG = QuadratureConfig(rel_tol=1e-11, abs_tol=1e-300)


@dataclass
class Tally:
    """Counts for one inequality; ``worst_slack`` is the smallest relative slack seen."""

    theorem: str
    checked: int = 0
    skipped: int = 0
    violations: int = 0
    worst_slack: float = math.inf
    worst_trial: int = -1

    def add(self, lhs, rhs, ratio, threshold, direction, trials, tol=REL_TOL):
        lhs, rhs, ratio = (np.asarray(v, dtype=float) for v in (lhs, rhs, ratio))
        trials = np.asarray(trials)
        ok = ratio <= threshold * (1 + 1e-12)
        self.skipped += int(np.count_nonzero(~ok))
        if not ok.any():
            return
        lhs, rhs, trials = lhs[ok], rhs[ok], trials[ok]
        slack = lhs - rhs if direction == "lower" else rhs - lhs
        with np.errstate(invalid="ignore"):
            scale = np.maximum(np.abs(lhs), np.abs(rhs))
            inf = np.isinf(scale)
            rel = np.where(inf, np.where(slack > 0, 1.0, -np.inf), slack / np.where(inf, 1.0, scale))
        rel = np.where(np.isnan(rel), -np.inf, rel)
        self.checked += int(rel.size)
        self.violations += int(np.count_nonzero(rel < -tol))
        i = int(np.argmin(rel))
        if rel[i] < self.worst_slack:
            self.worst_slack = float(rel[i])
            self.worst_trial = int(trials[i])

    def add_error(self, err, trials, tol=REL_TOL):
        """Record relative errors that must stay below ``tol``; slack is ``-err``."""
        err = np.where(np.isnan(err), np.inf, np.abs(np.asarray(err, dtype=float)))
        self.checked += int(err.size)
        self.violations += int(np.count_nonzero(err > tol))
        i = int(np.argmax(err))
        if -err[i] < self.worst_slack:
            self.worst_slack = float(-err[i])
            self.worst_trial = int(np.asarray(trials)[i])

    def to_dict(self):
        return {"theorem": self.theorem, "checked": self.checked, "skipped": self.skipped,
                "violations": self.violations, "worst_relative_slack": self.worst_slack,
                "worst_trial": self.worst_trial}


@dataclass
class SuiteResult:
    family: str
    trials: int
    seed: int
    tallies: dict = field(default_factory=dict)
    seconds: float = 0.0

    def tally(self, name):
        if name not in self.tallies:
            self.tallies[name] = Tally(name)
        return self.tallies[name]

    @property
    def violations(self):
        return sum(t.violations for t in self.tallies.values())

    @property
    def passed(self):
        return self.violations == 0

    def to_dict(self):
        return {"family": self.family, "trials": self.trials, "seed": self.seed,
                "passed": self.passed, "violations": self.violations,
                "theorems": [t.to_dict() for t in self.tallies.values()]}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


# --------------------------------------------------------------------------
# drawing


def _trial_rng(seed, i):
    return np.random.default_rng([int(seed), int(i)])


def _draw_shape(rng):
    knots = int(rng.integers(2, 9))
    length = float(np.exp(rng.normal(0.0, 0.7)))
    slope = float(np.exp(rng.normal(0.0, 0.7)))
    return knots, length, slope


def draw_logconcave(trials, seed):
    """Profiles and two head ratios per trial: one in (0.01, 0.5), one in (0.5, 0.82)."""
    out, rho, rho2 = [], np.empty(trials), np.empty(trials)
    for i in range(trials):
        rng = _trial_rng(seed, i)
        knots, length, slope = _draw_shape(rng)
        out.append(random_logconcave(None, knots, length, slope, rng=rng))
        rho[i] = rng.uniform(0.01, 0.5)
        rho2[i] = rng.uniform(0.5, 0.82)
    return out, rho, rho2


def draw_sconcave(trials, seed, s_values=S_VALUES):
    """Trial ``i`` uses ``s = s_values[i % len(s_values)]``; second ratio is in (0.5, delta_s)."""
    out, svec, rho, rho2 = [], np.empty(trials), np.empty(trials), np.empty(trials)
    for i in range(trials):
        s = float(s_values[i % len(s_values)])
        rng = _trial_rng(seed, i)
        knots, length, slope = _draw_shape(rng)
        out.append(random_sconcave(None, s, knots, length, slope, rng=rng))
        svec[i] = s
        rho[i] = rng.uniform(0.01, 0.5)
        rho2[i] = rng.uniform(0.5, sconcave_threshold(s))
    return out, svec, rho, rho2


def heads_for_ratio(table: PieceTable, mu: WeightedMeasure, rho, cfg=_CFG, iters=60):
    """Head widths ``h`` with ``u/V = rho`` under ``mu``.

    The crossing piece is located from cumulative piece masses, then ``h`` is
    found by bisection on the quadrature mass of that piece.
    """
    pm = batch_integrate(table, None, mu, cfg=cfg, per_piece=True)
    owner = table.owner
    total = np.bincount(owner, weights=pm, minlength=table.n_profiles)
    cum = np.cumsum(pm)
    start = np.concatenate([[0.0], cum])[np.searchsorted(owner, np.arange(table.n_profiles))]
    before = cum - pm - start[owner]
    target = (np.asarray(rho) * total)[owner]
    hit = (before < target) & (before + pm >= target)
    # first crossing piece for each profile
    idx = np.full(table.n_profiles, -1)
    pos = np.nonzero(hit)[0]
    idx[owner[pos][::-1]] = pos[::-1]
    need = target[idx] - before[idx]
    lo, hi = table.a[idx].copy(), table.b[idx].copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        got = integrate_many(lambda t, k: table.value(t, idx[k]), table.a[idx], mid, mu, cfg)
        low = got < need
        lo = np.where(low, mid, lo)
        hi = np.where(low, hi, mid)
    return 0.5 * (lo + hi)


def _pieces_integral(table, g, mu, lower=None, upper=None, cfg=_CFG):
    """``int g(t, f_k(t)) dmu`` per profile, for integrands that need the profile value."""
    a, b = table.a.copy(), table.b.copy()
    if lower is not None:
        a = np.maximum(a, np.asarray(lower, dtype=float)[table.owner])
    if upper is not None:
        b = np.minimum(b, np.asarray(upper, dtype=float)[table.owner])
    b = np.maximum(a, b)
    idx = np.arange(a.size)
    vals = integrate_many(lambda t, k: g(t, table.value(t, idx[k])), a, b, mu, cfg)
    return np.bincount(table.owner, weights=vals, minlength=table.n_profiles)


def _xlogx(v):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(v > 0, v * np.log(np.where(v > 0, v, 1.0)), 0.0)


def _head_tail(table, mu, h, cfg=_CFG):
    u = batch_integrate(table, None, mu, upper=h, cfg=cfg)
    T = batch_integrate(table, None, mu, lower=h, cfg=cfg)
    return u, u + T


def _total(table, mu, cfg=_CFG):
    return batch_integrate(table, None, mu, cfg=cfg)


def _moment(table, N, mu=LEBESGUE, cfg=_CFG, divergent="inf"):
    return batch_moment(table, N, mu, cfg, divergent)


# --------------------------------------------------------------------------
# suites


def logconcave_suite(trials=10_000, seed=0, tol=REL_TOL, cfg: QuadratureConfig = _CFG):
    """bk, upper-lc, weighted (4 measures x 3 weights), power (q = 1, 2, 3), pnorm (p = 2), entropy."""
    if trials < 1:
        raise DomainError("trials must be at least 1")
    t0 = time.perf_counter()
    res = SuiteResult("logconcave", trials, seed)
    profiles, rho, rho2 = draw_logconcave(trials, seed)
    table = PieceTable.concat([f.pieces() for f in profiles])
    ids = np.arange(trials)

    h = heads_for_ratio(table, LEBESGUE, rho, cfg)
    h2 = heads_for_ratio(table, LEBESGUE, rho2, cfg)
    V = _total(table, LEBESGUE, cfg)
    u = np.minimum(_head_tail(table, LEBESGUE, h, cfg)[0], V)
    u2 = np.minimum(_head_tail(table, LEBESGUE, h2, cfg)[0], V)
    r, r2 = u / V, u2 / V
    m = {q: _moment(table, ConvexWeight.power(q), cfg=cfg) for q in POWERS}

    for hh, uu, rr in ((h, u, r), (h2, u2, r2)):
        res.tally("bk_lower").add(m[2.0], bk_lower(hh, uu, V, strict=False), rr,
                                  BK_THRESHOLD, "lower", ids, tol)
        res.tally("upper_logconcave").add(m[2.0], upper_logconcave(hh, uu, V, strict=False), rr,
                                          UPPER_LC_THRESHOLD, "upper", ids, tol)
    for q in POWERS:
        res.tally(f"power_lower(q={q:g})").add(m[q], power_lower(q, h, u, V, strict=False), r,
                                              WEIGHTED_THRESHOLD, "lower", ids, tol)

    sq = _pieces_integral(table, lambda t, v: v * v, LEBESGUE, cfg=cfg)
    theta2 = pnorm_threshold(2.0)
    for hh, uu, rr in ((h, u, r), (h2, u2, r2)):
        res.tally("pnorm_upper(p=2)").add(sq, uu / hh * V, rr, theta2, "upper", ids, tol)
    ent = _pieces_integral(table, lambda t, v: _xlogx(v), LEBESGUE, cfg=cfg)
    res.tally("entropy_upper").add(ent, np.log(u / h) * V, r, ENTROPY_THRESHOLD, "upper", ids, tol)

    for mu in WEIGHTED_MEASURES:
        hm = h if mu.is_lebesgue else heads_for_ratio(table, mu, rho, cfg)
        if mu.is_lebesgue:
            um, Vm = u, V
        else:
            Vm = _total(table, mu, cfg)
            um = np.minimum(_head_tail(table, mu, hm, cfg)[0], Vm)
        for N in WEIGHTED_NS:
            lhs = _moment(table, N, mu, cfg)
            rhs = np.full(trials, np.nan)
            ok = um / Vm <= WEIGHTED_THRESHOLD
            if ok.any():
                rhs[ok] = weighted_lower(N, mu, hm[ok], um[ok], Vm[ok], strict=False, cfg=cfg)
            name = f"weighted_lower(N={N.name},p={mu.p:g},lambda={mu.lam:g})"
            res.tally(name).add(lhs, rhs, um / Vm, WEIGHTED_THRESHOLD, "lower", ids, tol)

    res.seconds = time.perf_counter() - t0
    return res


def sconcave_suite(trials=10_000, seed=0, s_values=S_VALUES, tol=REL_TOL,
                   cfg: QuadratureConfig = _CFG):
    """upper-sc, bk and power (q = 1, 2, 3) on random s-concave profiles."""
    if trials < 1:
        raise DomainError("trials must be at least 1")
    if any(not s > 0 for s in s_values):
        raise DomainError("s must be positive")
    t0 = time.perf_counter()
    res = SuiteResult("sconcave", trials, seed)
    profiles, svec, rho, rho2 = draw_sconcave(trials, seed, s_values)
    table = PieceTable.concat([f.pieces() for f in profiles])
    ids = np.arange(trials)
    h = heads_for_ratio(table, LEBESGUE, rho, cfg)
    h2 = heads_for_ratio(table, LEBESGUE, rho2, cfg)
    V = _total(table, LEBESGUE, cfg)
    u = np.minimum(_head_tail(table, LEBESGUE, h, cfg)[0], V)
    u2 = np.minimum(_head_tail(table, LEBESGUE, h2, cfg)[0], V)
    m = {q: _moment(table, ConvexWeight.power(q), cfg=cfg) for q in POWERS}
    for hh, uu in ((h, u), (h2, u2)):
        rr = uu / V
        res.tally("bk_lower").add(m[2.0], bk_lower(hh, uu, V, strict=False), rr,
                                  BK_THRESHOLD, "lower", ids, tol)
        for s in s_values:
            sel = svec == s
            res.tally(f"upper_sconcave(s={s:g})").add(
                m[2.0][sel], upper_sconcave(hh[sel], uu[sel], V[sel], s, strict=False), rr[sel],
                sconcave_threshold(s), "upper", ids[sel], tol)
    for q in POWERS:
        res.tally(f"power_lower(q={q:g})").add(m[q], power_lower(q, h, u, V, strict=False), u / V,
                                              WEIGHTED_THRESHOLD, "lower", ids, tol)
    res.seconds = time.perf_counter() - t0
    return res


def _reduction_check(res, name, profiles, reduced, mu, direction, ids, tol, cfg):
    orig = PieceTable.concat([f.pieces() for f in profiles])
    red = PieceTable.concat([g.pieces() for g in reduced])
    for N in REDUCTION_NS:
        a = _moment(orig, N, mu, cfg)
        b = _moment(red, N, mu, cfg)
        # an upper reduction must not decrease the moment, a lower one must not increase it
        res.tally(f"{name}(N={N.name},p={mu.p:g},lambda={mu.lam:g})").add(
            b, a, np.zeros(a.size), 1.0, "lower" if direction == "upper" else "upper", ids, tol)
    return orig, red


def _mass_roundtrip(res, name, orig, red, mu, h, ids, tol, cfg):
    u0, V0 = _head_tail(orig, mu, h, cfg)
    u1, V1 = _head_tail(red, mu, h, cfg)
    t = res.tally(f"{name}:mass(p={mu.p:g},lambda={mu.lam:g})")
    t.add_error((u1 - u0) / u0, ids, tol)
    t.add_error((V1 - V0) / V0, ids, tol)


def reduction_suite(trials=10_000, seed=0, tol=REL_TOL, measures=REDUCTION_MEASURES,
                    s_values=S_VALUES, cfg: QuadratureConfig = _CFG):
    """Dominance and mass preservation of the three reductions."""
    if trials < 1:
        raise DomainError("trials must be at least 1")
    t0 = time.perf_counter()
    res = SuiteResult("reductions", trials, seed)
    ids = np.arange(trials)
    lc, rho, _ = draw_logconcave(trials, seed)
    sc, svec, srho, _ = draw_sconcave(trials, seed + 1, s_values)
    lc_table = PieceTable.concat([f.pieces() for f in lc])
    sc_table = PieceTable.concat([f.pieces() for f in sc])
    for mu in measures:
        h = heads_for_ratio(lc_table, mu, rho, cfg)
        for name, fn, side in (("reduce_upper_logconcave", reduce_upper_logconcave_batch, "upper"),
                               ("reduce_lower", reduce_lower_batch, "lower")):
            reduced = fn(lc, mu, h, cfg)
            o, r = _reduction_check(res, name, lc, reduced, mu, side, ids, tol, cfg)
            _mass_roundtrip(res, name, o, r, mu, h, ids, tol, cfg)
        hs = heads_for_ratio(sc_table, mu, srho, cfg)
        for s in s_values:
            sel = np.nonzero(svec == s)[0]
            group = [sc[i] for i in sel]
            reduced = reduce_upper_sconcave_batch(group, mu, hs[sel], s, cfg)
            o, r = _reduction_check(res, "reduce_upper_sconcave", group, reduced, mu, "upper",
                                    ids[sel], tol, cfg)
            _mass_roundtrip(res, "reduce_upper_sconcave", o, r, mu, hs[sel], ids[sel], tol, cfg)
    res.seconds = time.perf_counter() - t0
    return res

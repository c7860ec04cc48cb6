"""Reductions to low-parameter extremal families, and the one-parameter objectives.

The reduction constructions are vectorized: a batch of profiles is reduced
at once by bisection on whole arrays of brackets, which keeps the
weighted-measure case (where every mass evaluation is a quadrature) fast.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .bounds import weighted_lower
from .measures import (
    DEFAULT_QUADRATURE,
    LEBESGUE,
    DomainError,
    QuadratureConfig,
    WeightedMeasure,
    cdf_Phi,
    gamma_1mp,
    integrate_many,
    inverse_incomplete_G,
    lower_incomplete_F,
    scaled_upper_incomplete,
)
from .profiles import (
    ConvexWeight,
    DecreasingProfile,
    PieceTable,
    PlateauExponential,
    PlateauPower,
    TruncatedExponential,
    batch_integrate,
)

__all__ = [
    "ReducedFamilyPoint",
    "ReductionError",
    "SweepResult",
    "K_u",
    "K_u_domain",
    "objective_upper_lc",
    "objective_upper_sc",
    "reduce_lower",
    "reduce_lower_batch",
    "reduce_upper_logconcave",
    "reduce_upper_logconcave_batch",
    "reduce_upper_sconcave",
    "reduce_upper_sconcave_batch",
    "sweep",
    "sweep_grid",
]


class ReductionError(RuntimeError):
    """A reduction bracket could not be established (input is not admissible)."""


# --------------------------------------------------------------------------
# objectives


def objective_upper_lc(x, Delta):
    """``(x^3+3x^2+6x+6) / (3(x+1)[x - log(Delta(x+1))]^2)`` (second moment in units of V h^2)."""
    x = np.asarray(x, dtype=float)
    if not 0.0 < Delta < 1.0:
        raise DomainError("Delta must lie in (0, 1)")
    if np.any(x < 0):
        raise DomainError("x must be nonnegative")
    den = x - math.log(Delta) - np.log1p(x)
    if np.any(den <= 0):
        raise DomainError("Delta (x+1) must stay below e^x")
    val = (((x + 3.0) * x + 6.0) * x + 6.0) / (3.0 * (x + 1.0) * den ** 2)
    return float(val) if val.ndim == 0 else val


def objective_upper_sc(x, Delta, s):
    """Second moment of the plateau-power family member at ``x = d lambda`` (units of V h^2)."""
    x = np.asarray(x, dtype=float)
    if not 0.0 < Delta < 1.0:
        raise DomainError("Delta must lie in (0, 1)")
    if not s > 0:
        raise DomainError("s must be positive")
    if np.any(x < 0):
        raise DomainError("x must be nonnegative")
    m = 1.0 / s
    a = m + 1.0
    y = x * a + 1.0
    D = x - np.expm1(s / (s + 1.0) * (math.log(Delta) + np.log(y)))
    if np.any(D <= 0):
        raise DomainError("nonpositive denominator")
    # int_0^1 (1 - t + x)^2 t^m dt through Beta moments of (1 - t)
    inner = (x ** 2 / (m + 1.0) + 2.0 * x / ((m + 1.0) * (m + 2.0))
             + 2.0 / ((m + 1.0) * (m + 2.0) * (m + 3.0)))
    val = (x * a / y) * (x / D) ** 2 / 3.0 + (a / y) * inner / D ** 2
    return float(val) if val.ndim == 0 else val


def K_u_domain(mu: WeightedMeasure, u, V, h):
    """Open interval of the parameter ``x`` of :func:`K_u`."""
    rho = u / V
    lo = float(lower_incomplete_F(mu.p, mu.lam * h)) / rho if mu.lam > 0 else 0.0
    return lo, gamma_1mp(mu.p)


def K_u(N: ConvexWeight, mu: WeightedMeasure, u, V, h, x,
        cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """Value of ``int N g dmu`` along the truncated-exponential family.

    ``x`` parametrizes the members with head mass ``u`` on ``[0, h]`` and total
    mass ``V``.  Computed as ``(V/x) int_0^{G(x)} N(h w / G(u x / V)) w^-p e^-w dw``.
    At the lower end of the domain the value equals the weighted lower bound.
    """
    if not 0 < u <= V / 2:
        raise DomainError("K_u needs 0 < u <= V/2")
    lo, hi = K_u_domain(mu, u, V, h)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa <= lo) or np.any(xa >= hi):
        raise DomainError(f"x must lie in ({lo!r}, {hi!r})")
    p = mu.p
    rho = u / V
    gx = np.asarray(inverse_incomplete_G(p, xa))
    gr = np.asarray(inverse_incomplete_G(p, rho * xa))
    scale = h / gr
    vals = integrate_many(lambda w, k: N(w * scale[k]), np.zeros_like(gx), gx,
                          WeightedMeasure(p, 1.0), cfg)
    out = V / xa * vals
    return float(out[0]) if np.ndim(x) == 0 else out


# --------------------------------------------------------------------------
# sweeps


@dataclass
class SweepResult:
    x: np.ndarray
    value: np.ndarray
    direction: str
    tol: float

    @property
    def argmax(self):
        """First grid point within ``1e-12`` (relative) of the maximum: plateaus are rounding."""
        top = np.max(self.value)
        hit = self.value >= top - 1e-12 * abs(top)
        return float(self.x[int(np.argmax(hit))])

    @property
    def max(self):
        return float(np.max(self.value))

    @property
    def argmin(self):
        return float(self.x[int(np.argmin(self.value))])

    @property
    def min(self):
        return float(np.min(self.value))

    @property
    def diffs(self):
        with np.errstate(invalid="ignore"):
            d = np.diff(self.value)
        return np.where(np.isnan(d), 0.0, d)

    @property
    def monotone(self):
        d = self.diffs
        if self.direction == "nonincreasing":
            return bool(np.all(d <= self.tol))
        return bool(np.all(d >= -self.tol))

    @property
    def worst_difference(self):
        d = self.diffs
        return float(np.max(d) if self.direction == "nonincreasing" else np.min(d))

    def summary(self):
        return {"argmax": self.argmax, "max": self.max, "monotone": self.monotone}

    def to_csv(self, digits=12):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "value"])
        for xi, vi in zip(self.x, self.value):
            w.writerow([f"{xi:.{digits}g}", f"{vi:.{digits}g}"])
        return buf.getvalue()

    def summary_json(self, digits=12):
        s = self.summary()
        return json.dumps({"argmax": float(f"{s['argmax']:.{digits}g}"),
                           "max": float(f"{s['max']:.{digits}g}"),
                           "monotone": s["monotone"]}, sort_keys=True)


def sweep_grid(x_min, x_max, steps):
    """``x_min`` followed by ``steps - 1`` log-spaced points from ``1e-6`` above it to ``x_max``."""
    if steps < 2:
        raise DomainError("a sweep needs at least 2 points")
    if not x_max > x_min:
        raise DomainError("x_max must exceed x_min")
    span = x_max - x_min
    start = min(1e-6, span * 1e-6)
    return np.concatenate([[x_min], x_min + np.geomspace(start, span, steps - 1)])


def sweep(objective, x_range=(0.0, 10.0), steps=4096, direction="nonincreasing",
          tol=1e-9, **params):
    """Tabulate ``objective`` on :func:`sweep_grid` and summarize its monotonicity.

    ``objective`` is ``"upper-lc"`` (params ``Delta``), ``"upper-sc"`` (``Delta``,
    ``s``), ``"K_u"`` (``N``, ``mu``, ``u``, ``V``, ``h``; ``x_range`` defaults to
    the open domain and the lower end is evaluated as its limit) or a callable.
    """
    if objective in ("upper-lc", objective_upper_lc):
        x = sweep_grid(*x_range, steps)
        return SweepResult(x, objective_upper_lc(x, params["Delta"]), direction, tol)
    if objective in ("upper-sc", objective_upper_sc):
        x = sweep_grid(*x_range, steps)
        return SweepResult(x, objective_upper_sc(x, params["Delta"], params["s"]), direction, tol)
    if objective in ("K_u", K_u):
        N, mu, u, V, h = (params[k] for k in ("N", "mu", "u", "V", "h"))
        cfg = params.get("cfg", QuadratureConfig(rel_tol=1e-13, abs_tol=1e-300))
        lo, hi = K_u_domain(mu, u, V, h)
        top = lo + (hi - lo) * (1.0 - 1e-3)
        x = sweep_grid(lo, top, steps)
        vals = np.empty(x.size)
        vals[0] = weighted_lower(N, mu, h, u, V, cfg=cfg)
        vals[1:] = K_u(N, mu, u, V, h, x[1:], cfg)
        return SweepResult(x, vals, "nondecreasing" if direction == "nonincreasing" else direction,
                           tol)
    if callable(objective):
        x = sweep_grid(*x_range, steps)
        return SweepResult(x, np.asarray(objective(x), dtype=float), direction, tol)
    raise DomainError(f"unknown objective {objective!r}")


# --------------------------------------------------------------------------
# vectorized mass helpers


def _exp_mass(pref, z, a, b, p):
    """``pref * int_a^b e^{-z (t - a)} t^-p dt`` elementwise, ``z >= 0``, ``b`` may be inf."""
    pref, z, a, b = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (pref, z, a, b)))
    out = np.zeros(pref.shape)
    zero = z <= 0
    with np.errstate(all="ignore"):
        if p == 0.0:
            span = np.where(np.isinf(b), 1.0, -np.expm1(-z * (b - a)))
            out = np.where(zero, np.where(np.isinf(b), np.inf, b - a), span / np.where(zero, 1.0, z))
            return pref * out
        pos = ~zero
        if zero.any():
            out[zero] = np.where(np.isinf(b[zero]), np.inf,
                                 (b[zero] ** (1 - p) - a[zero] ** (1 - p)) / (1 - p))
        if pos.any():
            zz, aa, bb = z[pos], a[pos], b[pos]
            za, zb = zz * aa, zz * bb
            res = np.empty(zz.shape)
            far = za >= 2.0
            if far.any():
                ja = np.asarray(scaled_upper_incomplete(p, za[far]))
                zbf = zb[far]
                fin = np.isfinite(zbf)
                jb = np.zeros(zbf.shape)
                if fin.any():
                    jb[fin] = np.asarray(scaled_upper_incomplete(p, zbf[fin])) * np.exp(
                        -(zbf[fin] - za[far][fin]))
                res[far] = ja - jb
            near = ~far
            if near.any():
                Fa = np.asarray(lower_incomplete_F(p, za[near]))
                Fb = np.asarray(lower_incomplete_F(p, zb[near]))
                res[near] = (Fb - Fa) * np.exp(za[near])
            out[pos] = zz ** (p - 1.0) * res
    return pref * out


def _bisect(fun, lo, hi, decreasing, target, rtol=1e-14, maxiter=200):
    """Vectorized bisection for ``fun(x) = target`` with a monotone ``fun``."""
    lo, hi = lo.astype(float).copy(), hi.astype(float).copy()
    for _ in range(maxiter):
        wide = (hi - lo) > rtol * np.maximum(np.abs(hi), 1e-300)
        if not wide.any():
            break
        mid = 0.5 * (lo[wide] + hi[wide])
        val = fun(mid, wide)
        below = val > target[wide] if decreasing else val < target[wide]
        lo[wide] = np.where(below, mid, lo[wide])
        hi[wide] = np.where(below, hi[wide], mid)
    return 0.5 * (lo + hi)


def _profile_inputs(profiles, mu, h, cfg, side):
    h = np.broadcast_to(np.asarray(h, dtype=float), (len(profiles),)).copy()
    ends = np.array([f.support_end for f in profiles])
    if np.any(h <= 0) or np.any(h >= ends):
        raise DomainError("h must lie inside the support (u < V)")
    fh = np.array([float(f(hk)) for f, hk in zip(profiles, h)])
    if np.any(fh <= 0):
        raise DomainError("profile vanishes at h")
    slope = np.array([f.log_slopes(hk)[side] for f, hk in zip(profiles, h)])
    table = PieceTable.concat([f.pieces() for f in profiles])
    # masses far out in the tail are tiny, so only the relative tolerance is meaningful
    cfg = replace(cfg, abs_tol=1e-300)
    u = batch_integrate(table, None, mu, upper=h, cfg=cfg)
    T = batch_integrate(table, None, mu, lower=h, cfg=cfg)
    return h, fh, slope, u, T


# --------------------------------------------------------------------------
# upper reduction, log-concave


def _upper_lc_core(fh, r0, u, T, h, mu):
    lam, p = mu.lam, mu.p

    def tail(r, sel):
        return _exp_mass(fh[sel] * np.exp(-lam * h[sel]), r + lam, h[sel], np.inf, p)

    all_ = np.ones(fh.size, dtype=bool)
    t0 = tail(r0, all_)
    if np.any(t0 < T * (1 - 1e-9)):
        raise ReductionError("tail of the tangent exponential is below the profile tail")
    exact = t0 <= T * (1 + 1e-13)
    R = np.maximum(2.0 * r0, 1.0)
    for _ in range(200):
        big = tail(R, all_) >= T
        if not big.any():
            break
        R = np.where(big, 2.0 * R, R)
    else:
        raise ReductionError("no bracket for the tail rate")
    r = _bisect(tail, r0, R, True, T)
    r = np.where(exact, r0, r)

    def head(d, sel):
        c = fh[sel] * np.exp(r[sel] * (h[sel] - d))
        plate = c * np.asarray(cdf_Phi(mu, d))
        return plate + _exp_mass(c * np.exp(-lam * d), r[sel] + lam, d, h[sel], p)

    h0 = head(np.zeros(fh.size), all_)
    hh = head(h.copy(), all_)
    if np.any(h0 < u * (1 - 1e-9)) or np.any(hh > u * (1 + 1e-9)):
        raise ReductionError("no bracket for the plateau length")
    d = _bisect(head, np.zeros(fh.size), h.copy(), True, u)
    c = fh * np.exp(r * (h - d))
    return c, d, r


def reduce_upper_logconcave_batch(profiles, mu: WeightedMeasure = LEBESGUE, h=1.0,
                                  cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    h, fh, slope, u, T = _profile_inputs(profiles, mu, h, cfg, side=1)
    c, d, r = _upper_lc_core(fh, np.maximum(-slope, 0.0), u, T, h, mu)
    return [PlateauExponential(float(ci), float(di), float(ri)) for ci, di, ri in zip(c, d, r)]


def reduce_upper_logconcave(f: DecreasingProfile, mu: WeightedMeasure = LEBESGUE, h=1.0,
                            cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> PlateauExponential:
    """Plateau-exponential profile with the same head and total mass dominating upper moments."""
    return reduce_upper_logconcave_batch([f], mu, h, cfg)[0]


# --------------------------------------------------------------------------
# lower reduction


def _tail_deficit(table, ends, h, c, w, mu, cfg):
    """``int_h^inf (c e^{w t} - f_k) dmu`` per profile, with ``g >= f`` beyond ``h``."""
    a = np.maximum(table.a, h[table.owner])
    idx = np.nonzero(table.b > a)[0]
    tail = np.nonzero(np.isfinite(ends))[0]
    owner = np.concatenate([table.owner[idx], tail])
    lo = np.concatenate([a[idx], np.maximum(ends[tail], h[tail])])
    hi = np.concatenate([table.b[idx], np.full(tail.size, np.inf)])
    piece = np.concatenate([idx, np.full(tail.size, -1)])
    jj = np.maximum(piece, 0)
    lc = np.log(c)[owner]
    ww = w[owner]
    # log f - log g = A + B t + C t^2 on exponential pieces; coefficients are formed
    # once so that the integrand stays smooth where f and g nearly coincide
    t0, q0, q1, q2 = table.t0[jj], table.q0[jj], table.q1[jj], table.q2[jj]
    A = np.log(table.c[jj]) + q0 - q1 * t0 + q2 * t0 ** 2 - lc
    B = q1 - 2.0 * q2 * t0 - ww
    C = q2
    expo = (table.mode[jj] == 0) & (piece >= 0)

    def fun(t, k):
        logg = lc[k] + ww[k] * t
        fv = np.where(piece[k] >= 0, table.value(t, jj[k]), 0.0)
        with np.errstate(divide="ignore"):
            diff = np.where(expo[k], A[k] + t * (B[k] + t * C[k]), np.log(fv) - logg)
        return np.exp(logg) * -np.expm1(np.minimum(diff, 0.0))

    vals = integrate_many(fun, lo, hi, mu, cfg)
    return np.bincount(owner, weights=vals, minlength=ends.size)


def _upper_tail_point(p, log_target, x_lo):
    """Solve ``log(Gamma(1-p, x)) = log_target`` for ``x >= x_lo``."""
    if p == 0.0:
        return np.maximum(-log_target, x_lo)

    def phi(x):
        return np.log(np.asarray(scaled_upper_incomplete(p, x))) - x

    lo = np.asarray(x_lo, dtype=float).copy()
    hi = np.maximum(lo, -log_target) + 1.0
    for _ in range(200):
        big = phi(hi) > log_target
        if not big.any():
            break
        hi = np.where(big, 2.0 * hi + 1.0, hi)
    inside = phi(lo) > log_target
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        up = phi(mid) > log_target
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
        if np.all(hi - lo <= 4e-16 * hi):
            break
    return np.where(inside, 0.5 * (lo + hi), x_lo)


def _lower_core(logfh, w0, u, T, h, mu, table, ends, cfg):
    lam, p = mu.lam, mu.p

    def head(w, sel):
        hs = h[sel]
        c = np.exp(logfh[sel] - w * hs)
        return _exp_mass(c, lam - w, 0.0, hs, p)

    all_ = np.ones(u.size, dtype=bool)
    hi_val = head(w0, all_)
    lo_val = head(np.zeros(u.size), all_)
    if np.any(hi_val < u * (1 - 1e-9)) or np.any(lo_val > u * (1 + 1e-9)):
        raise ReductionError("no bracket for the head slope")
    w = _bisect(head, w0, np.zeros(u.size), True, u)
    c = np.exp(logfh - w * h)
    z = lam - w
    v = np.full(u.size, np.inf)
    flat = z <= 0
    if flat.any():
        # constant profile on the Lebesgue-type measure: int_h^v t^-p dt = T / c
        e = 1.0 - p
        v[flat] = (h[flat] ** e + e * T[flat] / c[flat]) ** (1.0 / e)
    pos = ~flat
    if pos.any():
        # the truncation point is fixed by the deficit D = int_h^inf (g - f) dmu, which is
        # integrated directly: T and the full tail of g may agree to the last digit
        zp, hp, cp = z[pos], h[pos], c[pos]
        sub = table.take(pos[table.owner])
        sub.owner = (np.cumsum(pos) - 1)[sub.owner]
        D = _tail_deficit(sub, ends[pos], hp, cp, w[pos], mu, cfg)
        vv = np.full(zp.size, np.inf)
        cut = D > 0
        if cut.any():
            logt = np.log(D[cut]) + (1.0 - p) * np.log(zp[cut]) - np.log(cp[cut])
            vv[cut] = _upper_tail_point(p, logt, zp[cut] * hp[cut]) / zp[cut]
        v[pos] = np.maximum(vv, hp)
    return c, -w + 0.0, v


def reduce_lower_batch(profiles, mu: WeightedMeasure = LEBESGUE, h=1.0,
                       cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    h, fh, slope, u, T = _profile_inputs(profiles, mu, h, cfg, side=0)
    table = PieceTable.concat([f.pieces() for f in profiles])
    ends = np.array([f.support_end for f in profiles])
    c, a, v = _lower_core(np.log(fh), np.minimum(slope, 0.0), u, T, h, mu, table, ends,
                          replace(cfg, abs_tol=1e-300))
    return [TruncatedExponential(float(ci), float(ai), float(vi)) for ci, ai, vi in zip(c, a, v)]


def reduce_lower(f: DecreasingProfile, mu: WeightedMeasure = LEBESGUE, h=1.0,
                 cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> TruncatedExponential:
    """Truncated exponential with the same head and total mass, dominated in increasing moments."""
    return reduce_lower_batch([f], mu, h, cfg)[0]


# --------------------------------------------------------------------------
# upper reduction, s-concave


def _power_mass(c, d, b, s, lo, hi, mu, cfg):
    """``int_lo^hi c ((b - t)/(b - d))^(1/s) dmu`` for ``d <= lo <= hi <= b``."""
    e = 1.0 / s
    if mu.is_lebesgue:
        span = b - d
        return c * span / (e + 1.0) * (((b - lo) / span) ** (e + 1.0) - ((b - hi) / span) ** (e + 1.0))
    if mu.lam > 0:
        # beyond lo + 40/lambda the exponential factor leaves less than e^-40 of the mass
        hi = np.minimum(hi, lo + 40.0 / mu.lam)
    return c * integrate_many(lambda t, k: np.maximum((b[k] - t) / (b[k] - d[k]), 0.0) ** e,
                              lo, hi, mu, cfg)


def _upper_sc_core(fh, dpsi, u, T, h, s, mu, cfg):
    """``dpsi`` is the right derivative of ``f^s`` at ``h`` (nonpositive)."""
    n = fh.size
    all_ = np.ones(n, dtype=bool)
    psi = fh ** s
    with np.errstate(divide="ignore"):
        B = np.where(dpsi < 0, h + psi / np.maximum(-dpsi, 1e-300), np.inf)

    def tail(bp, sel):
        return _power_mass(fh[sel], h[sel], bp, s, h[sel], bp, mu, cfg)

    if mu.is_lebesgue:
        bp = h + T * (s + 1.0) / (s * fh)
        if np.any(bp > B * (1 + 1e-9)):
            raise ReductionError("tail of the tangent power profile is below the profile tail")
        bp = np.minimum(bp, B)
    else:
        fin = np.isfinite(B)
        top = np.where(fin, B, 2.0 * h + 1.0)
        tb = tail(top, all_)
        if np.any(tb[fin] < T[fin] * (1 - 1e-9)):
            raise ReductionError("tail of the tangent power profile is below the profile tail")
        for _ in range(200):
            grow = ~fin & (tb < T)
            if not grow.any():
                break
            top = np.where(grow, 2.0 * top - h, top)
            tb = np.where(grow, tail(top, all_), tb)
        bp = _bisect(tail, h.copy(), top, False, T)
        bp = np.where(fin & (tb <= T * (1 + 1e-13)), top, bp)

    def head(d, sel):
        bs, hs = bp[sel], h[sel]
        c = fh[sel] * ((bs - d) / (bs - hs)) ** (1.0 / s)
        return c * np.asarray(cdf_Phi(mu, d)) + _power_mass(c, d, bs, s, d, hs, mu, cfg)

    h0 = head(np.zeros(n), all_)
    hh = head(h.copy(), all_)
    if np.any(h0 < u * (1 - 1e-9)) or np.any(hh > u * (1 + 1e-9)):
        raise ReductionError("no bracket for the plateau length")
    d = _bisect(head, np.zeros(n), h.copy(), True, u)
    c = fh * ((bp - d) / (bp - h)) ** (1.0 / s)
    return c, d, bp


def reduce_upper_sconcave_batch(profiles, mu: WeightedMeasure = LEBESGUE, h=1.0, s=1.0,
                                cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    if not s > 0:
        raise DomainError("s must be positive")
    h, fh, slope, u, T = _profile_inputs(profiles, mu, h, cfg, side=1)
    dpsi = s * fh ** s * np.where(np.isfinite(slope), slope, -np.inf)
    c, d, bp = _upper_sc_core(fh, np.minimum(dpsi, 0.0), u, T, h, s, mu, cfg)
    return [PlateauPower(float(ci), float(di), float(bi), float(s)) for ci, di, bi in zip(c, d, bp)]


def reduce_upper_sconcave(f: DecreasingProfile, mu: WeightedMeasure = LEBESGUE, h=1.0, s=1.0,
                          cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> PlateauPower:
    """Plateau-power profile with the same head and total mass dominating upper moments."""
    return reduce_upper_sconcave_batch([f], mu, h, s, cfg)[0]


@dataclass(frozen=True)
class ReducedFamilyPoint:
    x: float
    profile: DecreasingProfile
    objective: float

"""Decreasing log-concave and s-concave profiles on the half-line.

Every profile decomposes into smooth pieces of one of two shapes::

    mode 0:  c * exp(q(t))          mode 1:  c * max(q(t), 0) ** e

with ``q(t) = q0 + q1 (t - t0) + q2 (t - t0)^2``.  The piece table drives
evaluation, quadrature (single profile or whole batches), closed-form
masses and one-sided log-derivatives.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, ClassVar

import numpy as np

from .measures import (
    DEFAULT_QUADRATURE,
    LEBESGUE,
    DomainError,
    QuadratureConfig,
    WeightedMeasure,
    integrate,
    integrate_many,
    lower_incomplete_F,
    scaled_upper_incomplete,
)

__all__ = [
    "BallSection",
    "ConvexWeight",
    "DecreasingProfile",
    "HalfGaussian",
    "Indicator",
    "LogConcaveSampled",
    "PieceTable",
    "PlateauExponential",
    "PlateauPower",
    "ProfileStats",
    "SConcaveSampled",
    "TruncatedExponential",
    "ValidityReport",
    "batch_integrate",
    "batch_moment",
    "evaluate",
    "is_valid",
    "mass",
    "profile_from_dict",
    "profile_from_json",
    "random_logconcave",
    "random_sconcave",
    "stats",
    "weighted_moment",
]


# --------------------------------------------------------------------------
# piece tables

@dataclass
class PieceTable:
    """Flat arrays describing the smooth pieces of one or more profiles."""

    owner: np.ndarray
    a: np.ndarray
    b: np.ndarray
    mode: np.ndarray
    c: np.ndarray
    t0: np.ndarray
    q0: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    e: np.ndarray
    n_profiles: int = 1

    FIELDS: ClassVar[tuple] = ("owner", "a", "b", "mode", "c", "t0", "q0", "q1", "q2", "e")

    @classmethod
    def from_rows(cls, rows, owner=0):
        arr = np.array(rows, dtype=float).reshape(-1, 9)
        n = arr.shape[0]
        return cls(np.full(n, owner, dtype=np.intp), *arr.T, n_profiles=owner + 1)

    @classmethod
    def concat(cls, tables):
        parts = []
        for i, tab in enumerate(tables):
            parts.append((np.full(tab.a.size, i, dtype=np.intp), tab))
        cols = {"owner": np.concatenate([o for o, _ in parts])}
        for name in cls.FIELDS[1:]:
            cols[name] = np.concatenate([getattr(t, name) for _, t in parts])
        return cls(**cols, n_profiles=len(tables))

    def take(self, mask):
        return PieceTable(**{k: getattr(self, k)[mask] for k in self.FIELDS},
                          n_profiles=self.n_profiles)

    def value(self, t, idx):
        """Evaluate piece ``idx`` (broadcast against ``t``) at ``t``."""
        dt = t - self.t0[idx]
        q = self.q0[idx] + dt * (self.q1[idx] + dt * self.q2[idx])
        with np.errstate(all="ignore"):
            v0 = np.exp(q)
            v1 = np.where(q > 0, np.maximum(q, 0.0) ** self.e[idx], 0.0)
        return self.c[idx] * np.where(self.mode[idx] == 0, v0, v1)

    def log_derivative(self, t, idx):
        dt = t - self.t0[idx]
        q = self.q0[idx] + dt * (self.q1[idx] + dt * self.q2[idx])
        dq = self.q1[idx] + 2.0 * self.q2[idx] * dt
        with np.errstate(all="ignore"):
            d1 = np.where(q > 0, self.e[idx] * dq / q, -np.inf)
        return np.where(self.mode[idx] == 0, dq, d1)


def _piece_eval(table: PieceTable, t):
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    idx = np.searchsorted(table.b, flat, side="left")
    inside = (idx < table.b.size) & (flat >= 0)
    idx_c = np.minimum(idx, table.b.size - 1)
    out = np.where(inside, table.value(flat, idx_c), 0.0)
    return out.reshape(t.shape)


# --------------------------------------------------------------------------
# convex weights

def _grid_convexity_ok(values, grid, tol=1e-9):
    scale = max(1.0, float(np.max(np.abs(values))))
    d1 = np.diff(values) / np.diff(grid)
    return (np.all(values >= -tol * scale)
            and np.all(np.diff(values) >= -tol * scale)
            and np.all(np.diff(d1) >= -tol * max(1.0, float(np.max(np.abs(d1))))))


@dataclass(frozen=True)
class ConvexWeight:
    """An increasing convex weight ``N`` on ``[0, inf)``.

    ``kind`` is ``power`` (``t^q``, ``q >= 1``), ``cosh`` (``cosh(s t)``),
    ``antiderivative`` (``N(t) = int_0^t D``, ``D`` given by ``func``) or
    ``custom`` (``N = func``).
    """

    kind: str
    param: float = 2.0
    func: Callable | None = field(default=None, compare=False)
    label: str = ""
    increasing: bool = True
    convex: bool = True

    def __post_init__(self):
        if self.kind == "power" and not self.param >= 1.0:
            raise DomainError("power weight needs q >= 1")
        if self.kind == "cosh" and not self.param > 0.0:
            raise DomainError("cosh weight needs s > 0")
        if self.kind in ("antiderivative", "custom") and self.func is None:
            raise DomainError(f"{self.kind} weight needs a function")
        if self.kind not in ("power", "cosh", "antiderivative", "custom"):
            raise DomainError(f"unknown weight kind {self.kind!r}")
        grid = np.linspace(0.0, 4.0, 64)
        if not _grid_convexity_ok(np.asarray(self(grid), dtype=float), grid):
            raise DomainError(f"weight {self.name} is not nonnegative, increasing and convex")

    @classmethod
    def power(cls, q):
        return cls("power", float(q))

    @classmethod
    def cosh(cls, s=1.0):
        return cls("cosh", float(s))

    @classmethod
    def antiderivative(cls, deriv, label="antiderivative"):
        return cls("antiderivative", 0.0, deriv, label)

    @classmethod
    def custom(cls, fn, label="custom"):
        return cls("custom", 0.0, fn, label)

    @classmethod
    def parse(cls, text: str):
        """Parse ``t^2``, ``t3``, ``power:1.5``, ``cosh`` or ``cosh:0.5``."""
        s = text.strip().lower().replace(" ", "")
        if s.startswith("cosh"):
            rest = s[4:].lstrip(":")
            return cls.cosh(float(rest) if rest else 1.0)
        if s.startswith("power:"):
            return cls.power(float(s[6:]))
        if s.startswith("t"):
            rest = s[1:].lstrip("^")
            return cls.power(float(rest) if rest else 1.0)
        raise DomainError(f"cannot parse weight {text!r}")

    @property
    def name(self):
        if self.kind == "power":
            return f"t^{self.param:g}"
        if self.kind == "cosh":
            return f"cosh:{self.param:g}"
        return self.label or self.kind

    @property
    def growth_rate(self):
        """Exponential growth rate of ``N`` at infinity."""
        return self.param if self.kind == "cosh" else 0.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "power":
            return t ** self.param
        if self.kind == "cosh":
            with np.errstate(over="ignore"):
                return np.cosh(self.param * t)
        if self.kind == "custom":
            return np.asarray(self.func(t), dtype=float)
        flat = t.ravel()
        out = integrate_many(lambda x, k: self.func(x), np.zeros_like(flat), flat)
        return out.reshape(t.shape) if t.ndim else float(out[0])

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "power":
            q = self.param
            return q * t ** (q - 1.0) if q != 1.0 else np.ones_like(t)
        if self.kind == "cosh":
            with np.errstate(over="ignore"):
                return self.param * np.sinh(self.param * t)
        if self.kind == "antiderivative":
            return np.asarray(self.func(t), dtype=float)
        step = 1e-6 * np.maximum(1.0, np.abs(t))
        lo = np.maximum(t - step, 0.0)
        return (self(t + step) - self(lo)) / (t + step - lo)

    def damped(self, t, lam):
        """``N(t) e^{-lam t}`` without intermediate overflow."""
        t = np.asarray(t, dtype=float)
        if lam == 0.0:
            return self(t)
        if self.kind == "power":
            return t ** self.param * np.exp(-lam * t)
        if self.kind == "cosh":
            s = self.param
            with np.errstate(over="ignore"):
                return 0.5 * (np.exp((s - lam) * t) + np.exp(-(s + lam) * t))
        with np.errstate(divide="ignore"):
            return np.exp(np.log(self(t)) - lam * t)

    def integral(self, b, mu: WeightedMeasure = LEBESGUE, cfg=DEFAULT_QUADRATURE):
        """``int_0^b N dmu`` for an array of upper limits (closed form for powers)."""
        b = np.asarray(b, dtype=float)
        if self.kind == "power" and mu.lam == 0.0:
            k = self.param - mu.p + 1.0
            return b ** k / k
        if self.kind == "cosh" and mu == LEBESGUE:
            return np.sinh(self.param * b) / self.param
        return integrate_many(lambda t, kk: self(t), np.zeros_like(b), b, mu, cfg)


# --------------------------------------------------------------------------
# stats and validity reports

@dataclass(frozen=True)
class ProfileStats:
    V: float
    u: float
    h: float

    def __post_init__(self):
        if not (self.h > 0):
            raise DomainError("head width h must be positive")
        if not (0 < self.u <= self.V * (1 + 1e-12)):
            raise DomainError(f"need 0 < u <= V, got u={self.u!r}, V={self.V!r}")

    @property
    def ratio(self):
        return self.u / self.V

    @property
    def delta(self):
        return 1.0 - self.u / self.V


@dataclass(frozen=True)
class ValidityReport:
    valid: bool
    reason: str = ""
    interval: tuple | None = None

    def __bool__(self):
        return self.valid


# --------------------------------------------------------------------------
# profile variants

class DecreasingProfile:
    """Base class of all profile variants."""

    kind: ClassVar[str] = ""
    # 0 for log-concave, otherwise the concavity exponent s
    _fields: ClassVar[tuple] = ()

    def pieces(self) -> PieceTable:
        raise NotImplementedError

    def __call__(self, t):
        out = _piece_eval(self.pieces(), t)
        return float(out) if np.ndim(t) == 0 else out

    @property
    def f0(self) -> float:
        return float(self(0.0))

    @property
    def support_end(self) -> float:
        return float(self.pieces().b[-1])

    def breakpoints(self):
        tab = self.pieces()
        return tuple(float(x) for x in tab.b[:-1])

    @property
    def concavity(self):
        """``"log"`` or the exponent ``s`` for which ``f^s`` is concave."""
        return "log"

    def log_slopes(self, t: float):
        """Left and right derivatives of ``log f`` at ``t``."""
        tab = self.pieces()
        t = float(t)
        end = float(tab.b[-1])
        if t > end:
            return -math.inf, -math.inf
        j_right = int(np.searchsorted(tab.b, t, side="right"))
        j_left = int(np.searchsorted(tab.b, t, side="left"))
        right = -math.inf if j_right >= tab.b.size else float(tab.log_derivative(t, j_right))
        if t == 0.0:
            left = right
        else:
            left = float(tab.log_derivative(t, min(j_left, tab.b.size - 1)))
        return left, right

    def scaled(self, k: float):
        raise NotImplementedError

    def params(self) -> dict:
        return {name: _jsonable(getattr(self, name)) for name in self._fields}

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def analytic_mass(self, mu: WeightedMeasure = LEBESGUE, upper=math.inf):
        """Closed-form ``int_0^upper f dmu`` or ``None`` where no closed form is used."""
        tab = self.pieces()
        total = 0.0
        for j in range(tab.a.size):
            a, b = float(tab.a[j]), min(float(tab.b[j]), upper)
            if b <= a:
                continue
            piece = _piece_mass(tab, j, a, b, mu)
            if piece is None:
                return None
            total += piece
        return total

    def __repr__(self):
        inner = ", ".join(f"{k}={getattr(self, k)!r}" for k in self._fields)
        return f"{type(self).__name__}({inner})"

    def __eq__(self, other):
        return type(self) is type(other) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(self.to_json())


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return [float(x) for x in v]
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


def _exp_segment_mass(pref_a, z, a, b, p):
    """``int_a^b e^{-z (t - a)} t^-p dt * pref_a`` for the shifted exponent."""
    if z == 0.0:
        if math.isinf(b):
            return math.inf
        return pref_a * (b ** (1 - p) - a ** (1 - p)) / (1 - p)
    if p == 0.0:
        if z > 0:
            span = -math.expm1(-z * (b - a)) if math.isfinite(b) else 1.0
            return pref_a * span / z
        if math.isinf(b):
            return math.inf
        return pref_a * math.expm1(-z * (b - a)) / (-z)
    if z < 0:
        return None
    # z^(p-1) [F(zb) - F(za)] e^{za}, written through the scaled upper tail
    za, zb = z * a, z * b
    zp = z ** (p - 1.0)
    if za >= 2.0:
        ja = float(scaled_upper_incomplete(p, za))
        jb = 0.0 if math.isinf(zb) else float(scaled_upper_incomplete(p, zb)) * math.exp(-(zb - za))
        return pref_a * zp * (ja - jb)
    Fa = float(lower_incomplete_F(p, za))
    Fb = float(lower_incomplete_F(p, zb))
    return pref_a * zp * (Fb - Fa) * math.exp(za)


def _piece_mass(tab: PieceTable, j, a, b, mu: WeightedMeasure):
    mode, c, t0 = int(tab.mode[j]), float(tab.c[j]), float(tab.t0[j])
    q0, q1, q2, e = (float(tab.q0[j]), float(tab.q1[j]), float(tab.q2[j]), float(tab.e[j]))
    if mode == 0 and q2 == 0.0:
        # c e^{q0 + q1 (t - t0)} t^-p e^{-lam t}
        z = mu.lam - q1
        pref_a = c * math.exp(q0 + q1 * (a - t0) - mu.lam * a)
        return _exp_segment_mass(pref_a, z, a, b, mu.p)
    if not mu.is_lebesgue:
        return None
    if mode == 1 and q2 == 0.0 and q1 < 0:
        # c (q0 + q1 (t - t0))^e, linear inside the power
        qa = q0 + q1 * (a - t0)
        qb = max(q0 + q1 * (b - t0), 0.0)
        return c * (qa ** (e + 1) - qb ** (e + 1)) / ((e + 1) * -q1)
    return None


# closed-form variants

@dataclass(frozen=True, eq=False, repr=False)
class Indicator(DecreasingProfile):
    c: float
    d: float
    kind: ClassVar[str] = "Indicator"
    _fields: ClassVar[tuple] = ("c", "d")

    def __post_init__(self):
        _require(self.c >= 0 and math.isfinite(self.c), "Indicator needs c >= 0")
        _require(self.d > 0 and math.isfinite(self.d), "Indicator needs finite d > 0")

    def pieces(self):
        return PieceTable.from_rows([[0.0, self.d, 0, self.c, 0.0, 0.0, 0.0, 0.0, 0.0]])

    @property
    def concavity(self):
        return 0.0  # s-concave for every s

    def scaled(self, k):
        return Indicator(self.c * k, self.d)


@dataclass(frozen=True, eq=False, repr=False)
class TruncatedExponential(DecreasingProfile):
    c: float
    a: float
    d: float
    kind: ClassVar[str] = "TruncatedExponential"
    _fields: ClassVar[tuple] = ("c", "a", "d")

    def __post_init__(self):
        _require(self.c >= 0 and math.isfinite(self.c), "TruncatedExponential needs c >= 0")
        _require(self.a >= 0 and math.isfinite(self.a), "TruncatedExponential needs a >= 0")
        _require(self.d > 0, "TruncatedExponential needs d > 0")

    def pieces(self):
        return PieceTable.from_rows([[0.0, self.d, 0, self.c, 0.0, 0.0, -self.a, 0.0, 0.0]])

    def scaled(self, k):
        return TruncatedExponential(self.c * k, self.a, self.d)


@dataclass(frozen=True, eq=False, repr=False)
class PlateauExponential(DecreasingProfile):
    c: float
    d: float
    rate: float
    kind: ClassVar[str] = "PlateauExponential"
    _fields: ClassVar[tuple] = ("c", "d", "rate")

    def __post_init__(self):
        _require(self.c >= 0 and math.isfinite(self.c), "PlateauExponential needs c >= 0")
        _require(self.d >= 0 and math.isfinite(self.d), "PlateauExponential needs finite d >= 0")
        _require(self.rate >= 0 and math.isfinite(self.rate), "PlateauExponential needs rate >= 0")

    def pieces(self):
        rows = []
        if self.d > 0:
            rows.append([0.0, self.d, 0, self.c, 0.0, 0.0, 0.0, 0.0, 0.0])
        rows.append([self.d, math.inf, 0, self.c, self.d, 0.0, -self.rate, 0.0, 0.0])
        return PieceTable.from_rows(rows)

    def scaled(self, k):
        return PlateauExponential(self.c * k, self.d, self.rate)


@dataclass(frozen=True, eq=False, repr=False)
class PlateauPower(DecreasingProfile):
    c: float
    d: float
    b: float
    s: float
    kind: ClassVar[str] = "PlateauPower"
    _fields: ClassVar[tuple] = ("c", "d", "b", "s")

    def __post_init__(self):
        _require(self.c >= 0 and math.isfinite(self.c), "PlateauPower needs c >= 0")
        _require(self.d >= 0, "PlateauPower needs d >= 0")
        _require(self.b > self.d and math.isfinite(self.b), "PlateauPower needs finite b > d")
        _require(self.s > 0, "PlateauPower needs s > 0")

    def pieces(self):
        rows = []
        if self.d > 0:
            rows.append([0.0, self.d, 0, self.c, 0.0, 0.0, 0.0, 0.0, 0.0])
        rows.append([self.d, self.b, 1, self.c, self.d, 1.0, -1.0 / (self.b - self.d), 0.0,
                     1.0 / self.s])
        return PieceTable.from_rows(rows)

    @property
    def concavity(self):
        return self.s

    def scaled(self, k):
        return PlateauPower(self.c * k, self.d, self.b, self.s)


@dataclass(frozen=True, eq=False, repr=False)
class BallSection(DecreasingProfile):
    """``c (1 - (t/r)^2)_+^k``: sections of Euclidean balls (``k = (n-1)/2``)."""

    c: float
    r: float
    k: float
    kind: ClassVar[str] = "BallSection"
    _fields: ClassVar[tuple] = ("c", "r", "k")

    def __post_init__(self):
        _require(self.c >= 0 and self.r > 0 and self.k > 0, "BallSection needs c >= 0, r > 0, k > 0")

    def pieces(self):
        return PieceTable.from_rows([[0.0, self.r, 1, self.c, 0.0, 1.0, 0.0,
                                      -1.0 / self.r ** 2, self.k]])

    @property
    def concavity(self):
        return 1.0 / self.k

    def analytic_mass(self, mu=LEBESGUE, upper=math.inf):
        if not mu.is_lebesgue or upper < self.r:
            return None
        k = self.k
        return self.c * self.r * 0.5 * math.gamma(0.5) * math.gamma(k + 1) / math.gamma(k + 1.5)

    def scaled(self, k):
        return BallSection(self.c * k, self.r, self.k)


@dataclass(frozen=True, eq=False, repr=False)
class HalfGaussian(DecreasingProfile):
    """``c exp(-t^2 / (2 sigma^2))``."""

    c: float
    sigma: float
    kind: ClassVar[str] = "HalfGaussian"
    _fields: ClassVar[tuple] = ("c", "sigma")

    def __post_init__(self):
        _require(self.c >= 0 and self.sigma > 0, "HalfGaussian needs c >= 0, sigma > 0")

    def pieces(self):
        return PieceTable.from_rows([[0.0, math.inf, 0, self.c, 0.0, 0.0, 0.0,
                                      -0.5 / self.sigma ** 2, 0.0]])

    def analytic_mass(self, mu=LEBESGUE, upper=math.inf):
        if not mu.is_lebesgue:
            return None
        scale = self.c * self.sigma * math.sqrt(math.pi / 2)
        if math.isinf(upper):
            return scale
        return scale * math.erf(upper / (self.sigma * math.sqrt(2)))

    def scaled(self, k):
        return HalfGaussian(self.c * k, self.sigma)


# sampled variants

def _as_knots(knots, values, name):
    x = np.asarray(knots, dtype=float).ravel()
    y = np.asarray(values, dtype=float).ravel()
    _require(x.size >= 2 and x.size == y.size, f"{name} needs matching knots and values (>= 2)")
    _require(x[0] == 0.0, f"{name} knots must start at 0")
    _require(bool(np.all(np.diff(x) > 0)), f"{name} knots must be strictly increasing")
    _require(bool(np.all(np.isfinite(x)) and np.all(np.isfinite(y))), f"{name} values must be finite")
    return x, y


class LogConcaveSampled(DecreasingProfile):
    """``f = exp(phi)`` with ``phi`` piecewise linear on the knots, zero beyond."""

    kind: ClassVar[str] = "LogConcaveSampled"
    _fields: ClassVar[tuple] = ("knots", "phi")

    def __init__(self, knots, phi):
        self.knots, self.phi = _as_knots(knots, phi, "LogConcaveSampled")
        self.knots.setflags(write=False)
        self.phi.setflags(write=False)
        self._table = None

    @property
    def slopes(self):
        return np.diff(self.phi) / np.diff(self.knots)

    def pieces(self):
        if self._table is None:
            x, y = self.knots, self.phi
            n = x.size - 1
            self._table = PieceTable(np.zeros(n, dtype=np.intp), x[:-1].copy(), x[1:].copy(),
                                     np.zeros(n), np.ones(n), x[:-1].copy(), y[:-1].copy(),
                                     self.slopes, np.zeros(n), np.zeros(n))
        return self._table

    def scaled(self, k):
        return LogConcaveSampled(self.knots, self.phi + math.log(k))


class SConcaveSampled(DecreasingProfile):
    """``f = g^(1/s)`` with ``g`` piecewise linear on the knots, zero beyond."""

    kind: ClassVar[str] = "SConcaveSampled"
    _fields: ClassVar[tuple] = ("s", "knots", "g")

    def __init__(self, s, knots, g):
        _require(s > 0, "SConcaveSampled needs s > 0")
        self.s = float(s)
        self.knots, self.g = _as_knots(knots, g, "SConcaveSampled")
        _require(bool(np.all(self.g >= 0)), "SConcaveSampled needs g >= 0")
        self.knots.setflags(write=False)
        self.g.setflags(write=False)
        self._table = None

    @property
    def slopes(self):
        return np.diff(self.g) / np.diff(self.knots)

    @property
    def concavity(self):
        return self.s

    def pieces(self):
        if self._table is None:
            x, y = self.knots, self.g
            n = x.size - 1
            self._table = PieceTable(np.zeros(n, dtype=np.intp), x[:-1].copy(), x[1:].copy(),
                                     np.ones(n), np.ones(n), x[:-1].copy(), y[:-1].copy(),
                                     self.slopes, np.zeros(n), np.full(n, 1.0 / self.s))
        return self._table

    def scaled(self, k):
        return SConcaveSampled(self.s, self.knots, self.g * k ** self.s)


def _require(cond, msg):
    if not cond:
        raise DomainError(msg)


_VARIANTS = {cls.kind: cls for cls in (Indicator, TruncatedExponential, PlateauExponential,
                                       PlateauPower, BallSection, HalfGaussian,
                                       LogConcaveSampled, SConcaveSampled)}


def profile_from_dict(data: dict) -> DecreasingProfile:
    """Build a profile from ``{"kind": ..., <fields>}`` (or ``{"kind", "params"}``)."""
    if not isinstance(data, dict) or "kind" not in data:
        raise DomainError("profile JSON must be an object with a 'kind' field")
    kind = data["kind"]
    if kind not in _VARIANTS:
        raise DomainError(f"unknown profile kind {kind!r}")
    params = dict(data.get("params", {}))
    params.update({k: v for k, v in data.items() if k not in ("kind", "params")})
    cls = _VARIANTS[kind]
    missing = [f for f in cls._fields if f not in params]
    extra = [f for f in params if f not in cls._fields]
    if missing or extra:
        raise DomainError(f"{kind} expects fields {list(cls._fields)}; "
                          f"missing {missing}, unexpected {extra}")
    args = {k: (math.inf if v == "inf" else v) for k, v in params.items()}
    return cls(**args)


def profile_from_json(text: str) -> DecreasingProfile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"malformed profile JSON: {exc}") from None
    return profile_from_dict(data)


# --------------------------------------------------------------------------
# integration


def evaluate(f: DecreasingProfile, t):
    return f(t)


def _profile_integral(f, g, mu, interval, cfg):
    bps = [x for x in f.breakpoints() if math.isfinite(x)]
    lo, hi = interval
    hi = min(hi, f.support_end)
    if hi <= lo:
        return 0.0
    return integrate(lambda t: g(t) * f(t), mu, (lo, hi), cfg, bps)


def mass(f: DecreasingProfile, mu: WeightedMeasure = LEBESGUE, interval=(0.0, math.inf),
         cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """``int f dmu`` over ``interval`` by quadrature."""
    return _profile_integral(f, lambda t: np.ones_like(t), mu, interval, cfg)


def stats(f: DecreasingProfile, mu: WeightedMeasure = LEBESGUE, h: float = 1.0,
          cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> ProfileStats:
    if not h > 0:
        raise DomainError("head width h must be positive")
    u = mass(f, mu, (0.0, h), cfg)
    V = u + mass(f, mu, (h, math.inf), cfg)
    return ProfileStats(V=V, u=min(u, V), h=h)


def weighted_moment(f: DecreasingProfile, N, mu: WeightedMeasure = LEBESGUE,
                    cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """``int_0^inf N f dmu`` by quadrature."""
    if isinstance(N, ConvexWeight) and mu.lam > 0:
        # fold the exponential factor into N so cosh-type weights cannot overflow
        return _profile_integral(f, lambda t: N.damped(t, mu.lam), WeightedMeasure(mu.p, 0.0),
                                 (0.0, math.inf), cfg)
    return _profile_integral(f, N, mu, (0.0, math.inf), cfg)


def batch_moment(table: PieceTable, N: ConvexWeight, mu: WeightedMeasure = LEBESGUE,
                 cfg: QuadratureConfig = DEFAULT_QUADRATURE, divergent="raise"):
    """``int N f_k dmu`` for every profile of ``table``; divergent moments may map to inf."""
    if mu.lam > 0:
        return batch_integrate(table, lambda t, k: N.damped(t, mu.lam), WeightedMeasure(mu.p, 0.0),
                               cfg=cfg, divergent=divergent)
    return batch_integrate(table, lambda t, k: N(t), mu, cfg=cfg, divergent=divergent)


def batch_integrate(table: PieceTable, g=None, mu: WeightedMeasure = LEBESGUE,
                    lower=None, upper=None, cfg: QuadratureConfig = DEFAULT_QUADRATURE,
                    divergent="raise", per_piece=False):
    """``int_{lower_k}^{upper_k} g(t, k) f_k(t) dmu`` for every profile ``k`` of ``table``.

    Each piece is its own quadrature problem; results are summed per profile
    (or returned per piece when ``per_piece`` is set).
    """
    a, b = table.a.copy(), table.b.copy()
    if lower is not None:
        a = np.maximum(a, np.asarray(lower, dtype=float)[table.owner])
    if upper is not None:
        b = np.minimum(b, np.asarray(upper, dtype=float)[table.owner])
    b = np.maximum(a, b)
    owner = table.owner
    idx = np.arange(a.size)

    if g is None:
        def fun(t, k):
            return table.value(t, idx[k])
    else:
        def fun(t, k):
            return g(t, owner[k]) * table.value(t, idx[k])

    vals = integrate_many(fun, a, b, mu, cfg, divergent=divergent)
    if per_piece:
        return vals
    return np.bincount(owner, weights=vals, minlength=table.n_profiles)


# --------------------------------------------------------------------------
# validity


def _slope_check(x, y, tol, what):
    slopes = np.diff(y) / np.diff(x)
    scale = max(1.0, float(np.max(np.abs(slopes[np.isfinite(slopes)]))) if slopes.size else 1.0)
    up = np.nonzero(slopes > tol * scale)[0]
    if up.size:
        i = int(up[0])
        return ValidityReport(False, f"{what} increases", (float(x[i]), float(x[i + 1])))
    bend = np.nonzero(np.diff(slopes) > tol * scale)[0]
    if bend.size:
        i = int(bend[0])
        return ValidityReport(False, f"{what} is not concave", (float(x[i]), float(x[i + 2])))
    return ValidityReport(True)


def _sample_grid(f, points=513):
    end = f.support_end
    bps = [x for x in f.breakpoints() if math.isfinite(x)]
    if math.isinf(end):
        f0 = f.f0
        end = max([1.0, *bps])
        while f(end) > f0 * math.exp(-40.0) and end < 1e12:
            end *= 2.0
    grid = np.union1d(np.linspace(0.0, end, points), np.array(bps))
    return grid[grid <= end]


def is_valid(f: DecreasingProfile, s: float | None = None, tol: float = 1e-9) -> ValidityReport:
    """Check that ``f`` is decreasing and log-concave (or ``f^s`` concave).

    ``s=None`` uses the concavity class of the variant; ``s=0`` requests
    log-concavity.  The report carries the first offending interval.
    """
    if s is None:
        s = 0.0 if f.concavity == "log" else float(f.concavity)
        if isinstance(f, Indicator):
            s = 0.0
    if f.f0 <= 0:
        return ValidityReport(False, "profile vanishes at 0", (0.0, 0.0))
    if isinstance(f, LogConcaveSampled) and s == 0.0:
        return _slope_check(f.knots, f.phi, tol, "log f")
    if isinstance(f, SConcaveSampled) and s == f.s:
        return _slope_check(f.knots, f.g, tol, "f^s")
    grid = _sample_grid(f)
    vals = np.asarray(f(grid))
    if np.any(np.diff(vals) > tol * max(1.0, f.f0)):
        i = int(np.nonzero(np.diff(vals) > tol * max(1.0, f.f0))[0][0])
        return ValidityReport(False, "f increases", (float(grid[i]), float(grid[i + 1])))
    pos = vals > 0
    if s == 0.0:
        return _slope_check(grid[pos], np.log(vals[pos]), tol, "log f")
    return _slope_check(grid[pos], vals[pos] ** s, tol, "f^s")


# --------------------------------------------------------------------------
# random generators


def random_logconcave(seed, knot_count: int = 6, length_scale: float = 1.0,
                      slope_scale: float = 1.0, plateau_prob: float = 0.3,
                      rng: np.random.Generator | None = None) -> LogConcaveSampled:
    """Random decreasing log-concave profile with a piecewise-linear potential.

    Knot spacings are exponential, slopes are minus the cumulative sum of
    exponential increments (so nonincreasing), and with probability
    ``plateau_prob`` the first slope is zero.
    """
    if knot_count < 2:
        raise DomainError("knot_count must be at least 2")
    rng = np.random.default_rng(seed) if rng is None else rng
    m = knot_count - 1
    spacing = rng.exponential(length_scale, m) + 1e-3 * length_scale
    incr = rng.exponential(slope_scale, m)
    if rng.random() < plateau_prob:
        incr[0] = 0.0
    slopes = -np.cumsum(incr)
    knots = np.concatenate([[0.0], np.cumsum(spacing)])
    phi = rng.normal(0.0, 1.0) + np.concatenate([[0.0], np.cumsum(slopes * spacing)])
    return LogConcaveSampled(knots, phi)


def random_sconcave(seed, s: float, knot_count: int = 6, length_scale: float = 1.0,
                    slope_scale: float = 1.0, plateau_prob: float = 0.3,
                    zero_end_prob: float = 0.3,
                    rng: np.random.Generator | None = None) -> SConcaveSampled:
    """Random decreasing s-concave profile ``f = g^(1/s)``, ``g`` concave piecewise linear."""
    if knot_count < 2:
        raise DomainError("knot_count must be at least 2")
    if not s > 0:
        raise DomainError("s must be positive")
    rng = np.random.default_rng(seed) if rng is None else rng
    m = knot_count - 1
    spacing = rng.exponential(length_scale, m) + 1e-3 * length_scale
    incr = rng.exponential(slope_scale, m) + 1e-3 * slope_scale
    if m >= 2 and rng.random() < plateau_prob:
        incr[0] = 0.0
    slopes = -np.cumsum(incr)
    drops = np.concatenate([[0.0], np.cumsum(slopes * spacing)])
    total = -drops[-1]
    reach_zero = rng.random() < zero_end_prob
    g0 = total * (1.0 if reach_zero else 1.0 + rng.exponential(0.5))
    g = g0 + drops
    if reach_zero:
        g[-1] = 0.0
    height = math.exp(rng.normal(0.0, 1.0))
    g = np.maximum(g, 0.0) * (height ** s / g0)
    knots = np.concatenate([[0.0], np.cumsum(spacing)])
    return SConcaveSampled(s, knots, g)

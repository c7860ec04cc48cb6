"""Even random variables with log-concave densities and variables with log-concave tails."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import (
    UPPER_LC_THRESHOLD,
    WEIGHTED_THRESHOLD,
    BoundReport,
    NotApplicableError,
    make_report,
)
from .measures import DEFAULT_QUADRATURE, LEBESGUE, DomainError, integrate, integrate_many
from .profiles import (
    ConvexWeight,
    DecreasingProfile,
    HalfGaussian,
    Indicator,
    LogConcaveSampled,
    TruncatedExponential,
    is_valid,
    mass,
    weighted_moment,
)

__all__ = [
    "EvenRandomVariable",
    "MedianSandwich",
    "ProbReport",
    "TailVariable",
    "anticoncentration",
    "jensen_improved",
    "laplace_lower",
    "laplace_report",
    "laplace_transform",
    "median_abs",
    "median_report",
    "median_sandwich",
    "sconcave_median_lower",
]

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class EvenRandomVariable:
    """Even variable with density ``half_density(|t|)`` on the line."""

    half_density: DecreasingProfile

    def __post_init__(self):
        total = 2.0 * mass(self.half_density)
        if abs(total - 1.0) > 1e-9:
            raise DomainError(f"density must integrate to 1, got {total!r}")
        rep = is_valid(self.half_density)
        if not rep:
            raise DomainError(f"half density is not admissible: {rep.reason}")

    @classmethod
    def preset(cls, name: str, scale: float = 1.0):
        """``uniform`` on [-k, k], ``laplace`` (density e^{-|t|/k}/(2k)) or ``gaussian``."""
        k = float(scale)
        if name == "uniform":
            return cls(Indicator(0.5 / k, k))
        if name in ("laplace", "exponential"):
            return cls(TruncatedExponential(0.5 / k, 1.0 / k, math.inf))
        if name == "gaussian":
            return cls(HalfGaussian(1.0 / (k * math.sqrt(2 * math.pi)), k))
        raise DomainError(f"unknown preset {name!r}")

    @classmethod
    def from_profile(cls, f: DecreasingProfile):
        """Normalize a decreasing profile into an even density."""
        return cls(f.scaled(0.5 / mass(f)))

    def expectation(self, N, cfg=DEFAULT_QUADRATURE):
        """``E N(X)`` for an even weight ``N``."""
        return 2.0 * weighted_moment(self.half_density, N, LEBESGUE, cfg)

    def cdf_abs(self, m, cfg=DEFAULT_QUADRATURE):
        return 2.0 * mass(self.half_density, LEBESGUE, (0.0, m), cfg)

    @property
    def mean_abs(self):
        return self.expectation(ConvexWeight.power(1))

    @property
    def l2norm(self):
        return math.sqrt(self.expectation(ConvexWeight.power(2)))

    def scaled(self, k):
        """Distribution of ``k X``."""
        return EvenRandomVariable(_rescale_profile(self.half_density, k))


def _rescale_profile(f, k):
    """Density of ``k X`` from the half density of ``X``."""
    kind = f.kind
    if kind == "Indicator":
        return Indicator(f.c / k, f.d * k)
    if kind == "TruncatedExponential":
        return TruncatedExponential(f.c / k, f.a / k, f.d * k)
    if kind == "HalfGaussian":
        return HalfGaussian(f.c / k, f.sigma * k)
    if kind == "LogConcaveSampled":
        return LogConcaveSampled(f.knots * k, f.phi - math.log(k))
    raise DomainError(f"rescaling not available for {kind}")


def median_abs(X: EvenRandomVariable, tol=1e-13, cfg=DEFAULT_QUADRATURE) -> float:
    """Median of ``|X|``: bisection to a 1e-3 bracket, then safeguarded Newton."""
    hi = 1.0
    while X.cdf_abs(hi, cfg) < 0.5:
        hi *= 2.0
    lo = 0.0
    while hi - lo > 1e-3 * hi:
        mid = 0.5 * (lo + hi)
        if X.cdf_abs(mid, cfg) < 0.5:
            lo = mid
        else:
            hi = mid
    m = 0.5 * (lo + hi)
    for _ in range(60):
        F = X.cdf_abs(m, cfg) - 0.5
        if F < 0:
            lo = m
        else:
            hi = m
        dens = 2.0 * float(X.half_density(m))
        step = m - F / dens if dens > 0 else 0.5 * (lo + hi)
        nxt = step if lo < step < hi else 0.5 * (lo + hi)
        if abs(nxt - m) <= tol * m or hi - lo <= tol * hi:
            return nxt
        m = nxt
    return m


@dataclass(frozen=True)
class MedianSandwich:
    lower: float
    upper: float
    median: float
    l2norm: float
    sharp_lower: float

    @property
    def satisfied(self):
        tol = 1e-9 * max(1.0, self.median)
        return self.lower <= self.median + tol and self.median <= self.upper + tol

    def to_dict(self):
        return {"lower": self.lower, "upper": self.upper, "median": self.median,
                "l2norm": self.l2norm, "sharp_lower": self.sharp_lower,
                "satisfied": self.satisfied}


def _averaged_inverse(N: ConvexWeight, target, cfg=DEFAULT_QUADRATURE):
    """Solve ``(1/t) int_0^t N = target`` by bisection."""
    def avg(t):
        return float(N.integral(np.array([t]), LEBESGUE, cfg)[0]) / t

    if not math.isfinite(target):
        raise OverflowError("E N(X) is not finite")
    if target <= avg(1e-300 if N(0.0) > 0 else 1e-12) and N(0.0) >= target:
        return 0.0
    hi = 1.0
    while avg(hi) < target:
        hi *= 2.0
        if hi > 1e300:
            raise OverflowError("averaged weight inverse exceeds double range")
    lo = 0.0
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if avg(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return 0.5 * (lo + hi)


def median_sandwich(X: EvenRandomVariable, N: ConvexWeight, cfg=DEFAULT_QUADRATURE,
                    median: float | None = None):
    """``(log 2 / 2) ||X||_2 <= m_|X| <= (1/2) Ntilde^{-1}(E N(X))``.

    ``Ntilde(t) = (1/t) int_0^t N``.  ``sharp_lower`` carries the stronger
    ``(log 2 / sqrt 2) ||X||_2``.  A known ``median`` skips the bisection.
    """
    l2 = X.l2norm
    end = X.half_density.support_end
    with np.errstate(over="ignore"):
        if math.isfinite(end) and not np.isfinite(N(end)):
            raise OverflowError("N overflows double precision on the support of X")
    EN = X.expectation(N, cfg)
    upper = 0.5 * _averaged_inverse(N, EN, cfg)
    m = median_abs(X, cfg=cfg) if median is None else float(median)
    return MedianSandwich(0.5 * LOG2 * l2, upper, m, l2,
                          LOG2 / math.sqrt(2.0) * l2)


def sconcave_median_lower(X: EvenRandomVariable, s: float) -> float:
    """``sqrt((2s+1)(3s+1)/2) (1 - 2^{-s/(s+1)}) / s * ||X||_2`` for s-concave densities."""
    if not s > 0:
        raise DomainError("s must be positive")
    gap = -math.expm1(-s / (s + 1.0) * LOG2)
    return math.sqrt((2 * s + 1) * (3 * s + 1) / 2.0) * gap / s * X.l2norm


def laplace_lower(m: float, s: float) -> float:
    """``sinh(2 s m) / (2 s m)``, a lower bound for ``E e^{sX}``."""
    if not m > 0:
        raise DomainError("median must be positive")
    x = 2.0 * abs(s) * m
    if x == 0:
        return 1.0
    if x < 1e-4:
        return 1.0 + x * x / 6.0
    return math.sinh(x) / x if x < 700 else math.inf


def laplace_transform(X: EvenRandomVariable, s: float, cfg=DEFAULT_QUADRATURE) -> float:
    return X.expectation(ConvexWeight.cosh(abs(s)) if s != 0 else (lambda t: np.ones_like(t)),
                         cfg)


@dataclass(frozen=True)
class ProbReport:
    report: BoundReport
    extras: dict = field(default_factory=dict)
    note: str = ""

    def to_dict(self):
        out = self.report.to_dict()
        out.update(self.extras)
        if self.note:
            out["note"] = self.note
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _summary(X: EvenRandomVariable, cfg):
    return {"median": median_abs(X, cfg=cfg), "l2norm": X.l2norm, "mean": X.mean_abs}


def laplace_report(X: EvenRandomVariable, s: float, cfg=DEFAULT_QUADRATURE) -> ProbReport:
    """``Lambda_X(s) >= sinh(2 s m) / (2 s m)`` with ``m`` the median of ``|X|``."""
    extra = _summary(X, cfg)
    rep = make_report("laplace", laplace_transform(X, s, cfg), laplace_lower(extra["median"], s),
                      0.0, 1.0, "lower")
    return ProbReport(rep, extra)


def median_report(X: EvenRandomVariable, N: ConvexWeight, cfg=DEFAULT_QUADRATURE) -> dict:
    """Median sandwich as a flat dictionary with ``mean = E|X|``."""
    out = median_sandwich(X, N, cfg).to_dict()
    out.update({"theorem": "median", "weight": N.name, "mean": X.mean_abs})
    return out


@dataclass(frozen=True)
class TailVariable:
    """Nonnegative variable given by its survival function ``P(X >= t)``."""

    survival: DecreasingProfile

    def __post_init__(self):
        if abs(self.survival.f0 - 1.0) > 1e-12:
            raise DomainError("survival function must equal 1 at 0")
        rep = is_valid(self.survival, s=0.0)
        if not rep:
            raise DomainError(f"survival function is not log-concave: {rep.reason}")

    @classmethod
    def exponential(cls, rate=1.0):
        return cls(TruncatedExponential(1.0, rate, math.inf))

    @classmethod
    def from_density(cls, f: DecreasingProfile, knots: int = 4097):
        """Survival function of a density, sampled in log scale on a fine grid."""
        total = mass(f)
        end = f.support_end
        if math.isinf(end):
            end = 1.0
            while mass(f, LEBESGUE, (end, math.inf)) > 1e-14 * total:
                end *= 1.5
        bps = [b for b in f.breakpoints() if 0.0 < b < end]
        x = np.union1d(np.linspace(0.0, end, knots), bps)
        # cells between kinks are smooth; reversed partial sums give the tails
        cells = np.asarray(integrate_many(lambda t, k: f(t), x[:-1], x[1:]))
        tails = np.cumsum(cells[::-1])[::-1]
        surv = np.concatenate([tails / total, [0.0]])
        keep = surv > 0
        return cls(LogConcaveSampled(x[keep], np.log(surv[keep])))

    @property
    def mean(self):
        return mass(self.survival)

    def expectation(self, N: ConvexWeight, cfg=DEFAULT_QUADRATURE):
        """``E N(X) = int N'(t) P(X >= t) dt`` for ``N(0) = 0``."""
        f = self.survival
        bps = [x for x in f.breakpoints() if math.isfinite(x)]
        return integrate(lambda t: N.derivative(t) * f(t), LEBESGUE, (0.0, f.support_end), cfg, bps)


def _check_jensen_weight(N: ConvexWeight):
    if abs(float(N(0.0))) > 1e-14:
        raise DomainError("N must vanish at 0")
    grid = np.linspace(0.0, 4.0, 64)
    d = np.asarray(N.derivative(grid), dtype=float)
    d1 = np.diff(d)
    if np.any(d1 < -1e-9 * max(1.0, float(np.max(np.abs(d))))) or np.any(
            np.diff(d1 / np.diff(grid)) < -1e-9 * max(1.0, float(np.max(np.abs(d1))) * 64)):
        raise DomainError("N' must be increasing and convex")


def jensen_improved(X: TailVariable, N: ConvexWeight, h: float, cfg=DEFAULT_QUADRATURE,
                    strict=False) -> ProbReport:
    """``E N(X) >= (H/h) N(h E X / H)`` with ``H = int_0^h P(X >= t) dt <= E X / 2``."""
    if not h > 0:
        raise DomainError("h must be positive")
    _check_jensen_weight(N)
    head = mass(X.survival, LEBESGUE, (0.0, h), cfg)
    mean = X.mean
    ratio = head / mean
    if strict and ratio > WEIGHTED_THRESHOLD * (1 + 1e-12):
        raise NotApplicableError(f"head ratio {ratio:.6g} exceeds 1/2")
    bound = head / h * float(N(h * mean / head))
    lhs = X.expectation(N, cfg)
    rep = make_report("jensen", lhs, bound, ratio, WEIGHTED_THRESHOLD, "lower")
    return ProbReport(rep, {"mean": mean, "classical": float(N(mean))})


def anticoncentration(X: EvenRandomVariable, h: float, cfg=DEFAULT_QUADRATURE) -> ProbReport:
    """``P(|X| <= h) <= 1 - exp(-sqrt 2 h / ||X||_2)`` when ``P(|X| <= h) <= 1 - e^{-sqrt 3}``."""
    if not h >= 0:
        raise DomainError("h must be nonnegative")
    lhs = X.cdf_abs(h, cfg) if h > 0 else 0.0
    l2 = X.l2norm
    rhs = -math.expm1(-math.sqrt(2.0) * h / l2)
    rep = make_report("anticoncentration", lhs, rhs, lhs, UPPER_LC_THRESHOLD, "upper")
    note = ("the premise bounds P(|X| <= h); the conclusion is not claimed to be "
            "stronger or weaker than the premise")
    return ProbReport(rep, {"l2norm": l2}, note)

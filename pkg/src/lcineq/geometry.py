"""Symmetric convex bodies through their section function along one direction."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .bounds import BK_THRESHOLD, BoundReport, NotApplicableError, make_report, sconcave_threshold
from .measures import DEFAULT_QUADRATURE, LEBESGUE, DomainError
from .profiles import (
    BallSection,
    ConvexWeight,
    DecreasingProfile,
    Indicator,
    PlateauPower,
    is_valid,
    mass,
    weighted_moment,
)

__all__ = [
    "BODIES",
    "BodyProfile",
    "FloatingBounds",
    "IsotropicReport",
    "MonteCarloEstimate",
    "SlabSandwich",
    "brunn_check",
    "builtin_body",
    "cube_diagonal_section",
    "direction_second_moment",
    "floating_radius_bounds",
    "isotropic_sandwich",
    "slab_sandwich_check",
    "slab_volume",
]

BODIES = ("cube_axis", "ball", "l1ball_axis")


def _unit_ball_volume(n):
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


@dataclass(frozen=True)
class BodyProfile:
    name: str
    n: int
    section: DecreasingProfile
    normalized: bool = True

    @property
    def volume(self):
        return 2.0 * mass(self.section)


def builtin_body(kind: str, n: int) -> BodyProfile:
    """Volume-one cube, Euclidean ball or cross-polytope, cut along a coordinate axis."""
    if int(n) != n or n < 2:
        raise DomainError("dimension must be an integer >= 2")
    n = int(n)
    if kind == "cube_axis":
        return BodyProfile(kind, n, Indicator(1.0, 0.5))
    if kind == "ball":
        r = _unit_ball_volume(n) ** (-1.0 / n)
        c = _unit_ball_volume(n - 1) * r ** (n - 1)
        return BodyProfile(kind, n, BallSection(c, r, (n - 1) / 2.0))
    if kind == "l1ball_axis":
        R = (math.factorial(n) / 2.0 ** n) ** (1.0 / n)
        c = 2.0 ** (n - 1) * R ** (n - 1) / math.factorial(n - 1)
        return BodyProfile(kind, n, PlateauPower(c, 0.0, R, 1.0 / (n - 1)))
    raise DomainError(f"unknown body {kind!r}; expected one of {BODIES}")


def brunn_check(body: BodyProfile):
    """The section must be ``1/(n-1)``-concave."""
    return is_valid(body.section, s=1.0 / (body.n - 1))


def slab_volume(body: BodyProfile, h: float, cfg=DEFAULT_QUADRATURE) -> float:
    """Volume of ``{x in K : |<x, theta>| <= h}``."""
    if h < 0:
        raise DomainError("h must be nonnegative")
    if h == 0:
        return 0.0
    return 2.0 * mass(body.section, LEBESGUE, (0.0, h), cfg)


def direction_second_moment(body: BodyProfile, cfg=DEFAULT_QUADRATURE) -> float:
    """``int_K <x, theta>^2 dx``."""
    return 2.0 * weighted_moment(body.section, ConvexWeight.power(2), LEBESGUE, cfg)


def _lower_moment(h, slab):
    return (h / slab) ** 2 / 3.0


def _upper_moment(n, h, slab):
    gap = -math.expm1(math.log1p(-slab) / n)
    return 2.0 * h ** 2 / ((n + 1) * (n + 2) * gap ** 2)


@dataclass(frozen=True)
class SlabSandwich:
    body: str
    n: int
    h: float
    slab: float
    moment: float
    lower: BoundReport
    upper: BoundReport

    def to_dict(self):
        return {"body": self.body, "n": self.n, "h": self.h, "slab": self.slab,
                "moment": self.moment,
                "bounds": {"lower": self.lower.to_dict(), "upper": self.upper.to_dict()}}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def slab_sandwich_check(body: BodyProfile, h: float, cfg=DEFAULT_QUADRATURE) -> SlabSandwich:
    """Both slab bounds on the directional second moment of a volume-one body."""
    if not body.normalized:
        raise DomainError("slab bounds need a volume-one body")
    if not h > 0:
        raise DomainError("h must be positive")
    slab = slab_volume(body, h, cfg)
    moment = direction_second_moment(body, cfg)
    n = body.n
    lo = make_report("slab-lower", moment, _lower_moment(h, slab), slab, BK_THRESHOLD, "lower")
    if slab < 1.0:
        up_val = _upper_moment(n, h, slab)
    else:
        up_val = math.inf
    up = make_report("slab-upper", moment, up_val, slab, sconcave_threshold(1.0 / (n - 1))
                     if n > 1 else BK_THRESHOLD, "upper")
    return SlabSandwich(body.name, n, float(h), slab, moment, lo, up)


@dataclass(frozen=True)
class IsotropicReport:
    L_lower: float
    L_upper: float
    h: float
    slab: float
    n: int

    def to_dict(self):
        return {"L_lower": self.L_lower, "L_upper": self.L_upper, "h": self.h,
                "slab": self.slab, "n": self.n}


def isotropic_sandwich(n: int, h: float, slab: float, strict=True) -> IsotropicReport:
    """Bounds on the isotropic constant from one slab volume."""
    if not (h > 0 and 0 < slab < 1):
        raise DomainError("need h > 0 and slab in (0, 1)")
    if strict and slab > BK_THRESHOLD:
        raise NotApplicableError(f"slab volume {slab:.6g} exceeds 3/4")
    lower = h / (math.sqrt(3.0) * slab)
    gap = -math.expm1(math.log1p(-slab) / n)
    upper = math.sqrt(2.0) * h / (math.sqrt((n + 1) * (n + 2)) * gap)
    return IsotropicReport(lower, upper, float(h), float(slab), int(n))


class FloatingBounds(NamedTuple):
    r_inner: float
    r_outer: float


def floating_radius_bounds(L: float, n: int, delta: float) -> FloatingBounds:
    """Radii of centred balls inside and around the floating body ``K_delta``."""
    if not L > 0:
        raise DomainError("L must be positive")
    dn = sconcave_threshold(1.0 / (n - 1)) if n > 1 else BK_THRESHOLD
    lo = (1.0 - dn) / 2.0
    if not lo - 1e-15 <= delta <= 0.5:
        raise NotApplicableError(f"delta must lie in [{lo:.6g}, 0.5]")
    r_in = L * math.sqrt((n + 1) * (n + 2) / 2.0) * (1.0 - (2.0 * delta) ** (1.0 / n))
    r_out = math.sqrt(3.0) * L * (1.0 - 2.0 * delta)
    return FloatingBounds(r_in, r_out)


class MonteCarloEstimate(NamedTuple):
    value: float
    stderr: float


def cube_diagonal_section(n: int, samples: int = 1_000_000, eps: float = 0.01,
                          seed: int = 12345) -> MonteCarloEstimate:
    """Central section of the unit cube orthogonal to the main diagonal, by slab differencing."""
    rng = np.random.default_rng(seed)
    rest = samples
    hits = 0
    while rest > 0:
        m = min(rest, 250_000)
        pts = rng.random((m, n)) - 0.5
        proj = pts.sum(axis=1) / math.sqrt(n)
        hits += int(np.count_nonzero(np.abs(proj) <= eps))
        rest -= m
    frac = hits / samples
    value = frac / (2 * eps)
    stderr = math.sqrt(frac * (1 - frac) / samples) / (2 * eps)
    return MonteCarloEstimate(value, stderr)

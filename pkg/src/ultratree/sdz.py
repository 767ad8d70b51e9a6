"""Sequentially-descending-to-zero value sets and dyadic coercion.

A finite set of nonnegative reals descends to zero exactly when it
contains 0, so check_sdz is simple here; the machinery that matters is
g_round, which pushes every distance into {0} u {1} u {2^-k} without
floating logarithms: math.frexp gives the exact binary exponent, so the
result is the exact power of two bracketing the input from below.
Coercing a whole matrix entrywise preserves the ultrametric inequality
because the rounding map is monotone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .metric import CHECK_ATOL, DistanceMatrix, from_entries, validate


class NotUltrametricError(ValueError):
    pass


class NotSDZError(ValueError):
    pass


def check_sdz(a: Iterable[float]) -> bool:
    """Whether the finite value set descends to zero.

    Needs all values finite and nonnegative with 0 present; finiteness
    of the set makes boundedness and isolation of the positive values
    automatic.
    """
    vals = set(float(v) for v in a)
    if not vals:
        return False
    if any(not math.isfinite(v) or v < 0.0 for v in vals):
        return False
    return 0.0 in vals


def g_round(x: float) -> float:
    """Round a nonnegative real into {0} u {2^-k : k >= 0}.

    0 stays 0, anything at or above 1 becomes 1, and x in (0, 1) maps to
    the largest power of two not exceeding it. frexp writes x = m * 2^e
    with m in [0.5, 1), so that power is exactly 2^(e-1).
    """
    x = float(x)
    if x < 0.0 or not math.isfinite(x):
        raise ValueError("g_round needs a finite nonnegative value, got %r" % (x,))
    if x == 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    _, e = math.frexp(x)
    return math.ldexp(1.0, e - 1)


def _g_round_array(d: np.ndarray) -> np.ndarray:
    out = np.ones_like(d)
    out[d == 0.0] = 0.0
    inside = (d > 0.0) & (d < 1.0)
    _, e = np.frexp(d[inside])
    out[inside] = np.ldexp(1.0, e - 1)
    return out


def coerce_sdz(m: DistanceMatrix) -> DistanceMatrix:
    """Entrywise g_round of a validated ultrametric.

    The result is again ultrametric (rounding is monotone, so maxima are
    preserved), its values lie in {0} u {1} u {2^-k}, and every positive
    entry t satisfies g(t) <= t < 2 g(t).
    """
    report = validate(m)
    if not report.is_ultrametric:
        raise NotUltrametricError("input is not ultrametric: witness %r" % (report.witness,))
    d = _g_round_array(np.asarray(m.d))
    return from_entries(d, labels=m.labels, snap=False)


@dataclass(frozen=True)
class RadiusSchedule:
    """Strictly decreasing positive radii r_0 > r_1 > ..., then zeros.

    zero_tail says whether the schedule really ends in zeros (finite
    space) or is truncated at a horizon (generator trees); reading past
    a truncated schedule is an error rather than a silent zero.
    """

    radii: tuple
    zero_tail: bool = True

    def __post_init__(self):
        rr = tuple(float(v) for v in self.radii)
        object.__setattr__(self, "radii", rr)
        if any(v <= 0.0 or not math.isfinite(v) for v in rr):
            raise ValueError("schedule radii must be finite and positive")
        if any(rr[i] <= rr[i + 1] for i in range(len(rr) - 1)):
            raise ValueError("schedule radii must be strictly decreasing")

    def r(self, k: int) -> float:
        if k < 0:
            raise IndexError("negative schedule index")
        if k < len(self.radii):
            return self.radii[k]
        if self.zero_tail:
            return 0.0
        raise IndexError("schedule is truncated at %d entries" % len(self.radii))

    def to_json_dict(self) -> dict:
        return {"radii": list(self.radii), "zero_tail": self.zero_tail}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "RadiusSchedule":
        unknown = set(doc) - {"radii", "zero_tail"}
        if unknown:
            raise ValueError("unknown schedule fields: %s" % ", ".join(sorted(unknown)))
        return cls(radii=tuple(doc["radii"]), zero_tail=bool(doc.get("zero_tail", True)))


def radius_schedule(m: DistanceMatrix, _prevalidated: bool = False) -> RadiusSchedule:
    """Schedule of a validated ultrametric: its positive values, descending.

    Together with 0 the radii are exactly the realized distance values.
    """
    if not _prevalidated:
        report = validate(m)
        if not report.is_ultrametric:
            raise NotUltrametricError("input is not ultrametric: witness %r" % (report.witness,))
    radii = tuple(sorted((v for v in m.values if v > 0.0), reverse=True))
    return RadiusSchedule(radii=radii, zero_tail=True)


def order_type(a: Iterable[float]) -> int:
    """Size of a finite descending-to-zero value set."""
    vals = set(float(v) for v in a)
    if not check_sdz(vals):
        raise NotSDZError("value set does not descend to zero")
    return len(vals)


def open_equals_closed(m: DistanceMatrix, x: int, r: float) -> float:
    """The realized radius r* with B_open(x, r) == B_closed(x, r*).

    r* is the largest realized distance value strictly below r; the
    member sets are compared before returning.
    """
    if r <= 0.0:
        raise ValueError("open ball needs a positive radius")
    below = [v for v in m.values if v < r]
    r_star = max(below)                     # 0.0 is always realized
    row = m.d[x]
    open_members = np.flatnonzero(row < r)
    closed_members = np.flatnonzero(row <= r_star)
    if not np.array_equal(open_members, closed_members):
        raise AssertionError("coincidence radius failed for x=%d r=%r" % (x, r))
    return float(r_star)


def closed_equals_open(m: DistanceMatrix, x: int, r: float) -> float:
    """A radius rho > r with B_closed(x, r) == B_open(x, rho).

    rho is the midpoint between r and the next larger realized value;
    above the largest value rho = 2r, and a one-point space uses 1.
    """
    if r < 0.0:
        raise ValueError("negative radius")
    above = [v for v in m.values if v > r]
    if above:
        rho = (r + min(above)) / 2.0
    elif r > 0.0:
        rho = 2.0 * r
    else:
        rho = 1.0                           # diameter-zero space probed at r = 0
    row = m.d[x]
    closed_members = np.flatnonzero(row <= r)
    open_members = np.flatnonzero(row < rho)
    if not np.array_equal(closed_members, open_members):
        raise AssertionError("coincidence radius failed for x=%d r=%r" % (x, r))
    return float(rho)

"""Finite distance matrices, validation, and ball computations.

A DistanceMatrix is structurally well formed by construction (square,
symmetric, nonnegative, zero diagonal); whether it is a metric or an
ultrametric is decided by validate(), which reports the first violating
triple as a witness. Ball membership, diameters and separation tests
work directly on the float64 matrix; all arithmetic on matrix entries
is exact comparison, the only tolerance use is the validation slack and
the optional value snapping applied when a matrix is built from raw
decimal input.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels

# relative gap under which two raw input values are treated as the same
# distance value; dyadic literal cells bypass this entirely
SNAP_RTOL = 1e-9
# additive slack for the (strong) triangle and isosceles scans
CHECK_ATOL = 1e-12


class StructuralError(ValueError):
    """Malformed matrix input: shape, symmetry, sign or diagonal."""


def _snap_values(values: np.ndarray, anchors: frozenset) -> dict:
    """Group nearly-equal values and map each to a canonical representative.

    Values whose consecutive relative gap is below SNAP_RTOL collapse to
    one representative: the anchor value if the group contains exactly
    one anchor, otherwise the smallest group member. Anchor values are
    declared-exact (dyadic literals); two anchors never merge.
    """
    uniq = np.unique(values)
    mapping = {}
    group = [float(uniq[0])]
    for v in uniq[1:]:
        v = float(v)
        prev = group[-1]
        close = (v - prev) <= SNAP_RTOL * max(abs(v), abs(prev))
        if close and not (prev in anchors and v in anchors):
            group.append(v)
        else:
            _emit_group(group, anchors, mapping)
            group = [v]
    _emit_group(group, anchors, mapping)
    return mapping


def _emit_group(group, anchors, mapping):
    in_group_anchors = [g for g in group if g in anchors]
    if len(in_group_anchors) == 1:
        canon = in_group_anchors[0]
    else:
        canon = group[0]
    for g in group:
        mapping[g] = canon


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric nonnegative float64 matrix with labelled points.

    values holds the sorted distinct entries (0.0 always included); for a
    validated ultrametric this is {0} together with the image of d.
    """

    d: np.ndarray
    labels: tuple
    values: tuple

    @property
    def n(self) -> int:
        return self.d.shape[0]

    def index_of(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError("unknown point label %r" % (label,)) from None

    def __eq__(self, other):
        if not isinstance(other, DistanceMatrix):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.d, other.d)

    def __hash__(self):
        return hash((self.labels, self.d.tobytes()))

    def __repr__(self):
        return "DistanceMatrix(n=%d, values=%d)" % (self.n, len(self.values))


def _default_labels(n: int) -> tuple:
    return tuple("p%d" % i for i in range(n))


def from_entries(entries, labels: Optional[Sequence] = None, snap: bool = True,
                 anchors: Iterable[float] = ()) -> DistanceMatrix:
    """Build a DistanceMatrix from raw entries, raising StructuralError
    (naming the offending cell) on anything not square, symmetric,
    nonnegative and zero-diagonal.

    snap=True applies relative-tolerance snapping of nearly-equal values;
    anchors are values (from dyadic literals) exempt from merging.
    """
    d = np.asarray(entries, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise StructuralError("matrix must be square, got shape %r" % (d.shape,))
    n = d.shape[0]
    if n == 0:
        raise StructuralError("matrix must have at least one point")
    if not np.all(np.isfinite(d)):
        i, j = np.argwhere(~np.isfinite(d))[0]
        raise StructuralError("non-finite entry at cell (%d, %d)" % (i, j))
    for i in range(n):
        if d[i, i] != 0.0:
            raise StructuralError("nonzero diagonal at cell (%d, %d): %r" % (i, i, float(d[i, i])))
    asym = d != d.T
    if asym.any():
        i, j = np.argwhere(asym)[0]
        raise StructuralError("asymmetric at cell (%d, %d): %r vs %r"
                              % (i, j, float(d[i, j]), float(d[j, i])))
    neg = d < 0.0
    if neg.any():
        i, j = np.argwhere(neg)[0]
        raise StructuralError("negative entry at cell (%d, %d): %r" % (i, j, float(d[i, j])))
    if labels is None:
        labels = _default_labels(n)
    labels = tuple(str(x) for x in labels)
    if len(labels) != n:
        raise StructuralError("expected %d labels, got %d" % (n, len(labels)))
    if len(set(labels)) != n:
        raise StructuralError("duplicate point labels")
    if snap:
        mapping = _snap_values(d.ravel(), frozenset(float(a) for a in anchors))
        uniq = np.array(sorted(mapping), dtype=np.float64)
        canon = np.array([mapping[u] for u in uniq.tolist()], dtype=np.float64)
        d = canon[np.searchsorted(uniq, d)]
    d = d.copy()
    d.flags.writeable = False
    values = tuple(sorted(set(float(v) for v in np.unique(d)) | {0.0}))
    return DistanceMatrix(d=d, labels=labels, values=values)


@dataclass(frozen=True)
class Ball:
    """A ball given by center index, radius and realized member set.

    Two balls are the same subset iff their member tuples are equal; the
    canonical center of a member set is its smallest point index.
    """

    center: int
    radius: float
    kind: str
    members: tuple

    @property
    def member_set(self) -> frozenset:
        return frozenset(self.members)

    @property
    def canonical_center(self) -> int:
        return self.members[0]


@dataclass(frozen=True)
class Witness:
    """First violating tuple found by validate, with the entries involved."""

    kind: str            # identity | triangle | strong_triangle | isosceles
    points: tuple
    entries: tuple


@dataclass(frozen=True)
class ValidationReport:
    is_metric: bool
    is_ultrametric: bool
    witness: Optional[Witness]

    def __bool__(self):
        return self.is_ultrametric


def _identity_witness(d: np.ndarray):
    off = (d == 0.0) & ~np.eye(d.shape[0], dtype=bool)
    hits = np.argwhere(off)
    if hits.size:
        i, j = hits[0]
        return (int(i), int(j))
    return None


def validate(m: DistanceMatrix, tol: float = CHECK_ATOL) -> ValidationReport:
    """Decide metric and ultrametric status of m.

    is_metric needs identity of indiscernibles (no zero off-diagonal
    entry) plus the triangle inequality; is_ultrametric needs the strong
    triangle inequality. The equivalent isosceles form is scanned as
    well and the earliest violation of either, in (i, j, k) scan order,
    becomes the witness.
    """
    d = m.d
    ident = _identity_witness(d)
    if ident is not None:
        i, j = ident
        w = Witness("identity", (i, j), (0.0,))
        return ValidationReport(is_metric=False, is_ultrametric=False, witness=w)

    strong = _kernels.strong_triangle_witness(d, tol)
    iso = _kernels.isosceles_witness(d, tol)
    if strong[0] < 0 and iso[0] < 0:
        return ValidationReport(is_metric=True, is_ultrametric=True, witness=None)

    # not ultrametric: pick the earliest violation of either criterion
    cand = []
    if strong[0] >= 0:
        i, j, k = strong
        cand.append(((i, j, k, 0), Witness("strong_triangle", (i, j, k),
                                           (float(d[i, j]), float(d[i, k]), float(d[k, j])))))
    if iso[0] >= 0:
        i, j, k, orient = iso
        cand.append(((i, j, k, 1 + orient), Witness("isosceles", (i, j, k),
                                                    (float(d[i, j]), float(d[i, k]), float(d[j, k])))))
    cand.sort(key=lambda t: t[0])
    witness = cand[0][1]

    tri = _kernels.triangle_witness(d, tol)
    if tri[0] >= 0:
        i, j, k = tri
        witness = Witness("triangle", (i, j, k),
                          (float(d[i, j]), float(d[i, k]), float(d[k, j])))
        return ValidationReport(is_metric=False, is_ultrametric=False, witness=witness)
    return ValidationReport(is_metric=True, is_ultrametric=False, witness=witness)


def ball(m: DistanceMatrix, x: int, r: float, kind: str = "closed") -> Ball:
    """Members of the open or closed ball around point index x.

    Open balls need r > 0 (an empty ball is not a ball here); closed
    balls allow r = 0 and always contain their center.
    """
    if kind not in ("open", "closed"):
        raise ValueError("kind must be 'open' or 'closed', got %r" % (kind,))
    if not 0 <= x < m.n:
        raise IndexError("point index %d out of range" % x)
    if r < 0:
        raise ValueError("negative radius %r" % (r,))
    if kind == "open" and r <= 0:
        raise ValueError("open ball needs a positive radius, got %r" % (r,))
    row = m.d[x]
    mask = row < r if kind == "open" else row <= r
    members = tuple(int(i) for i in np.flatnonzero(mask))
    return Ball(center=x, radius=float(r), kind=kind, members=members)


def diam(m: DistanceMatrix, s: Iterable[int]) -> float:
    """Largest pairwise distance within s (0.0 for a singleton)."""
    idx = sorted(set(int(i) for i in s))
    if not idx:
        raise ValueError("diameter of an empty set")
    for i in idx:
        if not 0 <= i < m.n:
            raise IndexError("point index %d out of range" % i)
    sub = m.d[np.ix_(idx, idx)]
    return float(sub.max())


def is_r_separated(m: DistanceMatrix, s: Iterable[int], r: float) -> bool:
    """True iff every distinct pair in s has distance strictly above r."""
    idx = sorted(set(int(i) for i in s))
    if len(idx) < 2:
        return True
    sub = m.d[np.ix_(idx, idx)]
    off = sub[~np.eye(len(idx), dtype=bool)]
    return bool((off > r).all())

"""Covering selection and tree-structural topology checkers.

Everything here is decision logic on top of the tree and matrix layers:
the Vitali-style greedy selection of disjoint balls, offspring counts,
total boundedness, per-level position counts, isolated branches with
the discrete/perfect verdicts, and three takes on the doubling
property (necessary offspring bound, two sufficient conditions, and an
exact brute force over critical radii for small spaces). Explicit-tree
verdicts are exact; generator-tree verdicts only ever speak about the
probed horizon and are labelled that way in reports.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import _kernels
from .metric import DistanceMatrix, diam
from .sdz import RadiusSchedule
from .trees import (Branch, CapExceededError, CladeSpace, ExplicitTree,
                    GeneratorTree, Node, PrunedTree, sorted_branches)

DEFAULT_BRUTE_CAP = 16
DEFAULT_L_MAX = 8


@dataclass(frozen=True)
class BallRequest:
    """An open-ball request for the covering selection."""

    center: int
    radius: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ValueError("ball request needs a positive radius")


def request_members(m: DistanceMatrix, req: BallRequest) -> frozenset:
    if not 0 <= req.center < m.n:
        raise IndexError("request center %d out of range" % req.center)
    return frozenset(int(i) for i in np.flatnonzero(m.d[req.center] < req.radius))


def vitali_select(m: DistanceMatrix, c: Iterable[BallRequest]) -> tuple:
    """Greedy disjoint subfamily with the same union as the input balls.

    Requests realizing the same member set are deduplicated down to the
    least (center, radius) request. Selection walks realized diameters
    in descending order and keeps a ball iff it is disjoint from all
    balls kept so far; a dropped ball always intersects a kept ball of
    at least its own diameter and is then contained in it, so the union
    is preserved.
    """
    by_members = {}
    for req in sorted(c, key=lambda q: (q.center, q.radius)):
        mem = request_members(m, req)
        if mem and mem not in by_members:
            by_members[mem] = req
    order = sorted(by_members,
                   key=lambda mem: (-diam(m, mem), min(mem)))
    kept = []
    kept_sets = []
    for mem in order:
        if all(mem.isdisjoint(s) for s in kept_sets):
            kept.append(by_members[mem])
            kept_sets.append(mem)
    return tuple(kept)


@dataclass(frozen=True)
class OffspringCounts:
    per_level: tuple
    overall: int


def _explicit_levels(t: ExplicitTree):
    """Nodes per depth, stalks carried downward as single continuations."""
    levels = []
    frontier = [t.root]
    while frontier:
        levels.append(frontier)
        nxt = []
        for nd in frontier:
            if not nd.stalk:
                nxt.extend(sub for _, sub in nd.children)
        if all(nd.stalk for nd in frontier):
            break
        frontier = nxt
    return levels


def max_offspring(t: PrunedTree) -> OffspringCounts:
    """Widest split per level and overall; stalk positions count 1."""
    per = []
    if isinstance(t, ExplicitTree):
        for level in _explicit_levels(t):
            per.append(max(1 if nd.stalk else len(nd.children) for nd in level))
    else:
        frontier = [()]
        for _ in range(t.horizon):
            width = 1
            nxt = []
            for pos in frontier:
                kids = t.children(pos)
                width = max(width, len(kids))
                nxt.extend(pos + (k,) for k in kids)
            per.append(width)
            frontier = nxt
    return OffspringCounts(per_level=tuple(per), overall=max(per))


@dataclass(frozen=True)
class BoundednessVerdict:
    bounded: bool
    witness: Optional[tuple]          # position overflowing the child cap
    exact: bool

    def __bool__(self):
        return self.bounded


def is_totally_bounded(t: PrunedTree) -> BoundednessVerdict:
    """Finitely many children everywhere (probed to the horizon).

    Explicit trees store finite structure, so the verdict is exact; a
    generator position whose child enumeration overflows the cap is
    returned as the failure witness.
    """
    if isinstance(t, ExplicitTree):
        return BoundednessVerdict(bounded=True, witness=None, exact=True)
    frontier = [()]
    for _ in range(t.horizon):
        nxt = []
        for pos in frontier:
            try:
                kids = t.children(pos)
            except CapExceededError as exc:
                return BoundednessVerdict(bounded=False, witness=exc.position, exact=False)
            nxt.extend(pos + (k,) for k in kids)
        frontier = nxt
    return BoundednessVerdict(bounded=True, witness=None, exact=False)


def count_positions(t: PrunedTree, depth: Optional[int] = None) -> tuple:
    """Number of tree positions at each level 0..depth.

    Stalk nodes keep contributing one position per deeper level, so for
    an explicit tree the counts become constant (the branch count) once
    everything has split; the default depth is where that happens.
    """
    if isinstance(t, ExplicitTree):
        levels = _explicit_levels(t)
        if depth is None:
            depth = len(levels) - 1
        counts = []
        carried = 0                    # stalks opened at earlier levels
        for k in range(depth + 1):
            if k < len(levels):
                counts.append(len(levels[k]) + carried)
                carried += sum(1 for nd in levels[k] if nd.stalk)
            else:
                counts.append(counts[-1])
        return tuple(counts)
    if depth is None:
        depth = t.horizon
    if depth > t.horizon:
        raise ValueError("depth %d exceeds the horizon %d" % (depth, t.horizon))
    counts = [1]
    frontier = [()]
    for _ in range(depth):
        nxt = []
        for pos in frontier:
            nxt.extend(pos + (k,) for k in t.children(pos))
        counts.append(len(nxt))
        frontier = nxt
    return tuple(counts)


def isolated_branches(t: PrunedTree) -> frozenset:
    """Branches with a prefix through which no other branch passes.

    Every stalk-terminated branch of an explicit tree qualifies (the
    stalk itself is the single-child tail). For a generator tree the
    test runs on horizon truncations: a branch is isolated up to the
    horizon iff some proper prefix of it carries exactly one canopy
    branch.
    """
    cano = t.canopy()
    if isinstance(t, ExplicitTree):
        return cano
    through = {}
    for b in cano:
        for k in range(len(b.prefix)):
            key = b.prefix[:k]
            through[key] = through.get(key, 0) + 1
    out = set()
    for b in cano:
        if any(through[b.prefix[:k]] == 1 for k in range(len(b.prefix))):
            out.add(b)
    return frozenset(out)


def is_discrete(t: PrunedTree) -> bool:
    return isolated_branches(t) == t.canopy()


def is_perfect(t: PrunedTree) -> bool:
    return not isolated_branches(t)


def doubling_necessary(t: PrunedTree, d_const: int) -> bool:
    """Necessary condition: a doubling tree has at most D children anywhere."""
    if d_const < 1:
        raise ValueError("doubling constant must be at least 1")
    return max_offspring(t).overall <= d_const


def doubling_sufficient(t: PrunedTree, s: Optional[RadiusSchedule],
                        l_max: int = DEFAULT_L_MAX) -> Optional[int]:
    """Constant from one of the two sufficient conditions, else None.

    Condition 1: after some depth every position has a single child; the
    space is finite and its point count is a doubling constant. Condition
    2: the schedule is all positive and some lag l <= l_max halves it,
    r_k / r_(k+l) >= 2 for every k; then M^(l+1) works. None means
    inconclusive, never "not doubling".
    """
    counts = max_offspring(t)
    if isinstance(t, ExplicitTree):
        return len(t.canopy())
    per = counts.per_level
    for k1 in range(len(per)):
        if all(w == 1 for w in per[k1:]):
            return len(t.canopy())
    if s is None or s.zero_tail or not s.radii:
        return None
    radii = s.radii
    m_const = counts.overall
    for lag in range(1, l_max + 1):
        if len(radii) <= lag:
            break
        if all(radii[k] / radii[k + lag] >= 2.0 for k in range(len(radii) - lag)):
            return m_const ** (lag + 1)
    return None


def critical_radii(m: DistanceMatrix) -> tuple:
    """Radii at which covering configurations can change.

    Ball families are piecewise constant in r between realized values
    and their doubles, so probing those plus the midpoints of
    consecutive ones decides the doubling constant exactly.
    """
    base = sorted(set(m.values) | set(2.0 * v for v in m.values))
    mids = [(base[i] + base[i + 1]) / 2.0 for i in range(len(base) - 1)]
    return tuple(sorted(set(base) | set(mids)))


def doubling_bruteforce(m: DistanceMatrix, cap: int = DEFAULT_BRUTE_CAP) -> int:
    """Exact minimal doubling constant of a finite space.

    For each center x and critical radius r, the closed r/2-balls inside
    B(x, r) are exactly the d <= r/2 classes, so the minimal cover size
    is the class count; the answer is the worst case over all probes.
    """
    if m.n > cap:
        raise CapExceededError("brute force capped at n=%d, got n=%d" % (cap, m.n))
    radii = np.array([v for v in critical_radii(m) if v > 0.0], dtype=np.float64)
    if radii.size == 0:
        return 1
    count, _, _ = _kernels.doubling_cover_worst(np.asarray(m.d), radii)
    return max(int(count), 1)


@dataclass(frozen=True)
class AnalysisReport:
    totally_bounded: BoundednessVerdict
    separable: str
    position_counts: tuple
    discrete: bool
    perfect: bool
    isolated: tuple                       # sorted branch prefixes
    doubling_necessary_bound: int
    doubling_sufficient: Optional[int]
    doubling_bruteforce: Optional[int]
    bruteforce_note: Optional[str]
    horizon: Optional[int]                # None for exact (explicit) verdicts

    def scope(self) -> str:
        return "exact" if self.horizon is None else "up to horizon %d" % self.horizon

    def to_json_dict(self) -> dict:
        scope = self.scope()

        def scoped(verdict, **extra):
            doc = {"verdict": verdict, "scope": scope}
            doc.update(extra)
            return doc

        doubling = {
            "necessary_bound": scoped(self.doubling_necessary_bound),
            "sufficient": scoped(self.doubling_sufficient),
            "bruteforce": {"verdict": self.doubling_bruteforce, "scope": "exact"},
        }
        if self.bruteforce_note:
            doubling["bruteforce"]["note"] = self.bruteforce_note
        return {
            "schema_version": 1,
            "totally_bounded": scoped(self.totally_bounded.bounded,
                                      witness=_position_doc(self.totally_bounded.witness)),
            "separable": scoped(self.separable, position_counts=list(self.position_counts)),
            "discrete": scoped(self.discrete),
            "perfect": scoped(self.perfect),
            "isolated": scoped([_position_doc(p) for p in self.isolated]),
            "doubling": doubling,
        }


def _position_doc(pos):
    if pos is None:
        return None
    return [x if isinstance(x, int) else str(x) for x in pos]


def _isolated_prefixes(t: PrunedTree) -> tuple:
    return tuple(b.prefix for b in sorted_branches(isolated_branches(t)))


def analyze(m: DistanceMatrix, cap_n: int = DEFAULT_BRUTE_CAP,
            l_max: int = DEFAULT_L_MAX) -> AnalysisReport:
    """Full report for a finite ultrametric space via its representing tree."""
    from .represent import build
    rt, _ = build(m)
    t = rt.tree
    iso = _isolated_prefixes(t)
    if m.n <= cap_n:
        brute = doubling_bruteforce(m, cap=cap_n)
        note = None
    else:
        brute = None
        note = "skipped: n=%d exceeds cap %d" % (m.n, cap_n)
    return AnalysisReport(
        totally_bounded=is_totally_bounded(t),
        separable="countable (finite)",
        position_counts=count_positions(t),
        discrete=is_discrete(t),
        perfect=is_perfect(t),
        isolated=iso,
        doubling_necessary_bound=max_offspring(t).overall,
        doubling_sufficient=doubling_sufficient(t, rt.schedule, l_max=l_max),
        doubling_bruteforce=brute,
        bruteforce_note=note,
        horizon=None,
    )


def analyze_tree(t: PrunedTree, schedule: Optional[RadiusSchedule] = None,
                 l_max: int = DEFAULT_L_MAX) -> AnalysisReport:
    """Tree-structural report; no matrix, so no brute-force doubling."""
    tb = is_totally_bounded(t)
    horizon = None if isinstance(t, ExplicitTree) else t.horizon
    if tb.bounded:
        counts = count_positions(t)
        separable = ("countable (finite)" if horizon is None
                     else "countable up to horizon %d" % horizon)
        iso = _isolated_prefixes(t)
        disc = is_discrete(t)
        perf = is_perfect(t)
        suff = doubling_sufficient(t, schedule, l_max=l_max)
        off = max_offspring(t).overall
    else:
        counts = ()
        separable = "level overflow at position %r" % (tb.witness,)
        iso = ()
        disc = False
        perf = False
        suff = None
        off = 0
    return AnalysisReport(
        totally_bounded=tb,
        separable=separable,
        position_counts=counts,
        discrete=disc,
        perfect=perf,
        isolated=iso,
        doubling_necessary_bound=off,
        doubling_sufficient=suff,
        doubling_bruteforce=None,
        bruteforce_note=None,
        horizon=horizon,
    )

"""Representing trees for finite ultrametric spaces.

The tree of a validated ultrametric has one node per closed ball of
radius r_k (level k), children ordered by their smallest point index,
singleton balls compressed into stalks. Branch entry k holds the ball
of radius r_{k+1}, so the tree distance of two point branches is read
off the radius schedule at their first differing entry and equals the
original distance exactly; verify_isometry checks that pair by pair
with exact float comparison.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .metric import DistanceMatrix, validate
from .sdz import NotUltrametricError, RadiusSchedule, radius_schedule
from .trees import (Branch, CladeSpace, ExplicitTree, GeneratorTree, Node,
                    PrunedTree, sorted_branches)


class BuildError(ValueError):
    """The matrix cannot be represented (not a validated ultrametric)."""


@dataclass(frozen=True)
class RepresentingTree:
    """Explicit tree of closed balls plus the radius schedule.

    level_sets[k] maps a node label (smallest member index) to the ball
    member set at level k; level 0 is the whole space. Levels at and
    below stored_levels are all singletons.
    """

    tree: ExplicitTree
    schedule: RadiusSchedule
    level_sets: tuple
    labels: tuple

    @property
    def stored_levels(self) -> int:
        return len(self.level_sets) - 1

    def ball_of(self, level: int, label: int) -> frozenset:
        """Members of the level-k ball containing point `label`.

        Beyond the stored levels every ball is a singleton, so deeper
        queries resolve through the stalk continuation.
        """
        if level < 0:
            raise IndexError("negative level")
        k = min(level, self.stored_levels)
        for lab, members in self.level_sets[k].items():
            if label in members:
                return members
        raise KeyError("point %r not present at level %d" % (label, level))


@dataclass(frozen=True)
class RepresentedClade:
    """The point set of the space, seen as branches of its tree."""

    clade: CladeSpace
    phi: tuple                     # phi[i] is the branch of point i

    def branch_of(self, i: int) -> Branch:
        return self.phi[i]


def _merge_levels(m: DistanceMatrix):
    """Union-find sweep over ascending positive radii.

    Returns per-level label arrays ids[k][i] = smallest index in the
    closed r_k-ball around i, for k = 1 .. K, where K is the first level
    at which every ball is a singleton.
    """
    n = m.n
    radii = [v for v in m.values if v > 0.0]          # ascending
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            lo, hi = (ra, rb) if ra < rb else (rb, ra)
            parent[hi] = lo

    pairs = sorted(((float(m.d[i, j]), i, j) for i in range(n) for j in range(i + 1, n)))
    snapshots = []                                    # ascending threshold order
    pos = 0
    thresholds = ([0.0] + radii[:-1]) if radii else [0.0]
    for t in thresholds:
        while pos < len(pairs) and pairs[pos][0] <= t:
            union(pairs[pos][1], pairs[pos][2])
            pos += 1
        snapshots.append([find(i) for i in range(n)])
    snapshots.reverse()                               # now level 1 first, level K last
    return snapshots


def build(m: DistanceMatrix):
    """Representing tree and represented clade of a validated ultrametric."""
    report = validate(m)
    if not report.is_ultrametric:
        raise BuildError("matrix is not ultrametric: witness %r" % (report.witness,))
    n = m.n
    schedule = radius_schedule(m, _prevalidated=True)
    snapshots = _merge_levels(m)
    big_k = len(snapshots)                            # levels 1..K stored

    level_sets = []
    all_points = frozenset(range(n))
    level_sets.append({0: all_points})
    for ids in snapshots:
        sets = {}
        for i, lab in enumerate(ids):
            sets.setdefault(lab, set())
            sets[lab].add(i)
        level_sets.append({lab: frozenset(v) for lab, v in sets.items()})

    def build_node(level: int, members: frozenset) -> Node:
        if len(members) == 1:
            return Node(children=(), stalk=True)
        ids = snapshots[level]                        # snapshot for level level+1
        groups = {}
        for i in sorted(members):
            groups.setdefault(ids[i], set()).add(i)
        pairs = tuple((lab, build_node(level + 1, frozenset(g)))
                      for lab, g in sorted(groups.items()))
        return Node(children=pairs)

    root = build_node(0, all_points)
    tree = ExplicitTree(root=root)

    phi = []
    for i in range(n):
        prefix = []
        if n > 1:
            for k in range(big_k):
                lab = snapshots[k][i]
                prefix.append(lab)
                if len(level_sets[k + 1][lab]) == 1:
                    break
        phi.append(Branch(tree=tree, prefix=tuple(prefix)))

    rt = RepresentingTree(tree=tree, schedule=schedule,
                          level_sets=tuple(level_sets), labels=m.labels)
    clade = CladeSpace(tree=tree, members=frozenset(phi))
    rc = RepresentedClade(clade=clade, phi=tuple(phi))
    return rt, rc


def d_T(a: Branch, b: Branch, s: RadiusSchedule) -> float:
    """Tree distance: schedule value at the first differing branch entry."""
    if a.tree != b.tree:
        raise ValueError("branches belong to different trees")
    if a == b:
        return 0.0
    limit = max(len(a.prefix), len(b.prefix))
    for i in range(limit):
        if a.entry(i) != b.entry(i):
            return s.r(i)
    return 0.0


@dataclass(frozen=True)
class IsometryResult:
    ok: bool
    failing_pair: Optional[tuple] = None              # (i, j, d, d_T)

    def __bool__(self):
        return self.ok


def _entries_array(rc: RepresentedClade, n: int) -> np.ndarray:
    depth = max(len(b.prefix) for b in rc.phi)
    entries = np.zeros((depth, n), dtype=np.int64)
    for i, b in enumerate(rc.phi):
        p = b.prefix
        for k in range(depth):
            entries[k, i] = p[k] if k < len(p) else p[-1]
    return entries


def verify_isometry(m: DistanceMatrix, built=None) -> IsometryResult:
    """Exact check that d_T(phi(x), phi(y)) == d(x, y) for every pair.

    Stalk continuation repeats the singleton label, which is distinct
    between distinct points, so padding branch prefixes with their last
    label preserves the first differing entry.
    """
    if built is None:
        built = build(m)
    rt, rc = built
    n = m.n
    if n == 1:
        return IsometryResult(ok=True)
    entries = _entries_array(rc, n)
    sched = np.array([rt.schedule.r(k) for k in range(entries.shape[0])], dtype=np.float64)
    i, j = _kernels.isometry_mismatch(entries, sched, np.asarray(m.d))
    if i < 0:
        return IsometryResult(ok=True)
    return IsometryResult(ok=False,
                          failing_pair=(i, j, float(m.d[i, j]),
                                        float(d_T(rc.phi[i], rc.phi[j], rt.schedule))))


def completion(t: PrunedTree, p: CladeSpace):
    """Branches of t missing from the clade: (added set, is_complete).

    Explicit trees are compared exactly. For a generator tree the canopy
    is probed at the horizon; a stalk-asserted member covers a truncated
    canopy branch when the branch follows the member's unique child
    continuation, so the verdict is "up to horizon".
    """
    if p.tree != t:
        raise ValueError("clade belongs to a different tree")
    full = t.canopy()
    if isinstance(t, ExplicitTree):
        added = frozenset(full - p.members)
        return added, not added
    added = set()
    for b in full:
        if not any(_covers(m_, b, t) for m_ in p.members):
            added.add(b)
    return frozenset(added), not added


def _covers(member: Branch, b: Branch, t: GeneratorTree) -> bool:
    if member.truncated:
        return member.prefix == b.prefix
    k = len(member.prefix)
    if b.prefix[:k] != member.prefix:
        return False
    pos = member.prefix
    for i in range(k, len(b.prefix)):
        kids = t.children(pos)
        if len(kids) != 1 or kids[0] != b.prefix[i]:
            return False
        pos = pos + (b.prefix[i],)
    return True


def _newick_label(s: str) -> str:
    specials = set("(),:;'[] \t")
    if any(c in specials for c in s):
        return "'%s'" % s.replace("'", "''")
    return s


def _format_span(x: float) -> str:
    if x == int(x):
        return str(int(x))
    return repr(x)


def export_newick(rt: RepresentingTree) -> str:
    """Newick text with edge lengths from radius differences.

    An inner node at level k hangs below its parent by r_{k-1} - r_k; a
    leaf (stalk, a singleton ball) reaches all the way down, so its edge
    is the full parent-level radius. A one-point space has no positive
    radius and uses a default span of 1.
    """
    sched = rt.schedule
    r0 = sched.radii[0] if sched.radii else 1.0

    def radius(level: int) -> float:
        if level == 0:
            return r0
        return sched.r(level)

    def render(nd: Node, level: int, point: int) -> str:
        if nd.stalk:
            name = _newick_label(rt.labels[point])
            return "%s:%s" % (name, _format_span(radius(level - 1)))
        parts = [render(sub, level + 1, lbl) for lbl, sub in nd.children]
        return "(%s):%s" % (",".join(parts), _format_span(radius(level - 1) - radius(level)))

    root = rt.tree.root
    if root.stalk:
        return "(%s:%s);" % (_newick_label(rt.labels[0]), _format_span(r0))
    parts = [render(sub, 1, lbl) for lbl, sub in root.children]
    return "(%s);" % ",".join(parts)

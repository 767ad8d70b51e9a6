"""Example spaces and the seeded random instance generator.

The generator samples a stalk-free split tree (every internal node has
at least two children) with strictly decreasing dyadic level radii and
reads distances off the lowest common node, so its output is an
ultrametric by construction and deterministic per seed via
random.Random, whose sequence is stable across platforms.
"""
from __future__ import annotations

import math
import random

from .metric import DistanceMatrix, from_entries
from .sdz import RadiusSchedule
from .trees import Branch, CladeSpace, ExplicitTree, GeneratorTree, node, stalk_node


def x4() -> DistanceMatrix:
    """Four points a, b, c, d at distances 1/4, 1/2 and 1."""
    d = [
        [0.0, 0.25, 0.5, 1.0],
        [0.25, 0.0, 0.5, 1.0],
        [0.5, 0.5, 0.0, 1.0],
        [1.0, 1.0, 1.0, 0.0],
    ]
    return from_entries(d, labels=("a", "b", "c", "d"), snap=False)


def one_point() -> DistanceMatrix:
    return from_entries([[0.0]], labels=("a",), snap=False)


def two_point(r: float = 1.0) -> DistanceMatrix:
    return from_entries([[0.0, r], [r, 0.0]], labels=("a", "b"), snap=False)


def xgeo_matrix(n_points: int) -> DistanceMatrix:
    """Points p_0..p_(n-1) with d(p_i, p_j) = 2^-min(i, j)."""
    if n_points < 1:
        raise ValueError("need at least one point")
    d = [[0.0 if i == j else math.ldexp(1.0, -min(i, j)) for j in range(n_points)]
         for i in range(n_points)]
    labels = tuple("p%d" % i for i in range(n_points))
    return from_entries(d, labels=labels, snap=False)


def _xgeo_children(pos: tuple) -> tuple:
    """Children in the geometric tail tree.

    The root is the whole tail; the level-k tail splits into the
    singleton {p_k} (label k, a single-child chain from there on) and
    the deeper tail (label k+1).
    """
    state = ("tail", 0)
    for lbl in pos:
        kind, k = state
        if kind == "tail":
            if lbl == k:
                state = ("pt", k)
            elif lbl == k + 1:
                state = ("tail", k + 1)
            else:
                raise KeyError("invalid step %r below a level-%d tail" % (lbl, k))
        else:
            if lbl != k:
                raise KeyError("invalid step %r on the p_%d chain" % (lbl, k))
    kind, k = state
    if kind == "tail":
        return (k, k + 1)
    return (k,)


def xgeo_tree(horizon: int) -> GeneratorTree:
    """Generator tree whose canopy is {p_0, p_1, ...} plus the tail limit."""
    return GeneratorTree(children_fn=_xgeo_children, horizon=horizon)


def xgeo_schedule(horizon: int) -> RadiusSchedule:
    return RadiusSchedule(radii=tuple(math.ldexp(1.0, -k) for k in range(horizon + 1)),
                          zero_tail=False)


def xgeo_point_branch(t: GeneratorTree, n: int) -> Branch:
    """The branch of p_n: down the tails, then onto the singleton chain."""
    prefix = tuple(range(1, n + 1)) + (n,)
    return Branch(tree=t, prefix=prefix)


def xgeo_point_clade(t: GeneratorTree) -> CladeSpace:
    """All point branches visible at the horizon; the tail limit is absent."""
    members = frozenset(xgeo_point_branch(t, n) for n in range(t.horizon))
    return CladeSpace(tree=t, members=members)


def binary_tree(horizon: int) -> GeneratorTree:
    return GeneratorTree(children_fn=lambda pos: (0, 1), horizon=horizon)


def unary_tree() -> ExplicitTree:
    """Single stalk below the root: one branch, one point."""
    return ExplicitTree(root=node({0: stalk_node()}))


def _split_group(rng: random.Random, group: list, parts: int) -> list:
    idx = list(group)
    rng.shuffle(idx)
    cuts = sorted(rng.sample(range(1, len(idx)), parts - 1))
    return [idx[a:b] for a, b in zip([0] + cuts, cuts + [len(idx)])]


def random_ultrametric(n: int, levels: int, seed: int,
                       radii_kind: str = "dyadic") -> DistanceMatrix:
    """Random ultrametric on n labelled points, deterministic per seed.

    levels bounds the depth of the sampled split tree; radii are dyadic
    by default, or generic floats with radii_kind="uniform" (for
    exercising coercion on non-dyadic input).
    """
    if n < 1 or levels < 1:
        raise ValueError("need n >= 1 and levels >= 1")
    rng = random.Random(seed)
    if radii_kind == "dyadic":
        exp = rng.randint(-3, 2)
        radii = []
        for _ in range(levels):
            radii.append(math.ldexp(1.0, -exp))
            exp += rng.randint(1, 3)
    elif radii_kind == "uniform":
        while True:
            radii = sorted((rng.uniform(1e-3, 4.0) for _ in range(levels)), reverse=True)
            if len(set(radii)) == levels:
                break
    else:
        raise ValueError("radii_kind must be 'dyadic' or 'uniform'")

    d = [[0.0] * n for _ in range(n)]

    def fill(group: list, depth: int):
        if len(group) == 1:
            return
        if depth == levels - 1:
            parts = [[i] for i in group]
        else:
            width = rng.randint(2, len(group))
            parts = _split_group(rng, group, width)
        for a in range(len(parts)):
            for b in range(a + 1, len(parts)):
                for i in parts[a]:
                    for j in parts[b]:
                        d[i][j] = radii[depth]
                        d[j][i] = radii[depth]
        for part in parts:
            fill(part, depth + 1)

    fill(list(range(n)), 0)
    return from_entries(d, snap=False)

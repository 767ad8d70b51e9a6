"""Pruned trees, branches, canopies and the dyadic branch metric.

A tree position is a tuple of child labels read from the root. Explicit
trees store finite structure; an infinite tail of single-child steps is
compressed into one node carrying a stalk flag, and positions inside the
compressed tail use the synthetic STALK label. Generator trees describe
possibly infinite trees by a children function and are only ever probed
down to a finite horizon, so every verdict derived from one is labelled
"up to horizon h" by the callers.

The canopy of a tree is its set of branches. Branch objects either end
on a stalk (a fully determined infinite branch) or are truncated at the
horizon. d2 is the dyadic metric on branches: 2^-(m+1) where m is the
first differing entry index.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Union

DEFAULT_CHILD_CAP = 1 << 16


class HorizonError(RuntimeError):
    """An entry or verdict beyond the probed horizon was requested."""


class CapExceededError(RuntimeError):
    """Child enumeration or instance size exceeded a configured cap."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class _StalkLabel:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "STALK"

    def __reduce__(self):
        return (_StalkLabel, ())


STALK = _StalkLabel()


def label_key(label):
    """Total order on child labels: ints, then strings, then STALK."""
    if label is STALK:
        return (2, 0, "")
    if isinstance(label, int):
        return (0, label, "")
    return (1, 0, str(label))


@dataclass(frozen=True)
class Node:
    """One explicit tree node: sorted (label, child) pairs plus stalk flag.

    A stalk node has no stored children and stands for an infinite
    single-child continuation; a non-stalk node must have children, so
    every maximal chain of the tree is infinite.
    """

    children: tuple
    stalk: bool = False

    def __post_init__(self):
        if self.stalk and self.children:
            raise ValueError("stalk node cannot have stored children")
        if not self.stalk and not self.children:
            raise ValueError("non-stalk node needs at least one child")
        labels = [lbl for lbl, _ in self.children]
        if sorted(labels, key=label_key) != labels:
            raise ValueError("children must be sorted by label")
        if len(set(map(label_key, labels))) != len(labels):
            raise ValueError("duplicate child labels")

    def child(self, label) -> "Node":
        for lbl, sub in self.children:
            if lbl == label:
                return sub
        raise KeyError("no child labelled %r" % (label,))

    def labels(self) -> tuple:
        return tuple(lbl for lbl, _ in self.children)


def node(children=None, stalk: bool = False) -> Node:
    """Node constructor taking a {label: Node} mapping."""
    if children is None:
        children = {}
    pairs = tuple(sorted(children.items(), key=lambda kv: label_key(kv[0])))
    return Node(children=pairs, stalk=stalk)


def stalk_node() -> Node:
    return Node(children=(), stalk=True)


@dataclass(frozen=True)
class ExplicitTree:
    """Finite stored pruned tree."""

    root: Node
    explicit = True

    def node_at(self, pos) -> Node:
        cur = self.root
        for step in pos:
            if cur.stalk:
                if step is not STALK:
                    raise KeyError("position leaves the tree at %r" % (step,))
                continue
            cur = cur.child(step)
        return cur

    def is_position(self, pos) -> bool:
        try:
            self.node_at(pos)
            return True
        except KeyError:
            return False

    def children(self, pos) -> tuple:
        """Child labels below pos; stalk positions continue with (STALK,)."""
        cur = self.node_at(pos)
        if cur.stalk:
            return (STALK,)
        return cur.labels()

    def stored_depth(self) -> int:
        def depth(nd: Node) -> int:
            if nd.stalk:
                return 0
            return 1 + max(depth(sub) for _, sub in nd.children)
        return depth(self.root)

    def canopy(self) -> frozenset:
        out = []
        stack = [((), self.root)]
        while stack:
            pos, nd = stack.pop()
            if nd.stalk:
                out.append(Branch(tree=self, prefix=pos))
                continue
            for lbl, sub in nd.children:
                stack.append((pos + (lbl,), sub))
        return frozenset(out)


@dataclass(frozen=True)
class GeneratorTree:
    """Tree given by a children function, probed down to a horizon.

    children_fn maps a position tuple to an iterable of child labels; an
    empty result is rejected because pruned trees have no dead ends.
    Enumeration is capped: more than child_cap children at one position
    raises CapExceededError carrying that position.
    """

    children_fn: Callable
    horizon: int
    child_cap: int = DEFAULT_CHILD_CAP
    explicit = False

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.child_cap < 1:
            raise ValueError("child cap must be positive")

    def children(self, pos) -> tuple:
        out = []
        for lbl in self.children_fn(tuple(pos)):
            out.append(lbl)
            if len(out) > self.child_cap:
                raise CapExceededError("more than %d children at position %r"
                                       % (self.child_cap, tuple(pos)), position=tuple(pos))
        if not out:
            raise ValueError("generator returned no children at %r (dead end)" % (pos,))
        return tuple(sorted(out, key=label_key))

    def is_position(self, pos) -> bool:
        cur = ()
        for step in pos:
            if step not in self.children(cur):
                return False
            cur = cur + (step,)
        return True

    def canopy(self) -> frozenset:
        """All positions of length horizon, as truncated branches."""
        out = []
        stack = [()]
        while stack:
            pos = stack.pop()
            if len(pos) == self.horizon:
                out.append(Branch(tree=self, prefix=pos, truncated=True))
                continue
            for lbl in self.children(pos):
                stack.append(pos + (lbl,))
        return frozenset(out)


PrunedTree = Union[ExplicitTree, GeneratorTree]


@dataclass(frozen=True)
class Branch:
    """One branch: a label prefix, either stalk-terminated or truncated.

    A stalk-terminated branch is fully determined (beyond the prefix the
    tree continues through single children forever); a truncated branch
    records only what is visible at the horizon.
    """

    tree: PrunedTree
    prefix: tuple
    truncated: bool = False

    def __post_init__(self):
        if self.truncated and isinstance(self.tree, ExplicitTree):
            raise ValueError("explicit-tree branches are never truncated")

    def entry(self, i: int):
        if i < len(self.prefix):
            return self.prefix[i]
        if self.truncated:
            raise HorizonError("entry %d is beyond the truncation at %d" % (i, len(self.prefix)))
        if isinstance(self.tree, ExplicitTree):
            return STALK
        # stalk-asserted branch of a generator tree: follow the unique child
        pos = self.prefix
        for depth in range(len(self.prefix), i + 1):
            kids = self.tree.children(pos)
            if len(kids) != 1:
                raise ValueError("branch assertion fails: %r has %d children"
                                 % (pos, len(kids)))
            pos = pos + (kids[0],)
        return pos[i]

    def sort_key(self):
        return tuple(label_key(x) for x in self.prefix) + ((3, 0, "") if self.truncated else ())


def sorted_branches(branches: Iterable[Branch]) -> list:
    return sorted(branches, key=Branch.sort_key)


def _check_same_tree(x: Branch, y: Branch):
    if x.tree != y.tree:
        raise ValueError("branches belong to different trees")


def d2(x: Branch, y: Branch) -> float:
    """Dyadic branch distance 2^-(m+1), m the first differing entry.

    Truncated branches that agree on their whole visible prefix get 0.0;
    that is only a verdict up to the horizon.
    """
    _check_same_tree(x, y)
    if x.prefix == y.prefix and x.truncated == y.truncated:
        return 0.0
    limit = max(len(x.prefix), len(y.prefix))
    for i in range(limit + 1):
        try:
            a = x.entry(i)
            b = y.entry(i)
        except HorizonError:
            return 0.0
        if label_key(a) != label_key(b):
            return 2.0 ** (-(i + 1))
    return 0.0


@dataclass(frozen=True)
class Subtree:
    """Positions comparable to an anchor: its ancestors and descendants."""

    tree: PrunedTree
    anchor: tuple

    def canopy(self) -> frozenset:
        got = frozenset(b for b in self.tree.canopy() if _passes_through(b, self.anchor))
        return got


def _passes_through(b: Branch, pos) -> bool:
    try:
        return all(label_key(b.entry(i)) == label_key(pos[i]) for i in range(len(pos)))
    except HorizonError:
        return False


def children(t: PrunedTree, p) -> tuple:
    return t.children(tuple(p))


def subtree_at(t: PrunedTree, p) -> Subtree:
    p = tuple(p)
    if not t.is_position(p):
        raise KeyError("%r is not a position of the tree" % (p,))
    return Subtree(tree=t, anchor=p)


def canopy(t) -> frozenset:
    """Branch set of a tree or subtree; truncated for generator trees."""
    return t.canopy()


def basis_ball(t: PrunedTree, p) -> frozenset:
    """Canopy of the subtree at p, checked to equal the open d2-ball of
    radius 2^-len(p) around any branch through p."""
    p = tuple(p)
    sub = subtree_at(t, p).canopy()
    if sub:
        rep = sorted_branches(sub)[0]
        r = 2.0 ** (-len(p))
        via_metric = frozenset(b for b in t.canopy() if d2(rep, b) < r)
        assert via_metric == sub, "subtree canopy disagrees with the d2 ball"
    return sub


@dataclass(frozen=True)
class CladeSpace:
    """A nonempty set of branches of one tree, metrized by d2."""

    tree: PrunedTree
    members: frozenset

    def __post_init__(self):
        if not self.members:
            raise ValueError("clade needs at least one member branch")
        for b in self.members:
            if b.tree != self.tree:
                raise ValueError("member branch belongs to a different tree")
            _validate_member(self.tree, b)


def _validate_member(t: PrunedTree, b: Branch):
    if isinstance(t, ExplicitTree):
        if any(x is STALK for x in b.prefix):
            raise ValueError("canonical branch prefixes stop at the first stalk node")
        nd = t.node_at(b.prefix)
        if not nd.stalk:
            raise ValueError("branch prefix %r does not end on a stalk" % (b.prefix,))
    else:
        if len(b.prefix) > t.horizon:
            raise ValueError("member prefix is longer than the horizon")
        if not t.is_position(b.prefix):
            raise ValueError("%r is not a position of the tree" % (b.prefix,))


def is_subcanopy(t: PrunedTree, p: CladeSpace) -> bool:
    """Whether the member set equals the canopy of its own prefix closure.

    True exactly when the members are a closed subset of the canopy.
    Explicit member sets are finite, hence always closed. Generator-tree
    verdicts hold up to the horizon: a truncated member shorter than the
    horizon is a bare prefix whose closure pulls in every visible
    continuation, so such a member set is closed only if it already
    lists those continuations.
    """
    if p.tree != t:
        raise ValueError("clade belongs to a different tree")
    return closure_canopy(t, p.members) == p.members


def closure_canopy(t: PrunedTree, members: frozenset) -> frozenset:
    """Canopy of the smallest pruned subtree of t containing the members.

    Explicit branches are their own closure (a finite point set). In a
    generator tree, up to the horizon: a stalk-asserted member pins one
    chain and contributes itself, with the single-child assertion probed
    down to the horizon; a truncated member is a bare prefix, and a
    pruned tree must extend it, so every visible continuation through t
    joins the closure.
    """
    out = set()
    for b in members:
        _validate_member(t, b)
        if isinstance(t, ExplicitTree):
            out.add(b)
        elif not b.truncated:
            if len(b.prefix) < t.horizon:
                b.entry(t.horizon - 1)
            out.add(b)
        elif len(b.prefix) == t.horizon:
            out.add(b)
        else:
            stack = [b.prefix]
            while stack:
                pos = stack.pop()
                if len(pos) == t.horizon:
                    out.add(Branch(tree=t, prefix=pos, truncated=True))
                    continue
                for lbl in t.children(pos):
                    stack.append(pos + (lbl,))
    return frozenset(out)

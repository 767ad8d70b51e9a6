"""Second-opinion computations for the test suite.

Everything here recomputes results straight from raw distance entries or
raw tree structure with the dumbest viable algorithm, so that library
outputs are checked against an independent reconstruction instead of
against themselves.
"""
import itertools

TOL = 1e-12


def brute_validate(d, tol=TOL):
    """(is_metric, is_ultrametric) by plain triple enumeration."""
    n = len(d)
    identity = all(d[i][i] == 0.0 for i in range(n)) and all(
        d[i][j] > 0.0 for i in range(n) for j in range(n) if i != j)
    triangle = True
    strong = True
    for i, j, k in itertools.product(range(n), repeat=3):
        if d[i][j] > d[i][k] + d[k][j] + tol:
            triangle = False
        if d[i][j] > max(d[i][k], d[k][j]) + tol:
            strong = False
    return identity and triangle, identity and strong


def brute_isosceles_ok(d, tol=TOL):
    """Every triple, both orientations: the two larger sides are equal."""
    n = len(d)
    for i, j, k in itertools.permutations(range(n), 3):
        if d[i][j] < d[i][k] - tol and abs(d[j][k] - d[i][k]) > tol:
            return False
    return True


def brute_ball(d, x, r, kind="closed"):
    if kind == "closed":
        return frozenset(y for y in range(len(d)) if d[x][y] <= r)
    return frozenset(y for y in range(len(d)) if d[x][y] < r)


def brute_diam(d, members):
    members = list(members)
    return max((d[i][j] for i in members for j in members), default=0.0)


def brute_criticals(values):
    """im d, doubled values, and midpoints of consecutive points of that
    union; covering configurations only change at these radii."""
    pool = sorted(set(values) | set(2.0 * v for v in values))
    mids = [(a + b) / 2.0 for a, b in zip(pool, pool[1:])]
    return sorted(set(pool) | set(mids))


def disjoint_cover_exists(member_sets):
    """Exhaustive: can a pairwise-disjoint subfamily reach the full union.

    Bitmask reachability over disjoint picks; exponential but the tests
    keep the family at twelve balls or fewer.
    """
    masks = []
    for s in member_sets:
        m = 0
        for i in s:
            m |= 1 << i
        masks.append(m)
    total = 0
    for m in masks:
        total |= m
    reach = {0}
    for m in masks:
        reach |= {u | m for u in reach if u & m == 0}
    return total in reach


def component_cover_count(d, x, r):
    """Minimal closed-(r/2)-ball cover of the closed r-ball, recomputed.

    Connected components of the "within r/2" graph on the ball give a
    feasible cover; the count is also a lower bound because any half
    ball that met two components would merge them. Both directions are
    verified on the instance itself rather than assumed.
    """
    members = sorted(brute_ball(d, x, r))
    inside = set(members)
    half = r / 2.0
    comps = []
    seen = set()
    for start in members:
        if start in seen:
            continue
        comp = {start}
        frontier = [start]
        while frontier:
            y = frontier.pop()
            for z in members:
                if z not in comp and d[y][z] <= half:
                    comp.add(z)
                    frontier.append(z)
        seen |= comp
        comps.append(comp)
    for comp in comps:
        for y in comp:
            got = brute_ball(d, y, half) & inside
            if got != comp:
                raise AssertionError("component is not a half-radius ball")
    n = len(d)
    for z1 in members:
        for z2 in members:
            if any(d[c][z1] <= half and d[c][z2] <= half for c in range(n)):
                if d[z1][z2] > half:
                    raise AssertionError("half balls are not equivalence classes")
    return len(comps)


def visible_prefix(t, branch, depth):
    """Entries of a branch down to depth, as far as they are determined."""
    out = []
    for i in range(depth):
        if branch.truncated and i >= len(branch.prefix):
            break
        out.append(branch.entry(i))
    return tuple(out)


def closure_visible_oracle(t, members, horizon):
    """Horizon-length label tuples in the closure of the member set.

    A tuple is in the closure iff each of its prefixes is covered by a
    member: a truncated member covers its own prefixes and everything
    extending its prefix, a stalk-asserted member covers exactly the
    prefixes of its single visible chain.
    """
    def covered(q):
        for m in members:
            if m.truncated:
                k = min(len(q), len(m.prefix))
                if q[:k] == m.prefix[:k]:
                    return True
            else:
                vis = visible_prefix(t, m, horizon)
                if q == vis[:len(q)]:
                    return True
        return False

    out = set()
    stack = [()]
    while stack:
        pos = stack.pop()
        if not covered(pos):
            continue
        if len(pos) == horizon:
            out.add(pos)
            continue
        for lbl in t.children(pos):
            stack.append(pos + (lbl,))
    return frozenset(out)


def brute_isolated_visible(t, horizon):
    """Visible tuples of branches that own some finite prefix alone.

    A truncated branch may split below the horizon, so its full visible
    prefix is not isolation evidence; stalk-backed branches are pinned
    beyond their prefix and may use it.
    """
    rows = {}
    for b in t.canopy():
        rows[b] = visible_prefix(t, b, horizon)
    out = set()
    for b, row in rows.items():
        ks = range(len(row)) if b.truncated else range(len(row) + 1)
        for k in ks:
            sharing = sum(1 for other in rows.values() if other[:k] == row[:k])
            if sharing == 1:
                out.add(row)
                break
    return out

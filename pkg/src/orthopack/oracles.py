"""Brute-force reference deciders used by tests and the acceptance run.

Nothing here shares code with the solvers beyond the instance model and
``validate_packing``. Every routine is exponential and guarded against
inputs that would not finish.

Placement completeness: take any feasible packing and repeatedly push
boxes towards the origin, one direction at a time, until none can move.
Then each coordinate of a box is 0 or the far face ``x_i(c) + w_i(c)`` of a
box ``c`` it touches, so by induction it is a sum of sizes of other boxes
in that direction. Searching only those coordinates therefore misses no
feasible instance.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Sequence

from .model import Instance, validate_packing

MAX_BOXES = 8
MAX_EXTENT = 64


class OracleGuardError(ValueError):
    pass


def _normal_set(widths: Sequence[int], own: int, limit: int) -> list[int]:
    """Sums of subsets of ``widths`` (skipping index ``own``) that are <= limit."""
    sums = {0}
    for j, w in enumerate(widths):
        if j == own:
            continue
        sums |= {s + w for s in sums if s + w <= limit}
    return sorted(sums)


def brute_force_opp(instance: Instance, subset: Sequence[int] | None = None, W: Sequence[int] | None = None):
    """Return a packing dict if ``subset`` fits the container, else ``None``."""
    subset = list(range(instance.n)) if subset is None else sorted(subset)
    W = tuple(instance.W if W is None else W)
    d = len(W)
    if len(subset) > MAX_BOXES or max(W) > MAX_EXTENT:
        raise OracleGuardError(f"oracle limited to {MAX_BOXES} boxes and extents <= {MAX_EXTENT}")
    if not subset:
        return {}
    sizes = [instance.boxes[b].sizes for b in subset]
    if any(s[i] > W[i] for s in sizes for i in range(d)):
        return None
    if sum(math.prod(s) for s in sizes) > math.prod(W):
        return None
    # big boxes first; equal boxes get ordered positions to skip permutations
    order = sorted(range(len(subset)), key=lambda k: (-math.prod(sizes[k]), sizes[k]))
    cands = []
    for k in order:
        axes = [_normal_set([s[i] for s in sizes], k, W[i] - sizes[k][i]) for i in range(d)]
        cands.append(list(itertools.product(*axes)))
    pos: list[tuple[int, ...]] = []

    def clash(k: int, x: tuple[int, ...]) -> bool:
        w = sizes[order[k]]
        for j in range(k):
            y, v = pos[j], sizes[order[j]]
            if all(x[i] < y[i] + v[i] and y[i] < x[i] + w[i] for i in range(d)):
                return True
        return False

    def place(k: int) -> bool:
        if k == len(order):
            return True
        start = 0
        if k > 0 and sizes[order[k]] == sizes[order[k - 1]]:
            start = cands[k].index(pos[k - 1]) + 1 if pos[k - 1] in cands[k] else 0
        for x in cands[k][start:]:
            if not clash(k, x):
                pos.append(x)
                if place(k + 1):
                    return True
                pos.pop()
        return False

    if not place(0):
        return None
    packing = {subset[order[k]]: pos[k] for k in range(len(order))}
    check = instance.with_container(W, "decision")
    assert validate_packing(check, subset, packing) is None
    return packing


def brute_force_knapsack(values: Sequence[int], weights: Sequence[Fraction], lower: Sequence[int],
                         upper: Sequence[int], capacity: Fraction = Fraction(1)):
    """Exhaustive bounded knapsack; ``None`` when the lower bounds already overflow."""
    ranges = [range(lo, hi + 1) for lo, hi in zip(lower, upper)]
    if math.prod(len(r) for r in ranges) > 10**6:
        raise OracleGuardError("too many count vectors")
    best = None
    for xi in itertools.product(*ranges):
        if sum(w * x for w, x in zip(weights, xi)) <= capacity:
            val = sum(v * x for v, x in zip(values, xi))
            if best is None or val > best:
                best = val
    return best


def brute_force_okp(instance: Instance):
    """Optimal ``(value, counts, packing)`` by enumerating count vectors by value."""
    m = instance.m
    vectors = list(itertools.product(*[range(bt.count + 1) for bt in instance.types]))
    vectors.sort(key=lambda xi: -sum(x * bt.value for x, bt in zip(xi, instance.types)))
    infeasible: list[tuple[int, ...]] = []
    cap = math.prod(instance.W)
    for xi in vectors:
        if any(all(xi[t] >= f[t] for t in range(m)) for f in infeasible):
            continue
        if sum(x * bt.volume for x, bt in zip(xi, instance.types)) > cap:
            continue
        subset = instance.subset_for_counts(xi)
        packing = brute_force_opp(instance, subset)
        if packing is not None:
            return sum(x * bt.value for x, bt in zip(xi, instance.types)), xi, packing
        infeasible.append(xi)
    raise AssertionError("the empty set always fits")


def brute_force_strip(instance: Instance):
    """Minimum extent in the last direction, with a packing attaining it."""
    heights = [b.sizes[-1] for b in instance.boxes]
    for h in range(max(heights), sum(heights) + 1):
        W = instance.W[:-1] + (h,)
        packing = brute_force_opp(instance, None, W)
        if packing is not None:
            return h, packing
    raise AssertionError("stacking always fits")


# ---------------------------------------------------------------------------
# graphs


def brute_is_comparability(n: int, adj: Sequence[int]) -> bool:
    """Backtracking search for a transitive orientation."""
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if adj[u] >> v & 1]
    succ = [0] * n

    def ok(a: int, b: int) -> bool:
        # adding a -> b: every x -> a needs x -> b, every b -> y needs a -> y,
        # and only when those edges exist (and are not oriented backwards)
        for x in range(n):
            if succ[x] >> a & 1:
                if not adj[x] >> b & 1 or succ[b] >> x & 1:
                    return False
            if succ[b] >> x & 1:
                if not adj[a] >> x & 1 or succ[x] >> a & 1:
                    return False
        return True

    def go(k: int) -> bool:
        if k == len(edges):
            return all(not (succ[b] & ~succ[a]) for a in range(n) for b in range(n) if succ[a] >> b & 1)
        u, v = edges[k]
        for a, b in ((u, v), (v, u)):
            if ok(a, b):
                succ[a] |= 1 << b
                if go(k + 1):
                    return True
                succ[a] &= ~(1 << b)
        return False

    return go(0)


def brute_max_clique_weight(n: int, adj: Sequence[int], weights: Sequence[int]) -> int:
    best = 0
    for r in range(1, n + 1):
        for sub in itertools.combinations(range(n), r):
            if all(adj[a] >> b & 1 for a, b in itertools.combinations(sub, 2)):
                best = max(best, sum(weights[v] for v in sub))
    return best


def brute_has_induced_c4(n: int, adj: Sequence[int]) -> bool:
    for quad in itertools.combinations(range(n), 4):
        deg = [sum(adj[a] >> b & 1 for b in quad if b != a) for a in quad]
        m = sum(deg) // 2
        if m == 4 and all(x == 2 for x in deg):
            return True
    return False

"""Exact decision of orthogonal packing problems by packing-class search."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .bounds import stacking_criterion
from .graphs import bits, brute_max_weight_clique, greedy_clique, max_weight_chain, transitive_orientation
from .model import Instance, validate_packing
from .packing_class import (
    BRANCH, EXIT, FIX, MINUS, PLUS, SUCCESS,
    Problem, SearchInfo, box_classes, build_packing, check_p3, edges_of_packing, indistinguishable_boxes,
    indistinguishable_edges, init_root, packingclass_test,
)

FEASIBLE, INFEASIBLE, TIMEOUT = "FEASIBLE", "INFEASIBLE", "TIMEOUT"


@dataclass
class Limits:
    nodes: int | None = None
    seconds: float | None = None
    deadline: float | None = None

    def stop_at(self) -> float | None:
        if self.deadline is not None:
            return self.deadline
        if self.seconds is not None:
            return time.monotonic() + self.seconds
        return None


@dataclass
class Options:
    """Switches for the propagation rules; all on by default."""

    root_cliques: bool = True
    symmetric_exclusion: bool = True
    avoid_c4: bool = True
    avoid_cliques: bool = True
    scale_pruning: bool = True
    peel_slabs: bool = True


@dataclass
class OppVerdict:
    status: str
    nodes: int = 0
    packing_class: list[list[int]] | None = None
    packing: dict[int, tuple[int, ...]] | None = None

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE


@dataclass
class OppNode:
    info: SearchInfo | None
    triple: tuple[int, int, int, int] | None
    depth: int = 0


# ---------------------------------------------------------------------------
# propagation


def avoid_c4(si: SearchInfo, u: int, v: int, sigma: int, i: int) -> bool:
    """Fix edges that would otherwise complete an induced C4 with excluded chords."""
    P, M = si.plus[i], si.minus[i]
    if sigma == PLUS:
        # e = uv is a cycle edge of u-v-x-y-u, chords ux and vy
        for x in bits(P[v] & M[u]):
            for y in bits(P[u] & M[v] & ~(1 << x)):
                # f = xy closes the cycle
                if M[x] >> y & 1:
                    continue
                if P[x] >> y & 1:
                    return False
                if not si.apply(x, y, MINUS, i):
                    return False
        for y in bits(P[u] & M[v]):
            # f = vx with x adjacent to y and not to u
            for x in bits(P[y] & M[u] & ~(1 << v)):
                if M[v] >> x & 1:
                    continue
                if P[v] >> x & 1:
                    return False
                if not si.apply(v, x, MINUS, i):
                    return False
        for x in bits(P[v] & M[u]):
            for y in bits(P[x] & M[v] & ~(1 << u)):
                if M[u] >> y & 1:
                    continue
                if P[u] >> y & 1:
                    return False
                if not si.apply(u, y, MINUS, i):
                    return False
        # all four cycle edges required, one chord excluded: the other is forced
        for x in bits(P[v] & M[u]):
            for y in bits(P[u] & P[x] & ~(1 << v)):
                if P[v] >> y & 1:
                    continue
                if M[v] >> y & 1:
                    return False
                if not si.apply(v, y, PLUS, i):
                    return False
        for y in bits(P[u] & M[v]):
            for x in bits(P[v] & P[y] & ~(1 << u)):
                if P[u] >> x & 1:
                    continue
                if M[u] >> x & 1:
                    return False
                if not si.apply(u, x, PLUS, i):
                    return False
    else:
        # e = uv is a chord of u-x-v-y-u, the other chord is xy
        common = P[u] & P[v]
        for y in bits(common):
            for x in bits(common & M[y]):
                # full cycle with both chords excluded
                return False
            for x in bits(P[v] & ~P[u] & ~M[u] & M[y] & ~(1 << u)):
                if not si.apply(u, x, MINUS, i):
                    return False
            for x in bits(P[u] & ~P[v] & ~M[v] & M[y] & ~(1 << v)):
                if not si.apply(v, x, MINUS, i):
                    return False
        common = P[u] & P[v]
        for x in bits(common):
            for y in bits(common & ~P[x] & ~(1 << x)):
                if y < x:
                    continue
                if M[x] >> y & 1:
                    return False
                if not si.apply(x, y, PLUS, i):
                    return False
    return True


def _excluded_clique(problem: Problem, si: SearchInfo, i: int, cand: int, weights: Sequence[int]) -> tuple[int, int]:
    """Heavy clique of excluded edges inside ``cand``: exact when possible, greedy otherwise."""
    if not cand:
        return 0, 0
    M = si.minus[i]
    if bin(cand).count("1") <= 4:
        return brute_max_weight_clique(M, cand, weights)
    orient = transitive_orientation(M, cand)
    if isinstance(orient, list):
        return max_weight_chain(orient, cand, weights)
    chosen = greedy_clique(M, 0, cand, weights)
    return chosen, sum(weights[v] for v in bits(chosen))


def _class_members(rep: list[int], v: int) -> int:
    out = 0
    for x, r in enumerate(rep):
        if r == rep[v]:
            out |= 1 << x
    return out


def _fix_by_clique(problem: Problem, si: SearchInfo, i: int, b: int, c: int, e2: tuple[int, int], rep: list[int]) -> bool:
    """Is ``B = {b, c} u S' u X`` infeasible in direction ``i`` for the free edge ``e2``?"""
    M = si.minus[i]
    w = problem.widths[i]
    x1, x2 = e2
    core = (1 << b) | (1 << c) | (1 << x1) | (1 << x2)
    S = problem.full & ~core
    for z in bits(core):
        S &= M[z]
    X = (1 << x1) | (1 << x2)
    for x in (x1, x2):
        cls = _class_members(rep, x)
        if cls & (cls - 1):
            # add the twins of x only when they form an excluded clique
            if all((M[y] | 1 << y) & cls == cls for y in bits(cls)):
                X |= cls
    # S' must also be compatible with the extra twins
    for y in bits(X & ~core):
        S &= M[y]
    S &= ~X
    chosen, weight = _excluded_clique(problem, si, i, S, w)
    total = weight + sum(w[v] for v in bits(core | X))
    return total > problem.W[i]


def avoid_cliques(problem: Problem, si: SearchInfo, b: int, c: int, sigma: int, i: int) -> bool:
    """React to the exclusion of ``bc``: detect infeasible excluded cliques and force edges."""
    if sigma == PLUS:
        return True
    M = si.minus[i]
    w = problem.widths[i]
    S0 = M[b] & M[c]
    _, weight = _excluded_clique(problem, si, i, S0, w)
    if weight + w[b] + w[c] > problem.W[i]:
        return False
    rep = box_classes(si, problem)

    def free(x: int, y: int) -> bool:
        return not (si.plus[i][x] >> y & 1 or si.minus[i][x] >> y & 1)

    def force(x: int, y: int) -> bool:
        nonlocal rep
        ok = si.apply(x, y, PLUS, i)
        rep = box_classes(si, problem)
        return ok

    if rep[b] == rep[c]:
        for b2 in range(si.n):
            if b2 in (b, c) or not free(b, b2):
                continue
            if _fix_by_clique(problem, si, i, b, c, (b, b2), rep):
                if not force(b, b2):
                    return False
                break
    for b2 in range(si.n):
        if b2 in (b, c):
            continue
        if free(b, b2) and M[c] >> b2 & 1 and _fix_by_clique(problem, si, i, b, c, (b, b2), rep):
            if not force(b, b2):
                return False
    for b2 in range(si.n):
        if b2 in (b, c):
            continue
        if M[b] >> b2 & 1 and free(c, b2) and _fix_by_clique(problem, si, i, b, c, (c, b2), rep):
            if not force(c, b2):
                return False
    both = M[b] & M[c]
    for b2 in bits(both):
        for c2 in bits(both & ~(1 << b2)):
            if c2 < b2 or not free(b2, c2):
                continue
            if _fix_by_clique(problem, si, i, b, c, (b2, c2), rep):
                if not force(b2, c2):
                    return False
    return True


def update_searchinfo(problem: Problem, triple: tuple[int, int, int, int] | None, si: SearchInfo | None,
                      options: Options | None = None) -> SearchInfo | None:
    """Apply the node's augmentation and propagate; ``None`` means EXIT."""
    options = options or Options()
    if triple is None:
        si = init_root(problem, options.root_cliques)
        if si is None:
            return None
    else:
        assert si is not None
        u, v, sigma, i = triple
        if sigma == PLUS:
            if not si.apply(u, v, PLUS, i):
                return None
        else:
            edges = indistinguishable_edges(si, problem, u, v) if options.symmetric_exclusion else [(u, v)]
            for a, b in edges:
                if not si.apply(a, b, MINUS, i):
                    return None
    while si.queue:
        u, v, sigma, i = si.queue.popleft()
        if sigma == PLUS and not check_p3(si, u, v):
            return None
        if options.avoid_c4 and not avoid_c4(si, u, v, sigma, i):
            return None
        if options.avoid_cliques and not avoid_cliques(problem, si, u, v, sigma, i):
            return None
    return si


# ---------------------------------------------------------------------------
# tree search

ScaleHook = Callable[[Problem, SearchInfo, int], bool]
SCALE_DEPTH = 5


def stacking_hook(problem: Problem, si: SearchInfo, depth: int) -> bool:
    """Prune when the stacking volume test fails under the node's fixings.

    Two boxes cannot lie on a common line parallel to ``j`` if they must
    overlap in ``j`` or are kept apart in some other direction.
    """
    d, n = si.d, si.n
    blocked = []
    for j in range(d):
        row = list(si.plus[j])
        for k in range(d):
            if k != j:
                for b in range(n):
                    row[b] |= si.minus[k][b]
        blocked.append(row)
    return stacking_criterion(problem.sizes, problem.W, blocked) is not None


def peel_slabs(problem: Problem) -> tuple[Problem, list[tuple[int, int]]]:
    """Remove boxes that span the container in all directions but one.

    Such a box is disjoint from every other box in its remaining direction
    ``j``, so it can be cut out together with its layer: the rest fits into
    the container shrunk by its size in ``j`` iff everything fits. Returns
    the reduced problem (possibly with a negative extent when the layers
    alone overflow) and the peeled ``(box, direction)`` pairs in order.
    """
    W = list(problem.W)
    d = len(W)
    left = list(range(problem.n))
    peeled = []
    changed = True
    while changed:
        changed = False
        for v in left:
            s = problem.sizes[v]
            spans = [i for i in range(d) if s[i] != W[i]]
            if len(spans) <= 1:
                j = spans[0] if spans else d - 1
                W[j] -= s[j]
                peeled.append((v, j))
                left.remove(v)
                changed = True
                break
    if not peeled:
        return problem, []
    reduced = Problem(tuple(problem.sizes[v] for v in left), tuple(W), tuple(problem.types[v] for v in left),
                      tuple(problem.ids[v] for v in left))
    return reduced, peeled


def solve_problem(problem: Problem, limits: Limits | None = None, options: Options | None = None,
                  scale_hook: ScaleHook | None = None) -> OppVerdict:
    """Decide a renumbered problem: peel full layers, then search packing classes."""
    options = options or Options()
    if not options.peel_slabs:
        return search_problem(problem, limits, options, scale_hook)
    reduced, peeled = peel_slabs(problem)
    if not peeled:
        return search_problem(problem, limits, options, scale_hook)
    if min(reduced.W) < 0 or any(s[i] > reduced.W[i] for s in reduced.sizes for i in range(reduced.d)):
        return OppVerdict(INFEASIBLE, 1)
    if reduced.n == 0:
        verdict = OppVerdict(FEASIBLE, 1, None, {})
    else:
        verdict = search_problem(reduced, limits, options, scale_hook)
    if not verdict.feasible:
        return verdict
    packing = dict(verdict.packing)
    W = list(reduced.W)
    # put the layers back on top, last peeled first
    for v, j in reversed(peeled):
        pos = [0] * problem.d
        pos[j] = W[j]
        packing[problem.ids[v]] = tuple(pos)
        W[j] += problem.sizes[v][j]
    coords = [packing[problem.ids[v]] for v in range(problem.n)]
    return OppVerdict(FEASIBLE, verdict.nodes, edges_of_packing(problem, coords), packing)


def search_problem(problem: Problem, limits: Limits | None = None, options: Options | None = None,
                   scale_hook: ScaleHook | None = None) -> OppVerdict:
    """Depth-first packing-class search on a renumbered problem.

    ``scale_hook(problem, info, depth)`` is consulted on nodes of depth at
    most 5 before branching; returning ``True`` prunes the node. Without an
    explicit hook, :func:`stacking_hook` is used unless
    ``options.scale_pruning`` is off.
    """
    limits = limits or Limits()
    options = options or Options()
    if scale_hook is None and options.scale_pruning:
        scale_hook = stacking_hook
    stop_at = limits.stop_at()
    pool = [OppNode(None, None, 0)]
    nodes = 0
    while pool:
        if limits.nodes is not None and nodes >= limits.nodes:
            return OppVerdict(TIMEOUT, nodes)
        if stop_at is not None and time.monotonic() > stop_at:
            return OppVerdict(TIMEOUT, nodes)
        node = pool.pop()
        nodes += 1
        si, triple = node.info, node.triple
        while True:
            si = update_searchinfo(problem, triple, si, options)
            if si is None:
                result = None
                break
            result = packingclass_test(problem, si)
            if result.verdict != FIX:
                break
            triple = (*result.edge, PLUS, result.direction)
        if result is None or result.verdict == EXIT:
            continue
        if result.verdict == SUCCESS:
            pc = si.packing_class()
            coords = build_packing(problem, pc)
            return OppVerdict(FEASIBLE, nodes, pc, {problem.ids[v]: coords[v] for v in range(problem.n)})
        if scale_hook is not None and node.depth <= SCALE_DEPTH and scale_hook(problem, si, node.depth):
            continue
        u, v = result.edge
        i = result.direction
        # LIFO: the "required" child is pushed last so it is explored first
        pool.append(OppNode(si.copy(), (u, v, MINUS, i), node.depth + 1))
        pool.append(OppNode(si, (u, v, PLUS, i), node.depth + 1))
    return OppVerdict(INFEASIBLE, nodes)


def solve_opp(instance: Instance, subset: Sequence[int] | None = None, limits: Limits | None = None,
              options: Options | None = None, W: Sequence[int] | None = None) -> OppVerdict:
    """Decide whether ``subset`` (default: all boxes) fits the container ``W``."""
    problem = Problem.from_instance(instance, subset, W)
    if problem.n == 0:
        return OppVerdict(FEASIBLE, 0, [], {})
    verdict = solve_problem(problem, limits, options)
    if verdict.feasible:
        check = instance if W is None else instance.with_container(W, "decision")
        assert validate_packing(check, problem.ids, verdict.packing) is None
    return verdict

"""Orthogonal knapsack: best-first search over per-type box counts.

Each node fixes a range ``lo[t] .. hi[t]`` for the number of boxes of type
``t``. Nodes are bounded with knapsack relaxations under conservative
scales, tightened by the reductions Free Value, Free Area and Area
Program, and subsets are finally checked by the packing-class search.
"""

from __future__ import annotations

import heapq
import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Sequence

from .bounds import (
    ConservativeScale, KnapsackProblem, bound_family, scale_family, solve_bounded_knapsack, stacking_criterion,
)
from .model import Instance, validate_packing
from .opp import FEASIBLE, INFEASIBLE, TIMEOUT, Limits, solve_problem
from .opp import Options as OppOptions
from .packing_class import Problem

OPTIMAL, BOUNDS_ONLY = "optimal", "bounds-only"


class SearchTimeout(Exception):
    pass


@dataclass
class OkpNode:
    lo: tuple[int, ...]
    hi: tuple[int, ...]
    ub: float
    depth: int = 0
    stamp: int = 0
    lo_checked: tuple[int, ...] | None = None


@dataclass
class OkpStats:
    okp_nodes: int = 0
    opp_calls: int = 0
    opp_nodes: int = 0
    heuristic_rounds: int = 0


@dataclass
class OkpResult:
    value: int
    counts: tuple[int, ...]
    subset: list[int]
    packing: dict[int, tuple[int, ...]]
    status: str
    upper_bound: int
    stats: OkpStats = field(default_factory=OkpStats)
    seconds: float = 0.0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


@dataclass
class OkpOptions:
    """Toggles for the individual stop criteria and reductions."""

    stop_bound: bool = True
    stop_fits: bool = True
    stop_lower: bool = True
    reductions: bool = True
    root_rounds: int = 50
    node_rounds: int = 10
    opp: OppOptions = field(default_factory=OppOptions)


# ---------------------------------------------------------------------------
# placement-point heuristic


def _fits(pos, size, placed, W) -> bool:
    d = len(W)
    for i in range(d):
        if pos[i] + size[i] > W[i]:
            return False
    for q, s in placed:
        for i in range(d):
            if pos[i] >= q[i] + s[i] or q[i] >= pos[i] + size[i]:
                break
        else:
            return False
    return True


def _greedy_round(sizes: Sequence[tuple[int, ...]], supply: list[int], order: Sequence[int],
                  W: Sequence[int]) -> list[tuple[int, tuple[int, ...]]]:
    d = len(W)
    origin = (0,) * d
    points = [origin]
    seen = {origin}
    placed: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    out = []
    left = sum(supply)
    while points and left:
        p = heapq.heappop(points)
        for t in order:
            if supply[t] and _fits(p, sizes[t], placed, W):
                s = sizes[t]
                placed.append((p, s))
                out.append((t, p))
                supply[t] -= 1
                left -= 1
                for i in range(d):
                    if p[i] + s[i] < W[i]:
                        q = p[:i] + (p[i] + s[i],) + p[i + 1:]
                        if q not in seen:
                            seen.add(q)
                            heapq.heappush(points, q)
                break
    return out


def greedy_pack(instance: Instance, counts: Sequence[int], rng: random.Random | int | None = 0, rounds: int = 1,
                W: Sequence[int] | None = None, values: Sequence[int] | None = None, stop_when_all: bool = True):
    """Best of ``rounds`` placement-point fills using at most ``counts[t]`` boxes of type ``t``.

    Returns ``(subset, packing, value)``. The first round orders types by
    decreasing value, later rounds by value times a uniform (0, 1] weight.
    """
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    W = tuple(instance.W if W is None else W)
    sizes = [bt.sizes for bt in instance.types]
    vals = [bt.value for bt in instance.types] if values is None else list(values)
    total = sum(counts)
    best: tuple[int, list] | None = None
    for r in range(rounds):
        if r == 0:
            keys = [float(v) for v in vals]
        else:
            keys = [v * (1.0 - rng.random()) for v in vals]
        order = sorted(range(len(sizes)), key=lambda t: (-keys[t], t))
        placed = _greedy_round(sizes, list(counts), order, W)
        value = sum(vals[t] for t, _ in placed)
        if best is None or value > best[0]:
            best = (value, placed)
        if stop_when_all and len(placed) == total:
            break
    value, placed = best if best is not None else (0, [])
    used = [0] * len(sizes)
    packing = {}
    for t, p in placed:
        packing[instance.type_start[t] + used[t]] = p
        used[t] += 1
    real_value = sum(instance.types[t].value for t, _ in placed)
    return sorted(packing), packing, real_value


# ---------------------------------------------------------------------------
# the search


class OkpSolver:
    def __init__(self, instance: Instance, limits: Limits | None = None, seed: int = 0,
                 options: OkpOptions | None = None):
        self.inst = instance
        self.limits = limits or Limits()
        self.deadline = self.limits.stop_at()
        self.options = options or OkpOptions()
        self.rng = random.Random(seed)
        self.m = instance.m
        self.values = [bt.value for bt in instance.types]
        self.volumes = [bt.volume for bt in instance.types]
        W = instance.W
        self.bound_scales = self._tables(bound_family(W))
        self.wide_scales = self._tables(scale_family(W))
        self.stats = OkpStats()
        self.v_lb = 0
        self.best_counts = (0,) * self.m
        self.best_packing: dict[int, tuple[int, ...]] = {}
        self.feasible_sets: list[tuple[int, ...]] = []
        self.infeasible_sets: list[tuple[int, ...]] = []
        self.opp_cache: dict[tuple[int, ...], dict | None] = {}
        self.ks_cache: dict = {}

    def _tables(self, scales: Sequence[ConservativeScale]) -> list[tuple[tuple[int, ...], int]]:
        W = self.inst.W
        out = []
        for s in scales:
            out.append((tuple(s.box_weight(bt.sizes, W) for bt in self.inst.types), s.capacity(W)))
        return out

    # -- helpers -----------------------------------------------------------

    def _check_time(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SearchTimeout

    def value_of(self, counts: Sequence[int]) -> int:
        return sum(c * v for c, v in zip(counts, self.values))

    def _record(self, counts: Sequence[int], packing: dict[int, tuple[int, ...]]) -> None:
        value = self.value_of(counts)
        if value > self.v_lb:
            self.v_lb = value
            self.best_counts = tuple(counts)
            self.best_packing = dict(packing)

    def _knapsack(self, k: int, lo: tuple[int, ...], hi: tuple[int, ...]):
        key = (k, lo, hi)
        hit = self.ks_cache.get(key)
        if hit is None:
            weights, cap = self.bound_scales[k]
            res = solve_bounded_knapsack(KnapsackProblem(tuple(self.values), weights, lo, hi, cap))
            hit = self.ks_cache[key] = (res,)
            if len(self.ks_cache) > 200000:
                self.ks_cache.clear()
        return hit[0]

    def _point_beats(self, k: int, point: Sequence[int], lo: Sequence[int], hi: Sequence[int]) -> bool:
        weights, cap = self.bound_scales[k]
        y = [min(max(x, a), b) for x, a, b in zip(point, lo, hi)]
        if sum(c * w for c, w in zip(y, weights)) > cap:
            return False
        return self.value_of(y) > self.v_lb

    # -- operations --------------------------------------------------------

    def node_upper_bound(self, lo: tuple[int, ...], hi: tuple[int, ...], parent_ub: float = float("inf")):
        """Minimum knapsack bound over the bound family, clipped; ``None`` if prunable."""
        best = min(parent_ub, self.value_of(hi))
        witnesses = []
        for k in range(len(self.bound_scales)):
            res = self._knapsack(k, lo, hi)
            if res is None:
                return None, []
            witnesses.append(res[1])
            best = min(best, res[0])
        return best, witnesses

    def reduce_node(self, node: OkpNode):
        """Tighten ``node`` in place to a fixpoint; returns ``False`` when it can be pruned."""
        lo, hi = list(node.lo), list(node.hi)
        m = self.m
        while True:
            self._check_time()
            tlo, thi = tuple(lo), tuple(hi)
            ub, witnesses = self.node_upper_bound(tlo, thi, node.ub)
            if ub is None:
                return False
            node.ub = ub
            if self.options.stop_bound and ub <= self.v_lb:
                return False
            if not self.options.reductions:
                break
            changed = False
            # Free Value
            v_lo = self.value_of(lo)
            for t in range(m):
                if hi[t] > lo[t]:
                    cap = lo[t] + (int(ub) - v_lo) // self.values[t] if self.values[t] else lo[t]
                    if cap < hi[t]:
                        hi[t] = cap
                        changed = True
            # Free Area under every scale of the wide family
            for weights, capacity in self.wide_scales:
                room = capacity - sum(l * w for l, w in zip(lo, weights))
                if room < 0:
                    return False
                for t in range(m):
                    if hi[t] > lo[t] and weights[t]:
                        cap = lo[t] + room // weights[t]
                        if cap < hi[t]:
                            hi[t] = cap
                            changed = True
            if any(l > h for l, h in zip(lo, hi)):
                return False
            # Area Program: pin a type at its lower bound
            for t in range(m):
                while lo[t] < hi[t]:
                    tlo, thi = tuple(lo), tuple(hi)
                    pinned_hi = thi[:t] + (lo[t],) + thi[t + 1:]
                    beaten = False
                    for k in range(len(self.bound_scales)):
                        # the unpinned optimum clipped into the pinned box is a feasible point;
                        # if it already beats v_lb this scale cannot prune
                        if witnesses and self._point_beats(k, witnesses[k], tlo, pinned_hi):
                            continue
                        res = self._knapsack(k, tlo, pinned_hi)
                        if res is None or res[0] <= self.v_lb:
                            beaten = True
                            break
                    if not beaten:
                        break
                    lo[t] += 1
                    witnesses = []
                    changed = True
            if not changed:
                break
        node.lo, node.hi = tuple(lo), tuple(hi)
        return True

    def opp_decide(self, counts: tuple[int, ...]):
        """Packing for the first ``counts[t]`` boxes of each type, ``None`` if they do not fit."""
        if counts in self.opp_cache:
            return self.opp_cache[counts]
        if not any(counts):
            return {}
        for f in self.infeasible_sets:
            if all(c >= x for c, x in zip(counts, f)):
                return None
        inst = self.inst
        # wide-family volume criterion
        for weights, capacity in self.wide_scales:
            if sum(c * w for c, w in zip(counts, weights)) > capacity:
                self._remember(counts, None)
                return None
        ids = inst.subset_for_counts(counts)
        if self.options.opp.scale_pruning and stacking_criterion([inst.boxes[b].sizes for b in ids], inst.W):
            self._remember(counts, None)
            return None
        subset, packing, _ = greedy_pack(inst, counts, self.rng, self.options.node_rounds, values=self.volumes)
        self.stats.heuristic_rounds += self.options.node_rounds
        if len(subset) == sum(counts):
            self._remember(counts, packing)
            return packing
        self._check_time()
        self.stats.opp_calls += 1
        problem = Problem.from_instance(inst, ids)
        verdict = solve_problem(problem, Limits(nodes=None, deadline=self.deadline), self.options.opp)
        self.stats.opp_nodes += verdict.nodes
        if verdict.status == TIMEOUT:
            raise SearchTimeout
        packing = verdict.packing if verdict.status == FEASIBLE else None
        self._remember(counts, packing)
        return packing

    def _remember(self, counts, packing) -> None:
        self.opp_cache[counts] = packing
        if packing is None:
            self.infeasible_sets.append(counts)

    def branch_node(self, node: OkpNode) -> list[OkpNode]:
        return branch_node(self.inst, node)

    def heuristic(self, node: OkpNode, rounds: int) -> bool:
        """Greedy fill from the upper set; ``True`` when all of it was packed."""
        subset, packing, value = greedy_pack(self.inst, node.hi, self.rng, rounds)
        self.stats.heuristic_rounds += rounds
        counts = self.inst.counts_for_subset(subset)
        self._record(counts, packing)
        return tuple(counts) == node.hi

    def solve(self) -> OkpResult:
        start = time.monotonic()
        m = self.m
        root = OkpNode((0,) * m, tuple(bt.count for bt in self.inst.types), float("inf"), 0, 0, None)
        stamp = itertools.count(1)
        pool = [(-root.ub, 0, 0, root)]
        status = OPTIMAL
        open_ub = 0
        try:
            while pool:
                self._check_time()
                if self.limits.nodes is not None and self.stats.okp_nodes >= self.limits.nodes:
                    raise SearchTimeout
                _, _, _, node = heapq.heappop(pool)
                if self.options.stop_bound and node.ub <= self.v_lb:
                    continue
                self.stats.okp_nodes += 1
                open_ub = node.ub
                rounds = self.options.root_rounds if node.depth == 0 else self.options.node_rounds
                if self.heuristic(node, rounds) and self.options.stop_fits:
                    continue
                if not self.reduce_node(node):
                    continue
                if node.lo == node.hi or (self.options.stop_lower and node.lo != node.lo_checked and any(node.lo)):
                    packing = self.opp_decide(node.lo)
                    if packing is None:
                        continue
                    self._record(node.lo, packing)
                    if node.lo == node.hi:
                        continue
                    node.lo_checked = node.lo
                if self.options.stop_bound and node.ub <= self.v_lb:
                    continue
                for child in self.branch_node(node):
                    child.stamp = next(stamp)
                    heapq.heappush(pool, (-child.ub, -child.depth, child.stamp, child))
        except SearchTimeout:
            status = BOUNDS_ONLY
        if status == OPTIMAL:
            upper = self.v_lb
        else:
            upper = max([open_ub] + [-key for key, *_ in pool])
            upper = int(max(upper, self.v_lb)) if upper != float("inf") else self.value_of(root.hi)
        subset = sorted(self.best_packing)
        assert validate_packing(self.inst, subset, self.best_packing) is None
        return OkpResult(self.v_lb, self.best_counts, subset, dict(self.best_packing), status, upper,
                         self.stats, time.monotonic() - start)


def branch_node(instance: Instance, node: OkpNode) -> list[OkpNode]:
    """One child per count of the bulkiest unfixed type."""
    free = [t for t in range(instance.m) if node.lo[t] < node.hi[t]]
    if not free:
        raise ValueError("cannot branch on a leaf")
    t_star = max(free, key=lambda t: (max(instance.types[t].sizes), -t))
    children = []
    for nu in range(node.lo[t_star], node.hi[t_star] + 1):
        lo = node.lo[:t_star] + (nu,) + node.lo[t_star + 1:]
        hi = node.hi[:t_star] + (nu,) + node.hi[t_star + 1:]
        ub = min(node.ub, sum(h * bt.value for h, bt in zip(hi, instance.types)))
        children.append(OkpNode(lo, hi, ub, node.depth + 1, 0, node.lo_checked if lo == node.lo else None))
    return children


def solve_okp(instance: Instance, limits: Limits | None = None, seed: int = 0,
              options: OkpOptions | None = None) -> OkpResult:
    return OkpSolver(instance, limits, seed, options).solve()


def node_upper_bound(instance: Instance, node: OkpNode) -> float | None:
    """Knapsack bound of ``node`` (min over scales, clipped); ``None`` means prunable."""
    ub, _ = OkpSolver(instance).node_upper_bound(node.lo, node.hi, node.ub)
    return ub


def reduce_node(instance: Instance, node: OkpNode, v_lb: int) -> OkpNode | None:
    solver = OkpSolver(instance)
    solver.v_lb = v_lb
    node = OkpNode(node.lo, node.hi, node.ub, node.depth, node.stamp)
    return node if solver.reduce_node(node) else None


def opp_decide(instance: Instance, subset: Sequence[int], limits: Limits | None = None, seed: int = 0):
    """Layered feasibility check for a subset given as box ids (first boxes of each type)."""
    counts = instance.counts_for_subset(subset)
    solver = OkpSolver(instance, limits, seed)
    try:
        packing = solver.opp_decide(tuple(counts))
    except SearchTimeout:
        return TIMEOUT, None, solver.stats
    if packing is None:
        return INFEASIBLE, None, solver.stats
    # map the prefix ids back onto the requested ids type by type
    mapping = {}
    pools: dict[int, list[int]] = {}
    for b in sorted(subset):
        pools.setdefault(instance.boxes[b].type_index, []).append(b)
    used = {t: 0 for t in pools}
    for b in sorted(packing):
        t = instance.boxes[b].type_index
        mapping[pools[t][used[t]]] = packing[b]
        used[t] += 1
    return FEASIBLE, mapping, solver.stats

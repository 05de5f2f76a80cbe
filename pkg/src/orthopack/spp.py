"""Strip packing: minimize the extent of the last direction.

The search descends through the candidate heights ``H``. Every packing
can be normalized so that each box sits at a sum of other boxes' heights,
hence its top, and the optimal height, is a subset sum of box heights.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from typing import Sequence

from .bounds import scale_family
from .model import Instance, InstanceError, validate_packing
from .okp import OkpSolver, OkpStats, SearchTimeout, _greedy_round
from .opp import Limits

OPTIMAL, BOUNDS_ONLY = "optimal", "bounds-only"


@dataclass
class HeightLadder:
    """Candidate heights ``H``, the incumbent ``h`` and the lower bound."""

    heights: list[int]
    h: int
    lower: int

    def below(self, h: int) -> int | None:
        """Largest candidate strictly below ``h`` and not below the lower bound."""
        best = None
        for x in self.heights:
            if self.lower <= x < h:
                best = x
        return best


@dataclass
class SppResult:
    height: int
    packing: dict[int, tuple[int, ...]]
    status: str
    lower_bound: int
    stats: OkpStats = field(default_factory=OkpStats)
    heights_tried: list[tuple[int, bool]] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _heights(instance: Instance) -> list[int]:
    return [b.sizes[-1] for b in instance.boxes]


def normal_heights(instance: Instance) -> list[int]:
    """Subset sums of the box heights between the tallest box and the total."""
    hs = _heights(instance)
    if not hs:
        return []
    sums = 1
    for h in hs:
        sums |= sums << h
    lo, hi = max(hs), sum(hs)
    return [x for x in range(lo, hi + 1) if sums >> x & 1]


def _packing_height(instance: Instance, packing: dict[int, tuple[int, ...]]) -> int:
    return max((p[-1] + instance.boxes[b].sizes[-1] for b, p in packing.items()), default=0)


def initial_packing(instance: Instance, rng: random.Random, rounds: int = 20) -> dict[int, tuple[int, ...]]:
    """Lowest of a few placement-point fills in a container as tall as all boxes stacked."""
    base = instance.W[:-1]
    tall = tuple(base) + (sum(_heights(instance)),)
    sizes = [bt.sizes for bt in instance.types]
    counts = [bt.count for bt in instance.types]
    keys = [bt.volume for bt in instance.types]
    best = None
    for r in range(rounds):
        w = keys if r == 0 else [k * (1.0 - rng.random()) for k in keys]
        order = sorted(range(instance.m), key=lambda t: (-w[t], t))
        placed = _greedy_round(sizes, list(counts), order, tall)
        if len(placed) < instance.n:
            continue
        height = max(p[-1] + sizes[t][-1] for t, p in placed)
        if best is None or height < best[0]:
            best = (height, placed)
    if best is None:
        # stacking every box at the origin of the base always works
        packing, z = {}, 0
        for b in instance.boxes:
            packing[b.id] = (0,) * (instance.d - 1) + (z,)
            z += b.sizes[-1]
        return packing
    used = [0] * instance.m
    packing = {}
    for t, p in best[1]:
        packing[instance.type_start[t] + used[t]] = p
        used[t] += 1
    return packing


def height_lower_bound(instance: Instance) -> int:
    """Tallest box, and the volume bound under conservative scales of the base."""
    base = instance.W[:-1]
    hs = _heights(instance)
    best = max(hs)
    for scale in scale_family(base):
        cap = scale.capacity(base)
        load = sum(scale.box_weight(b.sizes[:-1], base) * b.sizes[-1] for b in instance.boxes)
        best = max(best, -(-load // cap))
    return best


def solve_spp(instance: Instance, limits: Limits | None = None, seed: int = 0) -> SppResult:
    """Minimal height of the strip that holds every box."""
    if instance.kind != "strip":
        raise InstanceError("strip packing needs an instance of kind 'strip'")
    start = time.monotonic()
    limits = limits or Limits()
    deadline = limits.stop_at()
    rng = random.Random(seed)
    stats = OkpStats()
    base = tuple(instance.W[:-1])
    packing = initial_packing(instance, rng)
    ladder = HeightLadder(normal_heights(instance), _packing_height(instance, packing), height_lower_bound(instance))
    tried: list[tuple[int, bool]] = []
    # infeasible heights, consulted so no smaller height is tested again
    infeasible_below = 0
    status = OPTIMAL
    while True:
        h2 = ladder.below(ladder.h)
        if h2 is None or h2 <= infeasible_below:
            break
        decision = instance.with_container(base + (h2,), "decision")
        solver = OkpSolver(decision, Limits(nodes=limits.nodes, deadline=deadline), seed)
        solver.rng = rng
        try:
            found = solver.opp_decide(tuple(bt.count for bt in instance.types))
        except SearchTimeout:
            status = BOUNDS_ONLY
            break
        finally:
            for name in ("opp_calls", "opp_nodes", "heuristic_rounds"):
                setattr(stats, name, getattr(stats, name) + getattr(solver.stats, name))
        tried.append((h2, found is not None))
        if found is None:
            infeasible_below = h2
            break
        packing = found
        ladder.h = _packing_height(instance, packing)
    lower = ladder.h if status == OPTIMAL else max(ladder.lower, infeasible_below + 1)
    height = ladder.h
    check = instance.with_container(base + (height,), "decision")
    assert validate_packing(check, range(instance.n), packing) is None
    return SppResult(height, dict(packing), status, lower, stats, tried, time.monotonic() - start)

"""Conservative scales, volume criteria and the bounded knapsack relaxation.

Sizes are normalized by the container, so a scale maps a width ``w`` in
direction ``i`` to a rational in ``[0, 1]``. To stay exact without
``Fraction`` in the hot paths, each scale also has an integer form: per
direction a denominator ``D_i`` and numerators ``num_i(w)`` with
``num_i(w) / D_i`` the transformed width. Box volumes then become integers
against the integer capacity ``prod(D_i)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

DP_CAPACITY_LIMIT = 10**6


def u_k(x: Fraction | int, k: int) -> Fraction:
    """``x`` if ``(k+1)x`` is integral, else ``floor((k+1)x) / k``."""
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"u_k is defined on [0, 1], got {x}")
    if k < 1:
        raise ValueError("k must be a positive integer")
    y = (k + 1) * x
    if y.denominator == 1:
        return x
    return Fraction(math.floor(y), k)


@dataclass(frozen=True)
class ConservativeScale:
    """Identity when ``direction`` is ``None``, else ``u_k`` on that direction."""

    direction: int | None = None
    k: int = 0

    def denominator(self, i: int, extent: int) -> int:
        return extent * self.k if i == self.direction else extent

    def numerator(self, i: int, width: int, extent: int) -> int:
        if i != self.direction:
            return width
        k = self.k
        if (k + 1) * width % extent == 0:
            return width * k
        return ((k + 1) * width // extent) * extent

    def width(self, i: int, width: int, extent: int) -> Fraction:
        return Fraction(self.numerator(i, width, extent), self.denominator(i, extent))

    def capacity(self, W: Sequence[int]) -> int:
        return math.prod(self.denominator(i, W[i]) for i in range(len(W)))

    def box_weight(self, sizes: Sequence[int], W: Sequence[int]) -> int:
        return math.prod(self.numerator(i, sizes[i], W[i]) for i in range(len(W)))


IDENTITY = ConservativeScale()


def scale_family(W: Sequence[int], max_k: int | None = None, dirs: Iterable[int] | None = None) -> list[ConservativeScale]:
    """Identity plus ``u_k`` per direction, ``k = 1..min(max_k, W_i // 2)``.

    With ``max_k=None`` the wide family ``k <= W_i / 2`` is produced.
    """
    out = [IDENTITY]
    for i in (range(len(W)) if dirs is None else dirs):
        top = W[i] // 2 if max_k is None else min(max_k, max(1, W[i] // 2))
        out.extend(ConservativeScale(i, k) for k in range(1, top + 1))
    return out


def bound_family(W: Sequence[int]) -> list[ConservativeScale]:
    out = [IDENTITY]
    for i in range(len(W)):
        out.extend(ConservativeScale(i, k) for k in range(1, 5))
    return out


def transformed_volume(sizes: Iterable[Sequence[int]], W: Sequence[int], scale: ConservativeScale) -> Fraction:
    return Fraction(sum(scale.box_weight(s, W) for s in sizes), scale.capacity(W))


def volume_criterion(sizes: Sequence[Sequence[int]], W: Sequence[int],
                     family: Sequence[ConservativeScale] | None = None) -> ConservativeScale | None:
    """A scale under which the boxes overflow the container, or ``None``."""
    family = scale_family(W) if family is None else family
    for scale in family:
        if sum(scale.box_weight(s, W) for s in sizes) > scale.capacity(W):
            return scale
    return None


def stacking_capacities(sizes: Sequence[Sequence[int]], W: Sequence[int], j: int,
                        blocked: Sequence[int] | None = None) -> list[int]:
    """Tallest stack through each box along direction ``j``.

    ``c[b]`` is the largest subset sum of direction-``j`` sizes that contains
    ``b``, stays within ``W[j]`` and uses only boxes not in ``blocked[b]``
    (a bitset of boxes that can never share a line parallel to ``j`` with
    ``b``). Conflicts among the other boxes are ignored, so ``c[b]`` is an
    upper bound on every real stack through ``b``.
    """
    cap = W[j]
    full = (1 << (cap + 1)) - 1
    out = []
    for b, sb in enumerate(sizes):
        block = blocked[b] if blocked is not None else 0
        reach = 1 << sb[j]
        for c, sc in enumerate(sizes):
            if c != b and not block >> c & 1:
                reach = (reach | reach << sc[j]) & full
        out.append(reach.bit_length() - 1)
    return out


def _dff_values(x: Fraction, ks: Sequence[int]) -> list[Fraction]:
    return [x if k == 0 else u_k(x, k) for k in ks]


def stacking_criterion(sizes: Sequence[Sequence[int]], W: Sequence[int],
                       blocked: Sequence[Sequence[int]] | None = None, max_k: int = 4) -> tuple[int, tuple[int, ...]] | None:
    """Volume test with direction ``j`` normalized by the tallest possible stack.

    A line parallel to ``j`` crosses boxes that are stacked along ``j``, so
    their ``w_j / c_b`` sum to at most 1 and any dual feasible function keeps
    that true. Integrating over the cross-section, where the other directions
    may be transformed by ``u_k`` as usual, gives a necessary condition.
    ``blocked[j][b]`` lists boxes that cannot share such a line with ``b``;
    pairs required to overlap in ``j`` or fixed disjoint in another direction
    qualify. Returns ``(j, ks)`` for a violated combination, ``ks[i]`` being
    the ``u_k`` index per direction (0 for identity), or ``None``.
    """
    d, n = len(W), len(sizes)
    if n == 0:
        return None
    ks = range(max_k + 1)
    other = [[_dff_values(Fraction(s[i], W[i]), ks) for i in range(d)] for s in sizes]
    for j in range(d):
        caps = stacking_capacities(sizes, W, j, blocked[j] if blocked is not None else None)
        own = [_dff_values(Fraction(s[j], c), ks) for s, c in zip(sizes, caps)]
        rows = [[float(v) for v in own[b]] for b in range(n)]
        rest = [[[float(v) for v in other[b][i]] for i in range(d)] for b in range(n)]
        dirs = [i for i in range(d) if i != j]
        for combo in itertools.product(ks, repeat=d):
            approx = 0.0
            for b in range(n):
                term = rows[b][combo[j]]
                for i in dirs:
                    term *= rest[b][i][combo[i]]
                approx += term
            if approx <= 1 - 1e-9:
                continue
            exact = Fraction(0)
            for b in range(n):
                term = own[b][combo[j]]
                for i in dirs:
                    term *= other[b][i][combo[i]]
                exact += term
            if exact > 1:
                return j, combo
    return None


# ---------------------------------------------------------------------------
# bounded knapsack


@dataclass(frozen=True)
class KnapsackProblem:
    """``max v.xi`` s.t. ``w.xi <= capacity``, ``lower <= xi <= upper`` (integers)."""

    values: tuple[int, ...]
    weights: tuple[int, ...]
    lower: tuple[int, ...]
    upper: tuple[int, ...]
    capacity: int

    def __post_init__(self) -> None:
        if not (len(self.values) == len(self.weights) == len(self.lower) == len(self.upper)):
            raise ValueError("length mismatch")
        if any(lo < 0 or lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("bounds must satisfy 0 <= lower <= upper")
        if any(w < 0 for w in self.weights) or any(v < 0 for v in self.values):
            raise ValueError("weights and values must be nonnegative")

    @classmethod
    def from_fractions(cls, values: Sequence[int], weights: Sequence[Fraction], lower: Sequence[int],
                       upper: Sequence[int], capacity: Fraction = Fraction(1)) -> "KnapsackProblem":
        ws = [Fraction(w) for w in weights]
        cap = Fraction(capacity)
        den = math.lcm(cap.denominator, *(w.denominator for w in ws)) if ws else cap.denominator
        return cls(tuple(values), tuple(int(w * den) for w in ws), tuple(lower), tuple(upper), int(cap * den))


def solve_bounded_knapsack(problem: KnapsackProblem) -> tuple[int, tuple[int, ...]] | None:
    """Optimal value and witness counts, or ``None`` if the lower bounds overflow."""
    vals, wts, lo, hi = problem.values, problem.weights, problem.lower, problem.upper
    cap = problem.capacity - sum(l * w for l, w in zip(lo, wts))
    if cap < 0:
        return None
    base = sum(l * v for l, v in zip(lo, vals))
    xi = list(lo)
    items = []
    for t in range(len(vals)):
        free = hi[t] - lo[t]
        if free == 0 or vals[t] == 0:
            continue
        if wts[t] == 0:
            xi[t] += free
            base += free * vals[t]
            continue
        free = min(free, cap // wts[t])
        if free > 0:
            items.append((t, free))
    if not items:
        return base, tuple(xi)
    g = 0
    for t, _ in items:
        g = math.gcd(g, wts[t])
    cap //= g
    weights = [wts[t] // g for t, _ in items]
    if cap <= DP_CAPACITY_LIMIT:
        extra, counts = _knapsack_dp(items, weights, vals, cap)
    else:
        extra, counts = _knapsack_bb(items, weights, vals, cap)
    for (t, _), c in zip(items, counts):
        xi[t] += c
    return base + extra, tuple(xi)


def _knapsack_dp(items, weights, vals, cap: int) -> tuple[int, list[int]]:
    # binary splitting turns each bounded item into 0-1 items
    parts = []
    for j, (t, count) in enumerate(items):
        q = 1
        while count > 0:
            take = min(q, count)
            parts.append((j, take, take * weights[j], take * vals[t]))
            count -= take
            q *= 2
    dp = np.zeros(cap + 1, dtype=np.int64)
    takes = []
    for j, q, w, v in parts:
        if w > cap:
            takes.append(None)
            continue
        cand = dp[: cap + 1 - w] + v
        better = cand > dp[w:]
        takes.append(np.packbits(better))
        dp[w:] = np.where(better, cand, dp[w:])
    counts = [0] * len(items)
    c = cap
    for (j, q, w, v), tk in zip(reversed(parts), reversed(takes)):
        if tk is None or c < w:
            continue
        idx = c - w
        if tk[idx >> 3] >> (7 - (idx & 7)) & 1:
            counts[j] += q
            c -= w
    return int(dp[cap]), counts


def _knapsack_bb(items, weights, vals, cap: int) -> tuple[int, list[int]]:
    order = sorted(range(len(items)), key=lambda j: -vals[items[j][0]] / weights[j])
    v = [vals[items[j][0]] for j in order]
    w = [weights[j] for j in order]
    ub = [items[j][1] for j in order]
    n = len(order)
    best = [0, [0] * n]
    cur = [0] * n

    def bound(k: int, room: int) -> float:
        total = 0.0
        for j in range(k, n):
            if ub[j] * w[j] <= room:
                room -= ub[j] * w[j]
                total += ub[j] * v[j]
            else:
                return total + v[j] * room / w[j]
        return total

    def go(k: int, room: int, value: int) -> None:
        if value > best[0]:
            best[0], best[1] = value, cur[:]
        if k == n or value + bound(k, room) <= best[0]:
            return
        for c in range(min(ub[k], room // w[k]), -1, -1):
            cur[k] = c
            go(k + 1, room - c * w[k], value + c * v[k])
        cur[k] = 0

    go(0, cap, 0)
    counts = [0] * n
    for pos, j in enumerate(order):
        counts[j] = best[1][pos]
    return best[0], counts

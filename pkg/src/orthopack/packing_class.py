"""Packing classes and the search information that narrows them down.

Boxes are renumbered ``0..n-1`` inside a :class:`Problem`; edge states are
kept per direction as two lists of neighbour bitsets, ``plus[i][v]`` for
required edges and ``minus[i][v]`` for excluded ones.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .graphs import bits, find_c4, max_weight_chain, odd_cycle_certificate, transitive_orientation
from .model import Instance

PLUS, MINUS = 1, -1


@dataclass(frozen=True)
class Problem:
    """An OPP instance: box sizes, their type labels and the container."""

    sizes: tuple[tuple[int, ...], ...]
    W: tuple[int, ...]
    types: tuple[int, ...]
    ids: tuple[int, ...] = ()
    widths: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        d = len(self.W)
        object.__setattr__(self, "widths", tuple(tuple(s[i] for s in self.sizes) for i in range(d)))
        if not self.ids:
            object.__setattr__(self, "ids", tuple(range(len(self.sizes))))

    @classmethod
    def from_instance(cls, instance: Instance, subset: Sequence[int] | None = None,
                      W: Sequence[int] | None = None) -> "Problem":
        subset = range(instance.n) if subset is None else sorted(subset)
        boxes = [instance.boxes[b] for b in subset]
        return cls(tuple(b.sizes for b in boxes), tuple(instance.W if W is None else W),
                   tuple(b.type_index for b in boxes), tuple(b.id for b in boxes))

    @property
    def n(self) -> int:
        return len(self.sizes)

    @property
    def d(self) -> int:
        return len(self.W)

    @property
    def full(self) -> int:
        return (1 << len(self.sizes)) - 1


class SearchInfo:
    """Required/excluded edge sets per direction plus the pending queue ``L``."""

    __slots__ = ("n", "d", "plus", "minus", "queue")

    def __init__(self, n: int, d: int):
        self.n = n
        self.d = d
        self.plus = [[0] * n for _ in range(d)]
        self.minus = [[0] * n for _ in range(d)]
        self.queue: deque[tuple[int, int, int, int]] = deque()

    def copy(self) -> "SearchInfo":
        new = SearchInfo.__new__(SearchInfo)
        new.n, new.d = self.n, self.d
        new.plus = [row[:] for row in self.plus]
        new.minus = [row[:] for row in self.minus]
        new.queue = deque(self.queue)
        return new

    def state(self, u: int, v: int, i: int) -> int:
        if self.plus[i][u] >> v & 1:
            return PLUS
        if self.minus[i][u] >> v & 1:
            return MINUS
        return 0

    def free(self, i: int, v: int) -> int:
        """Bitset of boxes whose edge to ``v`` is still free in direction ``i``."""
        return ((1 << self.n) - 1) & ~self.plus[i][v] & ~self.minus[i][v] & ~(1 << v)

    def apply(self, u: int, v: int, sigma: int, i: int) -> bool:
        """Fix ``uv`` in direction ``i``; ``False`` signals an empty search space.

        Required edges are closed under P3 right away: an edge required in
        all directions but one is excluded in the last.
        """
        if u == v:
            raise ValueError("an edge needs two distinct boxes")
        own, other = (self.plus, self.minus) if sigma == PLUS else (self.minus, self.plus)
        if other[i][u] >> v & 1:
            return False
        if own[i][u] >> v & 1:
            return True
        own[i][u] |= 1 << v
        own[i][v] |= 1 << u
        self.queue.append((u, v, sigma, i))
        if sigma == PLUS:
            return check_p3(self, u, v)
        return True

    def required_dirs(self, u: int, v: int) -> list[int]:
        return [i for i in range(self.d) if self.plus[i][u] >> v & 1]

    def is_p3_closed(self) -> bool:
        for u in range(self.n):
            for v in range(u + 1, self.n):
                req = self.required_dirs(u, v)
                if len(req) == self.d:
                    return False
                if len(req) == self.d - 1:
                    k = next(i for i in range(self.d) if i not in req)
                    if not self.minus[k][u] >> v & 1:
                        return False
        return True

    def packing_class(self) -> list[list[int]]:
        return [row[:] for row in self.plus]


def check_p3(si: SearchInfo, u: int, v: int) -> bool:
    """Exclude ``uv`` in its last free direction; ``False`` if none is left."""
    free = [j for j in range(si.d) if not si.plus[j][u] >> v & 1]
    if not free:
        return False
    if len(free) == 1:
        return si.apply(u, v, MINUS, free[0])
    return True


def apply_augmentation(si: SearchInfo, edge: tuple[int, int], sigma: int, i: int) -> bool:
    return si.apply(edge[0], edge[1], sigma, i)


def root_clique_size(count: int, width: int, extent: int) -> int:
    """Size of a clique every packing class has among ``count`` equal boxes."""
    q = extent // width
    return -(-count // q)


def init_root(problem: Problem, cliques: bool = True) -> SearchInfo | None:
    """Root search information, or ``None`` when the instance is infeasible.

    Pairs that cannot sit side by side in a direction are required there.
    Within each box type the first ``k`` boxes are made a clique in one
    direction, ``k`` being a clique size every packing class must contain;
    equal boxes may be renumbered, so this loses only isomorphic copies.
    """
    n, d, W = problem.n, problem.d, problem.W
    si = SearchInfo(n, d)
    for i in range(d):
        w = problem.widths[i]
        for u in range(n):
            for v in range(u + 1, n):
                if w[u] + w[v] > W[i] and not si.apply(u, v, PLUS, i):
                    return None
    if cliques:
        groups: dict[int, list[int]] = {}
        for v, t in enumerate(problem.types):
            groups.setdefault(t, []).append(v)
        for members in groups.values():
            if len(members) < 2:
                continue
            sizes = problem.sizes[members[0]]
            best_k, best_i = 0, 0
            for i in range(d):
                k = root_clique_size(len(members), sizes[i], W[i])
                if k > best_k:
                    best_k, best_i = k, i
            if best_k >= 2:
                head = members[:best_k]
                for a in range(len(head)):
                    for b in range(a + 1, len(head)):
                        if not si.apply(head[a], head[b], PLUS, best_i):
                            return None
    return si


def indistinguishable_boxes(si: SearchInfo, problem: Problem, b: int, c: int) -> bool:
    if b == c:
        return True
    if problem.sizes[b] != problem.sizes[c]:
        return False
    keep = ~((1 << b) | (1 << c))
    for i in range(si.d):
        if (si.plus[i][b] ^ si.plus[i][c]) & keep or (si.minus[i][b] ^ si.minus[i][c]) & keep:
            return False
    return True


def box_classes(si: SearchInfo, problem: Problem) -> list[int]:
    """Class representative of every box under indistinguishability."""
    rep = list(range(si.n))
    heads: dict[tuple[int, ...], list[int]] = {}
    for v in range(si.n):
        group = heads.setdefault(problem.sizes[v], [])
        for h in group:
            if indistinguishable_boxes(si, problem, h, v):
                rep[v] = h
                break
        else:
            group.append(v)
    return rep


def indistinguishable_edges(si: SearchInfo, problem: Problem, u: int, v: int, rep: list[int] | None = None) -> list[tuple[int, int]]:
    """All edges ``b'c'`` with ``b' ~ u`` and ``c' ~ v`` (including ``uv``)."""
    rep = box_classes(si, problem) if rep is None else rep
    cu = [x for x in range(si.n) if rep[x] == rep[u]]
    cv = [x for x in range(si.n) if rep[x] == rep[v]]
    out = set()
    for a in cu:
        for b in cv:
            if a != b:
                out.add((min(a, b), max(a, b)))
    return sorted(out)


# ---------------------------------------------------------------------------
# packing class test

SUCCESS, EXIT, FIX, BRANCH = "SUCCESS", "EXIT", "FIX", "BRANCH"


@dataclass
class TestResult:
    verdict: str
    edge: tuple[int, int] | None = None
    direction: int | None = None


def _cocomp(si: SearchInfo, i: int) -> list[int]:
    full = (1 << si.n) - 1
    return [full & ~si.plus[i][v] & ~(1 << v) for v in range(si.n)]


def obstruction(si: SearchInfo, problem: Problem, i: int) -> set[tuple[int, int]]:
    """Edges of the first excluded configuration found in direction ``i``.

    Order: a non-comparability certificate for the complement of the
    required edges, then an infeasible maximum-weight clique of that
    complement, then an induced C4 of the required edges (its chords).
    An empty set means the direction is fine.
    """
    co = _cocomp(si, i)
    full = problem.full
    res = transitive_orientation(co, full)
    if not isinstance(res, list):
        cyc = odd_cycle_certificate(co, full, res)
        k = len(cyc)
        return {(min(cyc[j], cyc[(j + 1) % k]), max(cyc[j], cyc[(j + 1) % k])) for j in range(k)}
    chosen, weight = max_weight_chain(res, full, problem.widths[i])
    if weight > problem.W[i]:
        vs = list(bits(chosen))
        return {(a, b) for x, a in enumerate(vs) for b in vs[x + 1:]}
    c4 = find_c4(si.plus[i], full)
    if c4 is not None:
        a, b, c, dd = c4
        return {(min(a, c), max(a, c)), (min(b, dd), max(b, dd))}
    return set()


def packingclass_test(problem: Problem, si: SearchInfo) -> TestResult:
    types = problem.types
    for i in range(si.d):
        A = obstruction(si, problem, i)
        if not A:
            continue
        cand = [e for e in A if not si.minus[i][e[0]] >> e[1] & 1]
        if not cand:
            return TestResult(EXIT)
        e = min(cand, key=lambda e: (min(types[e[0]], types[e[1]]), max(types[e[0]], types[e[1]]), e))
        return TestResult(FIX if len(cand) == 1 else BRANCH, e, i)
    return TestResult(SUCCESS)


# ---------------------------------------------------------------------------
# packing construction


class PackingClassError(ValueError):
    pass


def verify_packing_class(problem: Problem, edges: Sequence[Sequence[int]]) -> str | None:
    """Name of the first violated property (P1, P2, P3) or ``None``."""
    n, full = problem.n, problem.full
    for i in range(problem.d):
        adj = edges[i]
        for v in range(n):
            if adj[v] >> v & 1 or any(not adj[u] >> v & 1 for u in bits(adj[v])):
                return "P1"
        co = [full & ~adj[v] & ~(1 << v) for v in range(n)]
        orient = transitive_orientation(co, full)
        if not isinstance(orient, list) or find_c4(adj, full) is not None:
            return "P1"
        if max_weight_chain(orient, full, problem.widths[i])[1] > problem.W[i]:
            return "P2"
    for v in range(n):
        acc = full & ~(1 << v)
        for i in range(problem.d):
            acc &= edges[i][v]
        if acc:
            return "P3"
    return None


def build_packing(problem: Problem, edges: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Coordinates for every box from a packing class (local box order)."""
    bad = verify_packing_class(problem, edges)
    if bad is not None:
        raise PackingClassError(f"not a packing class: {bad} fails")
    n, full = problem.n, problem.full
    coords = [[0] * problem.d for _ in range(n)]
    for i in range(problem.d):
        co = [full & ~edges[i][v] & ~(1 << v) for v in range(n)]
        succ = transitive_orientation(co, full)
        pred = [0] * n
        for v in range(n):
            for u in bits(succ[v]):
                pred[u] |= 1 << v
        w = problem.widths[i]
        # predecessors of v are a superset of those of any predecessor
        for v in sorted(range(n), key=lambda v: bin(pred[v]).count("1")):
            coords[v][i] = max((coords[u][i] + w[u] for u in bits(pred[v])), default=0)
    return [tuple(c) for c in coords]


def edges_of_packing(problem: Problem, coords: Sequence[Sequence[int]]) -> list[list[int]]:
    """Overlap graphs of a concrete packing, one bitset list per direction."""
    n = problem.n
    out = [[0] * n for _ in range(problem.d)]
    for i in range(problem.d):
        w = problem.widths[i]
        for u in range(n):
            for v in range(u + 1, n):
                if coords[u][i] < coords[v][i] + w[v] and coords[v][i] < coords[u][i] + w[u]:
                    out[i][u] |= 1 << v
                    out[i][v] |= 1 << u
    return out

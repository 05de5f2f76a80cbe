"""Graph algorithms on bitset adjacency.

A graph on vertices ``0..n-1`` is a sequence ``adj`` of ints where bit ``u``
of ``adj[v]`` is set iff ``uv`` is an edge. Most functions take an extra
vertex mask and work on the induced subgraph, which is how the packing
search uses them.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple[int, ...]
    weights: tuple[int, ...] | None = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], weights: Sequence[int] | None = None) -> "Graph":
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError("self-loops are not allowed")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj), tuple(weights) if weights is not None else None)

    @property
    def mask(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits(self.adj[u] >> (u + 1) << (u + 1))]

    def complement(self) -> "Graph":
        full = self.mask
        return Graph(self.n, tuple(full & ~a & ~(1 << v) for v, a in enumerate(self.adj)), self.weights)


@dataclass(frozen=True)
class Orientation:
    """Directed edges as successor bitsets: bit ``u`` of ``succ[v]`` means v -> u."""

    succ: tuple[int, ...]

    def pairs(self) -> dict[frozenset, tuple[int, int]]:
        return {frozenset((v, u)): (v, u) for v, s in enumerate(self.succ) for u in bits(s)}

    def is_transitive(self) -> bool:
        for v, s in enumerate(self.succ):
            for u in bits(s):
                if self.succ[u] & ~s:
                    return False
        return True


@dataclass(frozen=True)
class OddCycleCertificate:
    """Closed walk ``cycle[0] .. cycle[k-1]`` of odd length without 2-chords.

    Consecutive vertices are adjacent, vertices two apart are not. A vertex
    may reappear, but never at distance two from itself in a way that would
    form a triangle.
    """

    cycle: tuple[int, ...]

    def edges(self) -> set[tuple[int, int]]:
        k = len(self.cycle)
        return {tuple(sorted((self.cycle[j], self.cycle[(j + 1) % k]))) for j in range(k)}

    def is_valid(self, adj: Sequence[int]) -> bool:
        k = len(self.cycle)
        if k < 5 or k % 2 == 0:
            return False
        for j in range(k):
            a, b, c = self.cycle[j], self.cycle[(j + 1) % k], self.cycle[(j + 2) % k]
            if not adj[a] >> b & 1 or adj[a] >> c & 1:
                return False
        return True


def transitive_orientation(adj: Sequence[int], mask: int) -> list[int] | tuple[int, int]:
    """Orient the subgraph induced by ``mask`` transitively.

    Implication classes are peeled off one by one (the G-decomposition);
    returns the successor bitsets, or the edge ``(a, b)`` whose class was
    found to contain both ``a -> b`` and ``b -> a``.
    """
    n = len(adj)
    rem = [adj[v] & mask if mask >> v & 1 else 0 for v in range(n)]
    succ = [0] * n
    for v in bits(mask):
        while rem[v]:
            u = (rem[v] & -rem[v]).bit_length() - 1
            fwd = [0] * n
            fwd[v] = 1 << u
            stack = [(v, u)]
            arcs = [(v, u)]
            while stack:
                a, b = stack.pop()
                ra, rb = rem[a], rem[b]
                # a -> b forces a -> b2 for b2 adjacent to a but not to b
                for b2 in bits(ra & ~rb & ~(1 << b) & ~fwd[a]):
                    if fwd[b2] >> a & 1:
                        return (a, b2)
                    fwd[a] |= 1 << b2
                    stack.append((a, b2))
                    arcs.append((a, b2))
                # ... and a2 -> b for a2 adjacent to b but not to a
                for a2 in bits(rb & ~ra & ~(1 << a)):
                    if fwd[a2] >> b & 1:
                        continue
                    if fwd[b] >> a2 & 1:
                        return (a2, b)
                    fwd[a2] |= 1 << b
                    stack.append((a2, b))
                    arcs.append((a2, b))
            for a, b in arcs:
                succ[a] |= 1 << b
                rem[a] &= ~(1 << b)
                rem[b] &= ~(1 << a)
    return succ


def odd_cycle_certificate(adj: Sequence[int], mask: int, hint: tuple[int, int] | None = None) -> tuple[int, ...] | None:
    """Closed walk of odd length whose 2-chords are all missing.

    Works on arcs ``(u, v)``: a step ``(u, v) -> (v, w)`` is allowed when
    ``vw`` is an edge and ``uw`` is not. An odd closed walk of such steps
    forces every orientation to flip an edge against itself. The search
    starts from ``hint`` (the edge a failed orientation tripped over), where
    a walk is almost always found at once; the walk returned is the shortest
    one through its first arc.
    """
    n = len(adj)
    lim = [adj[v] & mask for v in range(n)]
    starts: list[tuple[int, int]] = []
    if hint is not None:
        starts += [hint, (hint[1], hint[0])]
    starts += [(u, v) for u in bits(mask) for v in bits(lim[u])]
    seen = set()
    for s in starts:
        if s in seen:
            continue
        seen.add(s)
        found = _odd_walk_from(lim, s)
        if found is not None:
            return found
    return None


def _odd_walk_from(lim: Sequence[int], start: tuple[int, int]) -> tuple[int, ...] | None:
    # BFS over (arc, parity); parent pointers rebuild the walk
    parent: dict[tuple[int, int, int], tuple[int, int, int] | None] = {(start[0], start[1], 0): None}
    frontier = deque([(start[0], start[1], 0, 0)])
    while frontier:
        u, v, par, dist = frontier.popleft()
        for w in bits(lim[v] & ~lim[u]):
            state = (v, w, par ^ 1)
            if (v, w) == start and par == 0:
                # closing step from parity 0 gives an odd walk
                walk = [u]
                node = (u, v, par)
                while parent[node] is not None:
                    node = parent[node]
                    walk.append(node[0])
                walk.reverse()
                return tuple(walk)
            if state in parent:
                continue
            parent[state] = (u, v, par)
            frontier.append((v, w, par ^ 1, dist + 1))
    return None


def recognize_comparability(graph: Graph, mask: int | None = None) -> Orientation | OddCycleCertificate:
    """Transitive orientation of ``graph`` or a certificate that none exists."""
    mask = graph.mask if mask is None else mask
    res = transitive_orientation(graph.adj, mask)
    if isinstance(res, list):
        return Orientation(tuple(res))
    cyc = odd_cycle_certificate(graph.adj, mask, res)
    assert cyc is not None, "non-comparability without an odd 2-chordless walk"
    return OddCycleCertificate(cyc)


def max_weight_chain(succ: Sequence[int], mask: int, weights: Sequence[int]) -> tuple[int, int]:
    """Heaviest chain (clique) of a transitive orientation restricted to ``mask``.

    Returns ``(vertex mask, weight)``.
    """
    n = len(succ)
    pred = [0] * n
    verts = list(bits(mask))
    for v in verts:
        for u in bits(succ[v] & mask):
            pred[u] |= 1 << v
    # in a transitive DAG a successor has strictly more predecessors
    verts.sort(key=lambda v: popcount(pred[v]))
    best = {}
    back = {}
    top, top_v = -1, -1
    for v in verts:
        b, arg = 0, -1
        for u in bits(pred[v]):
            if best[u] > b:
                b, arg = best[u], u
        best[v] = b + weights[v]
        back[v] = arg
        if best[v] > top:
            top, top_v = best[v], v
    if top_v < 0:
        return 0, 0
    chosen = 0
    v = top_v
    while v >= 0:
        chosen |= 1 << v
        v = back[v]
    return chosen, top


def max_weight_clique_comparability(graph: Graph, orientation: Orientation, weights: Sequence[int]) -> tuple[set[int], int]:
    chosen, weight = max_weight_chain(orientation.succ, graph.mask, weights)
    return set(bits(chosen)), weight


def brute_max_weight_clique(adj: Sequence[int], mask: int, weights: Sequence[int]) -> tuple[int, int]:
    """Exact max-weight clique by enumeration; meant for tiny vertex sets."""
    verts = list(bits(mask))
    best, best_w = 0, 0

    def grow(i: int, cur: int, cand: int, w: int) -> None:
        nonlocal best, best_w
        if w > best_w:
            best, best_w = cur, w
        for j in range(i, len(verts)):
            v = verts[j]
            if cand >> v & 1:
                grow(j + 1, cur | 1 << v, cand & adj[v], w + weights[v])

    grow(0, 0, mask, 0)
    return best, best_w


def find_c4(adj: Sequence[int], mask: int) -> tuple[int, int, int, int] | None:
    """An induced 4-cycle ``a-b-c-d-a`` (chords ``ac`` and ``bd`` absent)."""
    for a in bits(mask):
        na = adj[a] & mask
        for b in bits(na):
            # d: other neighbour of a, not adjacent to b
            for d in bits(na & ~adj[b] & ~(1 << b)):
                if d < b:
                    continue
                cands = adj[b] & adj[d] & mask & ~adj[a] & ~(1 << a)
                if cands:
                    c = (cands & -cands).bit_length() - 1
                    return (a, b, c, d)
    return None


def find_induced_c4(graph: Graph) -> tuple[tuple[int, int, int, int], tuple[tuple[int, int], tuple[int, int]]] | None:
    found = find_c4(graph.adj, graph.mask)
    if found is None:
        return None
    a, b, c, d = found
    return found, (tuple(sorted((a, c))), tuple(sorted((b, d))))


def greedy_clique(adj: Sequence[int], seed: int, candidates: int, weights: Sequence[int]) -> int:
    """Grow the clique ``seed`` by heaviest compatible vertices (ties: smaller id)."""
    chosen = seed
    cand = candidates & ~seed
    for v in bits(seed):
        cand &= adj[v]
    while cand:
        best_v, best_w = -1, -1
        for v in bits(cand):
            if weights[v] > best_w:
                best_v, best_w = v, weights[v]
        chosen |= 1 << best_v
        cand &= adj[best_v]
    return chosen


def greedy_clique_extend(graph: Graph, seed: Iterable[int], weights: Sequence[int]) -> list[int]:
    """Public form of :func:`greedy_clique`; returns vertices in insertion order."""
    seed_mask = 0
    order = []
    for v in sorted(seed):
        seed_mask |= 1 << v
        order.append(v)
    for u in order:
        if (seed_mask & ~(1 << u)) & ~graph.adj[u]:
            raise ValueError("seed is not a clique")
    cand = graph.mask & ~seed_mask
    for v in order:
        cand &= graph.adj[v]
    while cand:
        best_v = max(bits(cand), key=lambda v: (weights[v], -v))
        order.append(best_v)
        cand &= graph.adj[best_v]
    return order

import bisect
import random
from fractions import Fraction

from orthopack.model import BoxType, Instance


def overlap_free(instance, packing):
    """Direct pairwise check, independent of validate_packing."""
    ids = list(packing)
    d = instance.d
    bounded = d - 1 if instance.kind == "strip" else d
    for b in ids:
        x, w = packing[b], instance.boxes[b].sizes
        if any(x[i] < 0 for i in range(d)):
            return False
        if any(x[i] + w[i] > instance.W[i] for i in range(bounded)):
            return False
    for a in range(len(ids)):
        for c in range(a + 1, len(ids)):
            p, q = packing[ids[a]], packing[ids[c]]
            s, t = instance.boxes[ids[a]].sizes, instance.boxes[ids[c]].sizes
            if all(p[i] < q[i] + t[i] and q[i] < p[i] + s[i] for i in range(d)):
                return False
    return True


def random_decision(rng, max_boxes=5, max_extent=10, d=2, tight=False):
    """Random OPP instance; ``tight`` aims at total volume near the container's."""
    W = tuple(rng.randint(2, max_extent) for _ in range(d))
    n = rng.randint(1, max_boxes)
    types = []
    for _ in range(n):
        if tight:
            sizes = tuple(rng.randint(max(1, w // 4), max(1, (2 * w) // 3)) for w in W)
        else:
            sizes = tuple(rng.randint(1, w) for w in W)
        types.append(BoxType(sizes, 0, 1))
    # merge equal sizes into counts so the type machinery gets exercised
    merged = {}
    for bt in types:
        merged[bt.sizes] = merged.get(bt.sizes, 0) + 1
    return Instance(W, tuple(BoxType(s, 0, c) for s, c in sorted(merged.items())), "decision")


def random_knapsack(rng, max_boxes=8, max_extent=12, d=2):
    W = tuple(rng.randint(3, max_extent) for _ in range(d))
    types, left = [], rng.randint(1, max_boxes)
    while left:
        c = rng.randint(1, min(3, left))
        sizes = tuple(rng.randint(1, w) for w in W)
        types.append(BoxType(sizes, rng.randint(0, 40), c))
        left -= c
    return Instance(W, tuple(types), "knapsack")


def seeded(seed):
    return random.Random(seed)


def farey(max_den):
    return sorted({Fraction(p, q) for q in range(1, max_den + 1) for p in range(q + 1)})


def worst_multiset_sum(u, xs, size=4):
    """Exact max of ``sum(u(x))`` over multisets of ``xs`` with ``len <= size`` and ``sum <= 1``.

    0 must be in ``xs`` so smaller multisets are included. Works on pairs:
    all pairs sorted by sum, prefix maxima of their u-sums, then one lookup
    per first pair (sizes 2 and 4 only, so ``size`` must be 2 or 4).
    """
    if size == 2:
        return max(u(a) + u(b) for a in xs for b in xs if a + b <= 1)
    assert size == 4
    pairs = sorted((a + b, u(a) + u(b)) for i, a in enumerate(xs) for b in xs[i:] if a + b <= 1)
    sums = [s for s, _ in pairs]
    best, prefix = None, []
    for _, val in pairs:
        best = val if best is None else max(best, val)
        prefix.append(best)
    top = None
    for s, val in pairs:
        j = bisect.bisect_right(sums, 1 - s) - 1
        if j >= 0:
            cand = val + prefix[j]
            top = cand if top is None else max(top, cand)
    return top


# -- acceptance reporting ------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

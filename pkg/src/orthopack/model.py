"""Instances, packings, the canonical text format and the random generator."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

KINDS = ("knapsack", "decision", "strip")


class InstanceError(ValueError):
    """Malformed instance text or an instance violating its invariants."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


@dataclass(frozen=True)
class BoxType:
    sizes: tuple[int, ...]
    value: int = 0
    count: int = 1

    @property
    def volume(self) -> int:
        return math.prod(self.sizes)


@dataclass(frozen=True)
class Box:
    id: int
    type_index: int
    sizes: tuple[int, ...]
    value: int


@dataclass(frozen=True)
class Instance:
    """A container with extents ``W`` and an ordered list of box types.

    Boxes of one type occupy a contiguous id range, so the first ``k``
    boxes of type ``t`` are ``type_start[t] .. type_start[t] + k - 1``.
    For ``kind == "strip"`` the last direction is open and ``W[-1]`` is
    only an upper bound that solvers ignore.
    """

    W: tuple[int, ...]
    types: tuple[BoxType, ...]
    kind: str = "knapsack"
    name: str = ""
    boxes: tuple[Box, ...] = field(init=False, repr=False, compare=False)
    type_start: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "W", tuple(int(x) for x in self.W))
        object.__setattr__(self, "types", tuple(self.types))
        self._check()
        boxes, starts = [], []
        for t, bt in enumerate(self.types):
            starts.append(len(boxes))
            for _ in range(bt.count):
                boxes.append(Box(len(boxes), t, bt.sizes, bt.value))
        object.__setattr__(self, "boxes", tuple(boxes))
        object.__setattr__(self, "type_start", tuple(starts))

    def _check(self) -> None:
        if self.kind not in KINDS:
            raise InstanceError(f"unknown kind {self.kind!r}")
        d = len(self.W)
        if d < 1:
            raise InstanceError("dimension must be positive")
        if any(x < 1 for x in self.W):
            raise InstanceError(f"container extents must be >= 1, got {self.W}")
        if not self.types:
            raise InstanceError("at least one box type is required")
        bounded = d - 1 if self.kind == "strip" else d
        for t, bt in enumerate(self.types):
            if len(bt.sizes) != d:
                raise InstanceError(f"type {t}: expected {d} sizes, got {len(bt.sizes)}")
            if any(s < 1 for s in bt.sizes):
                raise InstanceError(f"type {t}: sizes must be >= 1, got {bt.sizes}")
            if bt.count < 1:
                raise InstanceError(f"type {t}: count must be >= 1")
            if bt.value < 0:
                raise InstanceError(f"type {t}: value must be >= 0")
            for i in range(bounded):
                if bt.sizes[i] > self.W[i]:
                    raise InstanceError(
                        f"type {t}: size {bt.sizes[i]} exceeds container extent {self.W[i]} in direction {i + 1}"
                    )

    @property
    def d(self) -> int:
        return len(self.W)

    @property
    def m(self) -> int:
        return len(self.types)

    @property
    def n(self) -> int:
        return len(self.boxes)

    def subset_for_counts(self, counts: Sequence[int]) -> list[int]:
        """Box ids of the first ``counts[t]`` boxes of every type."""
        ids = []
        for t, k in enumerate(counts):
            s = self.type_start[t]
            ids.extend(range(s, s + k))
        return ids

    def counts_for_subset(self, subset: Iterable[int]) -> tuple[int, ...]:
        counts = [0] * self.m
        for b in subset:
            counts[self.boxes[b].type_index] += 1
        return tuple(counts)

    def value_of(self, subset: Iterable[int]) -> int:
        return sum(self.boxes[b].value for b in subset)

    def with_container(self, W: Sequence[int], kind: str | None = None) -> "Instance":
        return Instance(tuple(W), self.types, kind or self.kind, self.name)


Packing = Mapping[int, tuple[int, ...]]


@dataclass
class Violation:
    kind: str  # "unknown-box", "subset-mismatch", "outside", "overlap"
    boxes: tuple[int, ...]
    direction: int | None
    message: str

    def __str__(self) -> str:
        return self.message


def validate_packing(instance: Instance, subset: Iterable[int], packing: Packing) -> Violation | None:
    """Return ``None`` for a feasible packing, else the first violation found.

    Raises ``KeyError`` for ids that are not boxes of the instance.
    """
    subset = sorted(set(subset))
    for b in list(subset) + list(packing):
        if not 0 <= b < instance.n:
            raise KeyError(f"unknown box id {b}")
    if set(packing) != set(subset):
        extra = sorted(set(packing) ^ set(subset))
        return Violation("subset-mismatch", tuple(extra), None, f"packing and subset differ on boxes {extra}")
    d = instance.d
    bounded = d - 1 if instance.kind == "strip" else d
    for b in subset:
        x, w = packing[b], instance.boxes[b].sizes
        if len(x) != d:
            return Violation("outside", (b,), None, f"box {b}: expected {d} coordinates")
        for i in range(d):
            if x[i] < 0 or (i < bounded and x[i] + w[i] > instance.W[i]):
                return Violation("outside", (b,), i, f"box {b} leaves the container in direction {i + 1}")
    for k, b in enumerate(subset):
        xb, wb = packing[b], instance.boxes[b].sizes
        for c in subset[k + 1:]:
            xc, wc = packing[c], instance.boxes[c].sizes
            if all(xb[i] < xc[i] + wc[i] and xc[i] < xb[i] + wb[i] for i in range(d)):
                return Violation("overlap", (b, c), None, f"boxes {b} and {c} overlap in every direction")
    return None


# ---------------------------------------------------------------------------
# canonical text format
#
#   # name: <name>          optional
#   # kind: <kind>          knapsack | decision | strip
#   d
#   W_1 .. W_d
#   m
#   w_1 .. w_d value count  (m lines)
#
# '#' starts a comment; blank lines are ignored.


def _tokens(text: str) -> tuple[list[tuple[int, int, str]], dict[str, str]]:
    toks, meta = [], {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw
        if "#" in line:
            comment = line[line.index("#") + 1:].strip()
            line = line[: line.index("#")]
            if ":" in comment:
                key, _, val = comment.partition(":")
                if key.strip() in ("name", "kind"):
                    meta[key.strip()] = val.strip()
        col = 0
        for part in line.split():
            col = raw.index(part, col) + 1
            toks.append((lineno, col, part))
            col += len(part) - 1
    return toks, meta


def _int(tok: tuple[int, int, str]) -> int:
    lineno, col, s = tok
    try:
        return int(s)
    except ValueError:
        raise InstanceError(f"expected an integer, got {s!r}", lineno, col) from None


def parse_instance(text: str, format: str = "canonical") -> Instance:
    """Parse one instance. ``orlib_import`` returns the first problem of the file."""
    if format == "orlib_import":
        from .orlib import parse_orlib

        return parse_orlib(text)[0]
    if format != "canonical":
        raise ValueError(f"unknown format {format!r}")
    toks, meta = _tokens(text)
    pos = 0

    def take() -> tuple[int, int, str]:
        nonlocal pos
        if pos >= len(toks):
            last = toks[-1][0] if toks else 1
            raise InstanceError("unexpected end of input", last)
        pos += 1
        return toks[pos - 1]

    d_tok = take()
    d = _int(d_tok)
    if d < 1:
        raise InstanceError("dimension must be positive", d_tok[0], d_tok[1])
    W = tuple(_int(take()) for _ in range(d))
    m_tok = take()
    m = _int(m_tok)
    if m < 1:
        raise InstanceError("type count must be positive", m_tok[0], m_tok[1])
    types = []
    for _ in range(m):
        first = take()
        sizes = (_int(first),) + tuple(_int(take()) for _ in range(d - 1))
        value, count = _int(take()), _int(take())
        if any(s < 1 for s in sizes) or count < 1 or value < 0:
            raise InstanceError(f"invalid box type {sizes} value={value} count={count}", first[0], first[1])
        types.append(BoxType(sizes, value, count))
    if pos != len(toks):
        lineno, col, s = toks[pos]
        raise InstanceError(f"trailing token {s!r}", lineno, col)
    try:
        return Instance(W, tuple(types), meta.get("kind", "knapsack"), meta.get("name", ""))
    except InstanceError as exc:
        raise InstanceError(str(exc), m_tok[0]) from None


def serialize_instance(instance: Instance, format: str = "canonical") -> str:
    if format != "canonical":
        raise ValueError(f"unknown format {format!r}")
    lines = []
    if instance.name:
        lines.append(f"# name: {instance.name}")
    lines.append(f"# kind: {instance.kind}")
    lines.append(str(instance.d))
    lines.append(" ".join(map(str, instance.W)))
    lines.append(str(instance.m))
    for bt in instance.types:
        lines.append(" ".join(map(str, (*bt.sizes, bt.value, bt.count))))
    return "\n".join(lines) + "\n"


def load_instance(path, format: str = "canonical") -> Instance:
    with open(path, encoding="utf-8") as fh:
        inst = parse_instance(fh.read(), format)
    return inst


# ---------------------------------------------------------------------------
# random generator

BULKY, SMALL, LARGE = (75, 100), (1, 50), (50, 100)

SIZE_CLASSES = {
    2: [(SMALL, BULKY), (BULKY, SMALL), (LARGE, LARGE), (SMALL, SMALL)],
    3: [
        (SMALL, BULKY, BULKY),
        (BULKY, SMALL, BULKY),
        (BULKY, BULKY, SMALL),
        (LARGE, LARGE, LARGE),
        (SMALL, SMALL, SMALL),
    ],
}

CLASS_PROBABILITIES = {
    2: {"I": (20, 20, 20, 40), "II": (15, 15, 15, 55), "III": (10, 10, 10, 70)},
    3: {"I": (20, 20, 20, 20, 20), "II": (15, 15, 15, 15, 40), "III": (10, 10, 10, 10, 60)},
}


def generate_instance(dimension: int, instance_type: str, m: int, nu: int, seed: int) -> Instance:
    """Random OKP instance in a container of extent 100 per direction.

    Each type picks a size class with the row probabilities of its instance
    type, draws integer sizes uniformly from the class ranges and gets
    value = volume * uniform{1, 2, 3}.
    """
    if dimension not in SIZE_CLASSES:
        raise ValueError("dimension must be 2 or 3")
    if m < 1 or nu < 1:
        raise ValueError("m and nu must be positive")
    types = [bt for _, bt in generate_types(dimension, instance_type, m, nu, seed)]
    name = f"gen{dimension}d-{instance_type}-m{m}-nu{nu}-s{seed}"
    return Instance((100,) * dimension, tuple(types), "knapsack", name)


def generate_types(dimension: int, instance_type: str, m: int, nu: int, seed: int) -> list[tuple[int, BoxType]]:
    """The generator's draws as ``(size class index, box type)`` pairs."""
    weights = CLASS_PROBABILITIES[dimension][instance_type]
    classes = SIZE_CLASSES[dimension]
    rng = random.Random(seed)
    out = []
    for _ in range(m):
        cls = rng.choices(range(len(classes)), weights=weights)[0]
        sizes = tuple(rng.randint(lo, hi) for lo, hi in classes[cls])
        value = math.prod(sizes) * rng.randint(1, 3)
        out.append((cls, BoxType(sizes, value, nu)))
    return out


def size_class_of(sizes: Sequence[int], dimension: int) -> list[int]:
    """Indices of the size classes whose ranges contain ``sizes``."""
    return [
        k for k, ranges in enumerate(SIZE_CLASSES[dimension])
        if all(lo <= s <= hi for s, (lo, hi) in zip(sizes, ranges))
    ]

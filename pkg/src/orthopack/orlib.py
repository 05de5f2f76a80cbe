"""Importer for OR-library style cutting files.

The files are whitespace separated integers. A file holds either one
problem or a leading problem count followed by that many problems; each
problem is ``m``, the container extents, then ``m`` rows. The row layout
differs between collections, so it is a parameter: a sequence of column
names out of ``w1 .. wd``, ``value``, ``count`` and ``skip``. A missing
``value`` column means value = volume; a missing ``count`` means as many
copies as fit side by side.
"""

from __future__ import annotations

import math
from typing import Sequence

from .model import BoxType, Instance, InstanceError

# length, width, max count, value as in the constrained non-guillotine files
NGCUT_COLUMNS = ("w1", "w2", "count", "value")
# length, width, value as in the unconstrained guillotine files
GCUT_COLUMNS = ("w1", "w2", "value")


class _Reader:
    def __init__(self, text: str):
        self.toks: list[tuple[int, int, str]] = []
        for ln, line in enumerate(text.splitlines(), 1):
            col = 0
            for tok in line.split():
                col = line.index(tok, col) + 1
                self.toks.append((ln, col, tok))
                col += len(tok) - 1
        self.pos = 0

    def done(self) -> bool:
        return self.pos >= len(self.toks)

    def int(self, what: str) -> int:
        if self.done():
            raise InstanceError(f"unexpected end of input, expected {what}")
        ln, col, tok = self.toks[self.pos]
        self.pos += 1
        try:
            return int(tok)
        except ValueError:
            raise InstanceError(f"expected integer {what}, got {tok!r}", ln, col) from None

    def where(self) -> tuple[int | None, int | None]:
        if self.done():
            return None, None
        ln, col, _ = self.toks[self.pos]
        return ln, col


def _fit_count(sizes: Sequence[int], W: Sequence[int]) -> int:
    return math.prod(w // s for w, s in zip(W, sizes))


def _problem(r: _Reader, d: int, columns: Sequence[str], name: str, drop_oversized: bool) -> Instance:
    m = r.int("type count")
    if m < 1:
        raise InstanceError("type count must be positive", *r.where())
    W = tuple(r.int(f"container extent {i + 1}") for i in range(d))
    types = []
    for row in range(m):
        ln, col = r.where()
        fields: dict[str, int] = {}
        for c in columns:
            fields[c] = r.int(c)
        sizes = tuple(fields[f"w{i + 1}"] for i in range(d))
        if any(s <= 0 for s in sizes):
            raise InstanceError(f"row {row + 1}: sizes must be positive", ln, col)
        if any(s > w for s, w in zip(sizes, W)):
            if drop_oversized:
                continue
            raise InstanceError(f"row {row + 1}: box {sizes} exceeds container {W}", ln, col)
        value = fields.get("value", math.prod(sizes))
        fit = _fit_count(sizes, W)
        # more copies than fit side by side can never be packed
        count = min(fields.get("count", fit), fit)
        if count < 1:
            continue
        types.append(BoxType(sizes, value, count))
    if not types:
        raise InstanceError(f"problem {name or '?'} has no usable box types")
    return Instance(W, tuple(types), "knapsack", name)


def parse_orlib(text: str, columns: Sequence[str] = NGCUT_COLUMNS, d: int = 2, multi: bool | None = None,
                name: str = "", drop_oversized: bool = False) -> list[Instance]:
    """All problems of an OR-library file.

    ``multi=None`` guesses: the file is a collection when its token count
    does not match a single problem.
    """
    for c in columns:
        if c not in ("value", "count", "skip") and not (c.startswith("w") and c[1:].isdigit() and 1 <= int(c[1:]) <= d):
            raise ValueError(f"unknown column {c!r}")
    if any(f"w{i + 1}" not in columns for i in range(d)):
        raise ValueError("every size column w1 .. wd is required")
    r = _Reader(text)
    if multi is None:
        probe = _Reader(text)
        try:
            m = probe.int("type count")
            multi = len(probe.toks) != 1 + d + m * len(columns)
        except InstanceError:
            multi = False
    count = r.int("problem count") if multi else 1
    out = []
    for k in range(count):
        label = f"{name}{k + 1}" if multi and name else name
        out.append(_problem(r, d, columns, label, drop_oversized))
    if not r.done():
        raise InstanceError("trailing data after the last problem", *r.where())
    return out

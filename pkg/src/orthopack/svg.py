"""Static renderings of packings: SVG for d = 2, text slices for d = 3."""

from __future__ import annotations

import colorsys
from typing import Mapping, Sequence

from .model import Instance, InstanceError, validate_packing

CANVAS = 600
MARGIN = 10


def type_color(t: int) -> str:
    # golden-ratio hue steps keep neighbouring types apart
    h = (t * 0.618033988749895) % 1.0
    r, g, b = colorsys.hls_to_rgb(h, 0.6, 0.55)
    return f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}"


def emit_svg(instance: Instance, packing: Mapping[int, Sequence[int]], height: int | None = None) -> str:
    """SVG of a 2-D packing, origin at the bottom left.

    ``height`` overrides the second extent, e.g. for strip instances.
    """
    if instance.d != 2:
        raise ValueError("SVG output needs d = 2")
    W = instance.W if height is None else (instance.W[0], height)
    check = instance.with_container(W, "decision")
    bad = validate_packing(check, packing.keys(), packing)
    if bad is not None:
        raise InstanceError(f"refusing to draw an invalid packing: {bad}")
    scale = (CANVAS - 2 * MARGIN) / max(W)
    cw, ch = W[0] * scale + 2 * MARGIN, W[1] * scale + 2 * MARGIN
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{cw:.0f}" height="{ch:.0f}" viewBox="0 0 {cw:.2f} {ch:.2f}">',
        f'<rect class="frame" x="{MARGIN}" y="{MARGIN}" width="{W[0] * scale:.2f}" height="{W[1] * scale:.2f}" '
        'fill="white" stroke="black" stroke-width="2"/>',
    ]
    for b in sorted(packing):
        box = instance.boxes[b]
        x, y = packing[b]
        w, h = box.sizes
        top = MARGIN + (W[1] - y - h) * scale
        out.append(
            f'<rect class="box" data-box="{b}" data-type="{box.type_index}" x="{MARGIN + x * scale:.2f}" '
            f'y="{top:.2f}" width="{w * scale:.2f}" height="{h * scale:.2f}" '
            f'fill="{type_color(box.type_index)}" stroke="black" stroke-width="1"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def layer_slices(instance: Instance, packing: Mapping[int, Sequence[int]]) -> str:
    """Text listing of a packing cut at every distinct start of the last coordinate."""
    if not packing:
        return "(empty packing)\n"
    levels = sorted({p[-1] for p in packing.values()})
    lines = []
    for z in levels:
        lines.append(f"layer x{instance.d - 1} = {z}:")
        for b in sorted(packing):
            p, s = packing[b], instance.boxes[b].sizes
            if p[-1] <= z < p[-1] + s[-1]:
                span = " x ".join(f"[{p[i]},{p[i] + s[i]})" for i in range(instance.d - 1))
                lines.append(f"  box {b} (type {instance.boxes[b].type_index}) {span}")
    return "\n".join(lines) + "\n"

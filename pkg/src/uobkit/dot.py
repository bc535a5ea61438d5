"""GraphViz export of hypercube colorings."""

from __future__ import annotations

import colorsys
from typing import Optional, Sequence

from .coloring import EdgeColoring
from .cube import CubeError

MAX_DOT_DIM = 6

# Names GraphViz understands that also occur as color names in the fixtures.
_X11 = {
    "red", "blue", "green", "violet", "purple", "brown", "orange", "black",
    "cyan", "magenta", "yellow", "gold", "gray", "pink", "navy", "teal",
}


def palette(k: int) -> list[str]:
    """``k`` distinct colors spread evenly around the hue circle."""
    out = []
    for i in range(k):
        r, g, b = colorsys.hsv_to_rgb(i / max(k, 1), 0.85, 0.8 if i % 2 else 0.95)
        out.append(f"#{round(r * 255):02x}{round(g * 255):02x}{round(b * 255):02x}")
    if len(set(out)) != k:
        raise ValueError(f"palette collision for {k} colors")
    return out


def _position(v: int, n: int, scale: float) -> tuple[float, float]:
    # Low bits go along x, high bits along y, with a skew per extra bit so that
    # Q_3 looks like the usual drawn cube.
    x = y = 0.0
    step = scale
    for d in range(n):
        bit = (v >> d) & 1
        if d % 2 == 0:
            x += bit * step
        else:
            y += bit * step
        if d >= 2:
            x += bit * step * 0.35
        if d % 2 == 1:
            step *= 2.6
    return x, y


def export_dot(
    c: EdgeColoring,
    color_names: Optional[Sequence[str]] = None,
    layout: str = "cube",
    scale: float = 1.5,
    title: Optional[str] = None,
) -> str:
    """DOT text with one styled edge per hypercube edge.

    ``layout="cube"`` pins vertex positions (use ``neato -n``); ``"auto"``
    leaves placement to GraphViz.
    """
    if c.n > MAX_DOT_DIM:
        raise CubeError(f"DOT export supports n <= {MAX_DOT_DIM}")
    if layout not in ("cube", "auto"):
        raise ValueError(f"unknown layout {layout!r}")
    k = max(c.colors) + 1
    names = list(color_names) if color_names else [f"c{i}" for i in range(k)]
    if len(names) < k:
        raise ValueError(f"{k} colors but only {len(names)} names")
    generated = palette(k)
    styles = [names[i] if names[i] in _X11 else generated[i] for i in range(k)]
    if len(set(styles)) != k:
        styles = generated

    lines = [f'graph "{title or f"Q{c.n}"}" {{']
    lines.append(f'  label="{len(set(c.colors))} colors";')
    lines.append("  node [shape=circle, fontsize=10];")
    lines.append("  edge [penwidth=2];")
    for v in range(1 << c.n):
        attrs = f'label="{v}"'
        if layout == "cube":
            x, y = _position(v, c.n, scale)
            attrs += f', pos="{x * 72:.1f},{y * 72:.1f}!"'
        lines.append(f"  {v} [{attrs}];")
    for e in c.cube.edges():
        a, b = e.endpoints
        i = c.color_of(e)
        lines.append(f'  {a} -- {b} [color="{styles[i]}", tooltip="{names[i]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"

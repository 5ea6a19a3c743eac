"""SVG storyline figures.

Layer ``r`` sits at column ``r``; every character is one x-monotone line
through the slots of its nodes. Lines are straight between columns unless
``smooth`` is set, in which case each step is a cubic with flat tangents.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

import svgwrite

from storymin.mlcm.crossings import count_crossings
from storymin.mlcm.instance import MlcmInstance, Solution
from storymin.render.slots import assign_slots

logger = logging.getLogger(__name__)

PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
)


@dataclass
class RenderOptions:
    column_width: float = 60.0
    row_height: float = 12.0
    margin: float = 20.0
    label_width: float = 90.0
    font_size: float = 10.0
    stroke_width: float = 2.0
    smooth: bool = False

    def __post_init__(self):
        if self.column_width <= 0 or self.row_height <= 0:
            raise ValueError("column width and row height must be positive")


def line_chains(instance: MlcmInstance) -> List[List[int]]:
    """Maximal paths that follow single edges from layer to layer."""
    down, up = instance.down, instance.up
    chains = []
    for layer in instance.layers:
        for v in layer:
            prev = up[v]
            if len(prev) == 1 and len(down[prev[0]]) == 1:
                continue
            chain = [v]
            while len(down[chain[-1]]) == 1 and len(up[down[chain[-1]][0]]) == 1:
                chain.append(down[chain[-1]][0])
            chains.append(chain)
    return chains


def _fmt(value: float) -> str:
    return f"{value:.2f}".rstrip("0").rstrip(".")


def _path(points: Sequence[Tuple[float, float]]) -> str:
    x0, y0 = points[0]
    parts = [f"M {_fmt(x0)} {_fmt(y0)}"]
    for (xa, ya), (xb, yb) in zip(points, points[1:]):
        mid = (xa + xb) / 2
        parts.append(
            f"C {_fmt(mid)} {_fmt(ya)} {_fmt(mid)} {_fmt(yb)} {_fmt(xb)} {_fmt(yb)}"
        )
    return " ".join(parts)


def render_svg(
    instance: MlcmInstance, sol: Solution, options: Optional[RenderOptions] = None
) -> str:
    options = options or RenderOptions()
    slots = assign_slots(instance, sol)
    crossings = count_crossings(instance, sol)
    height_slots = max((max(layer.values(), default=0) for layer in slots), default=0)

    left = options.margin + options.label_width
    top = options.margin

    def at(r: int, v: int) -> Tuple[float, float]:
        return left + r * options.column_width, top + slots[r][v] * options.row_height

    width = left + max(instance.p - 1, 0) * options.column_width + options.margin
    height = top + height_slots * options.row_height
    height += 2 * options.margin + options.font_size
    dwg = svgwrite.Drawing(size=(_fmt(width), _fmt(height)), debug=False)
    dwg.add(dwg.rect((0, 0), ("100%", "100%"), fill="white"))

    colour: Dict[str, str] = {}
    drawn: Set[Tuple[int, int]] = set()
    lines = dwg.add(
        dwg.g(class_="lines", fill="none", stroke_width=options.stroke_width)
    )
    names = dwg.add(
        dwg.g(class_="names", font_size=options.font_size, font_family="sans-serif")
    )
    for chain in line_chains(instance):
        name = instance.label(chain[0])
        stroke = colour.setdefault(name, PALETTE[len(colour) % len(PALETTE)])
        first = instance.layer_of[chain[0]]
        drawn.update(zip(chain, chain[1:]))
        points = [at(first + k, v) for k, v in enumerate(chain)]
        if len(points) == 1:
            x, y = points[0]
            dot = dwg.circle((_fmt(x), _fmt(y)), r=options.stroke_width, fill=stroke)
            lines.add(dot)
        elif options.smooth:
            lines.add(dwg.path(d=_path(points), stroke=stroke))
        else:
            lines.add(
                dwg.polyline([(_fmt(x), _fmt(y)) for x, y in points], stroke=stroke)
            )
        x, y = points[0]
        names.add(
            dwg.text(
                name,
                insert=(_fmt(x - 4), _fmt(y + options.font_size / 3)),
                text_anchor="end",
                fill=stroke,
            )
        )
    for r, gap in enumerate(instance.edges):
        for u, v in gap:
            if (u, v) not in drawn:
                (xa, ya), (xb, yb) = at(r, u), at(r + 1, v)
                segment = dwg.line((_fmt(xa), _fmt(ya)), (_fmt(xb), _fmt(yb)))
                lines.add(segment.stroke("#555555"))

    dwg.add(
        dwg.text(
            f"crossings={crossings}",
            insert=(_fmt(options.margin), _fmt(height - options.margin / 2)),
            class_="annotation",
            font_size=options.font_size,
            font_family="sans-serif",
        )
    )
    logger.debug("rendered %d layers with %d crossings", instance.p, crossings)
    return dwg.tostring()

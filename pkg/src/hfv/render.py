"""Diagram construction and serialization (JSON + SVG), plus transient
plot payloads.

Visual rules: rectangles carry name, average temperature, and net load,
filled light gray / dark gray / red by load class; solid arrows are
conduction (with the summed conductance bracketed after the heat flow),
dashed arrows are radiation; arrow color and stroke width scale with
heat flow magnitude from blue (low) to red (high).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DatasetValidationError
from .graph import (
    KELVIN_OFFSET,
    LoadClass,
    PairFlowSeries,
    SubmodelGraph,
    kelvin_to_display,
)
from .layout import LayoutKind, LayoutResult
from .model import ConductorKind

DIAGRAM_SCHEMA = "hfv-diagram/1"

FILL_COLORS = {
    LoadClass.NEUTRAL: "#D3D3D3",
    LoadClass.EXCESS_OUTGOING: "#606060",
    LoadClass.EXCESS_INCOMING: "#CC3333",
}
EDGE_COLOR_LOW = (0x1F, 0x4F, 0xCC)  # blue end
EDGE_COLOR_HIGH = (0xCC, 0x1F, 0x1F)  # red end
RADIATIVE_DASH = "6 4"

BOX_HEIGHT = 54.0
CHAR_WIDTH = 8.0
BOX_PADDING = 16.0


@dataclass(frozen=True)
class EdgeStyle:
    color_scalar: float  # 0 = blue end, 1 = red end
    stroke_width: float  # in [1, 4]


def edge_style(q: float, q_min: float, q_max: float) -> EdgeStyle:
    """Style scalar over the displayed edge set; midpoint when degenerate."""
    if not (q_min <= q <= q_max):
        raise DatasetValidationError(f"q={q} outside [{q_min}, {q_max}]")
    if q_max == q_min:
        scalar = 0.5
    else:
        scalar = (q - q_min) / (q_max - q_min)
    return EdgeStyle(color_scalar=scalar, stroke_width=1.0 + 3.0 * scalar)


def format_sig(x: float, sig: int = 3) -> str:
    """Fixed significant figures with trailing zeros kept (20.0, 2.00)."""
    if x == 0:
        return "0.00"
    exponent = math.floor(math.log10(abs(x)))
    decimals = sig - 1 - exponent
    if decimals > 0:
        return f"{x:.{decimals}f}"
    return f"{round(x, decimals):.0f}"


@dataclass
class DiagramBox:
    name: str
    center: tuple[float, float]
    width: float
    height: float
    fill_class: str  # LoadClass value
    label_lines: list[str]


@dataclass
class DiagramArrow:
    from_name: str
    to_name: str
    kind: str  # "linear" | "radiative"
    q_label: str
    g_label: str | None  # linear only
    color: float  # scalar in [0, 1]
    weight: float  # stroke width
    dashed: bool
    q_watts: float


@dataclass
class DiagramSpec:
    boxes: list[DiagramBox]
    arrows: list[DiagramArrow]
    units: dict[str, str]
    timestep: int
    layout_kind: str

    def to_dict(self) -> dict:
        return {
            "schema": DIAGRAM_SCHEMA,
            "units": dict(self.units),
            "timestep": self.timestep,
            "layout_kind": self.layout_kind,
            "boxes": [
                {
                    "name": b.name,
                    "center": list(b.center),
                    "width": b.width,
                    "height": b.height,
                    "fill_class": b.fill_class,
                    "label_lines": list(b.label_lines),
                }
                for b in self.boxes
            ],
            "arrows": [
                {
                    "from": a.from_name,
                    "to": a.to_name,
                    "kind": a.kind,
                    "q_label": a.q_label,
                    "g_label": a.g_label,
                    "color": a.color,
                    "weight": a.weight,
                    "dashed": a.dashed,
                    "q_watts": a.q_watts,
                }
                for a in self.arrows
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "DiagramSpec":
        if data.get("schema") != DIAGRAM_SCHEMA:
            raise DatasetValidationError(
                f"unsupported diagram schema {data.get('schema')!r}"
            )
        boxes = [
            DiagramBox(
                name=b["name"],
                center=(b["center"][0], b["center"][1]),
                width=b["width"],
                height=b["height"],
                fill_class=b["fill_class"],
                label_lines=list(b["label_lines"]),
            )
            for b in data["boxes"]
        ]
        arrows = [
            DiagramArrow(
                from_name=a["from"],
                to_name=a["to"],
                kind=a["kind"],
                q_label=a["q_label"],
                g_label=a["g_label"],
                color=a["color"],
                weight=a["weight"],
                dashed=a["dashed"],
                q_watts=a["q_watts"],
            )
            for a in data["arrows"]
        ]
        return cls(
            boxes=boxes,
            arrows=arrows,
            units=dict(data["units"]),
            timestep=data["timestep"],
            layout_kind=data["layout_kind"],
        )

    @classmethod
    def from_json(cls, text: str) -> "DiagramSpec":
        return cls.from_dict(json.loads(text))


def build_diagram(
    graph: SubmodelGraph,
    layout_result: LayoutResult,
    units: dict[str, str] | None = None,
) -> DiagramSpec:
    """Style a laid-out graph into a DiagramSpec."""
    units = dict(units or {"temp": "K", "power": "W"})
    missing = set(graph.node_names()) - set(layout_result.positions)
    if missing:
        raise DatasetValidationError(
            f"layout missing positions for {sorted(missing)}"
        )
    temp_unit = units.get("temp", "K")
    temp_suffix = "K" if temp_unit == "K" else "°C"

    boxes: list[DiagramBox] = []
    for node in graph.nodes:
        temp_display = float(kelvin_to_display(node.avg_temp, temp_unit))
        load = node.net_load
        load_str = ("+" if load >= 0 else "-") + format_sig(abs(load))
        label_lines = [
            node.name,
            f"{format_sig(temp_display)} {temp_suffix}",
            f"{load_str} W",
        ]
        width = CHAR_WIDTH * max(len(line) for line in label_lines) + BOX_PADDING
        boxes.append(
            DiagramBox(
                name=node.name,
                center=layout_result.positions[node.name],
                width=width,
                height=BOX_HEIGHT,
                fill_class=node.load_class.value,
                label_lines=label_lines,
            )
        )

    qs = [e.q_watts for e in graph.edges]
    q_min, q_max = (min(qs), max(qs)) if qs else (0.0, 0.0)
    arrows: list[DiagramArrow] = []
    for e in graph.edges:
        style = edge_style(e.q_watts, q_min, q_max)
        is_linear = e.kind is ConductorKind.LINEAR
        arrows.append(
            DiagramArrow(
                from_name=e.from_name,
                to_name=e.to_name,
                kind="linear" if is_linear else "radiative",
                q_label=f"{format_sig(e.q_watts)} W",
                g_label=f"[{format_sig(e.g_total)} W/K]" if is_linear else None,
                color=style.color_scalar,
                weight=style.stroke_width,
                dashed=not is_linear,
                q_watts=e.q_watts,
            )
        )
    return DiagramSpec(
        boxes=boxes,
        arrows=arrows,
        units=units,
        timestep=graph.timestep,
        layout_kind=layout_result.layout_kind.value,
    )


def _lerp_color(scalar: float) -> str:
    channels = [
        round(lo + (hi - lo) * scalar)
        for lo, hi in zip(EDGE_COLOR_LOW, EDGE_COLOR_HIGH)
    ]
    return "#{:02X}{:02X}{:02X}".format(*channels)


def _clip_to_box(
    cx: float, cy: float, tx: float, ty: float, w: float, h: float
) -> tuple[float, float]:
    """Point where the segment (tx,ty)->(cx,cy) crosses box (cx,cy,w,h)."""
    dx, dy = tx - cx, ty - cy
    if dx == 0 and dy == 0:
        return cx, cy
    candidates = []
    if dx != 0:
        candidates.append((w / 2) / abs(dx))
    if dy != 0:
        candidates.append((h / 2) / abs(dy))
    t = min(candidates)
    t = min(t, 1.0)
    return cx + dx * t, cy + dy * t


def render_svg(
    diagram: DiagramSpec, width: int = 1000, height: int = 700
) -> str:
    """Standalone SVG 1.1 document for a diagram.

    Abstract coordinates are affinely mapped into the canvas with a 5%
    margin; arrowheads sit at the `to` end; radiative arrows use the
    dash pattern "6 4".
    """
    if width <= 0 or height <= 0:
        raise DatasetValidationError("canvas dimensions must be positive")
    margin_x = 0.05 * width
    margin_y = 0.05 * height

    xs = [b.center[0] for b in diagram.boxes]
    ys = [b.center[1] for b in diagram.boxes]
    if xs:
        x_min, x_max = min(xs), max(xs)
        y_min, y_max = min(ys), max(ys)
    else:
        x_min = x_max = y_min = y_max = 0.0
    span_x = x_max - x_min or 1.0
    span_y = y_max - y_min or 1.0
    scale_x = (width - 2 * margin_x) / span_x
    scale_y = (height - 2 * margin_y) / span_y

    def to_px(p: tuple[float, float]) -> tuple[float, float]:
        if x_max == x_min:
            px = width / 2
        else:
            px = margin_x + (p[0] - x_min) * scale_x
        if y_max == y_min:
            py = height / 2
        else:
            py = margin_y + (p[1] - y_min) * scale_y
        return px, py

    centers = {b.name: to_px(b.center) for b in diagram.boxes}
    dims = {b.name: (b.width, b.height) for b in diagram.boxes}

    parts: list[str] = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        "<defs>",
    ]
    for i, arrow in enumerate(diagram.arrows):
        color = _lerp_color(arrow.color)
        parts.append(
            f'<marker id="head{i}" markerWidth="10" markerHeight="8" '
            f'refX="9" refY="4" orient="auto" markerUnits="userSpaceOnUse">'
            f'<path d="M0,0 L10,4 L0,8 z" fill="{color}"/></marker>'
        )
    parts.append("</defs>")

    for i, arrow in enumerate(diagram.arrows):
        (x1, y1) = centers[arrow.from_name]
        (x2, y2) = centers[arrow.to_name]
        w1, h1 = dims[arrow.from_name]
        w2, h2 = dims[arrow.to_name]
        sx, sy = _clip_to_box(x1, y1, x2, y2, w1, h1)
        ex, ey = _clip_to_box(x2, y2, x1, y1, w2, h2)
        color = _lerp_color(arrow.color)
        dash = f' stroke-dasharray="{RADIATIVE_DASH}"' if arrow.dashed else ""
        parts.append(
            f'<line x1="{sx:.2f}" y1="{sy:.2f}" x2="{ex:.2f}" y2="{ey:.2f}" '
            f'stroke="{color}" stroke-width="{arrow.weight:.2f}"{dash} '
            f'marker-end="url(#head{i})"/>'
        )
        label = arrow.q_label if arrow.g_label is None else f"{arrow.q_label} {arrow.g_label}"
        mx, my = (sx + ex) / 2, (sy + ey) / 2
        parts.append(
            f'<text x="{mx:.2f}" y="{my - 4:.2f}" font-size="11" '
            f'text-anchor="middle" fill="{color}">{_escape(label)}</text>'
        )

    for box in diagram.boxes:
        cx, cy = centers[box.name]
        fill = FILL_COLORS[LoadClass(box.fill_class)]
        text_color = "#FFFFFF" if box.fill_class != LoadClass.NEUTRAL.value else "#000000"
        parts.append(
            f'<rect x="{cx - box.width / 2:.2f}" y="{cy - box.height / 2:.2f}" '
            f'width="{box.width:.2f}" height="{box.height:.2f}" rx="4" '
            f'fill="{fill}" stroke="#333333"/>'
        )
        line_height = box.height / (len(box.label_lines) + 1)
        for j, line in enumerate(box.label_lines):
            ty = cy - box.height / 2 + line_height * (j + 1) + 4
            parts.append(
                f'<text x="{cx:.2f}" y="{ty:.2f}" font-size="12" '
                f'text-anchor="middle" fill="{text_color}">{_escape(line)}</text>'
            )

    parts.append("</svg>")
    return "\n".join(parts)


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )


def build_series_payload(
    series: dict[str, tuple[np.ndarray, np.ndarray]] | PairFlowSeries,
    kind: str,
    units: dict[str, str] | None = None,
) -> dict:
    """JSON-serializable line-plot payload for transient views.

    Temperature input: name -> (timestamps, Kelvin values). Flow input: a
    PairFlowSeries. Output: {"kind", "x", "labels", "y", "units"}.
    """
    units = dict(units or {"temp": "K", "power": "W"})
    if kind == "temperature":
        if not series:
            raise DatasetValidationError("empty temperature series request")
        temp_unit = units.get("temp", "K")
        labels: list[str] = []
        ys: list[list[float]] = []
        x: list[float] = []
        for name, (timestamps, values) in series.items():
            labels.append(name)
            converted = np.asarray(values, dtype=np.float64)
            if temp_unit == "C":
                converted = converted - KELVIN_OFFSET
            ys.append([float(v) for v in converted])
            x = [float(t) for t in timestamps]
        return {
            "kind": "temperature",
            "x": x,
            "labels": labels,
            "y": ys,
            "units": temp_unit if temp_unit == "K" else "°C",
        }
    if kind == "flow":
        if not isinstance(series, PairFlowSeries):
            raise DatasetValidationError("flow payload requires a pair flow series")
        label = f"{series.from_name}→{series.to_name}"
        return {
            "kind": "flow",
            "label": label,
            "x": [float(t) for t in series.timestamps],
            "labels": [f"{label} linear", f"{label} radiative"],
            "y": [
                [float(v) for v in series.linear_watts],
                [float(v) for v in series.radiative_watts],
            ],
            "units": "W",
        }
    raise DatasetValidationError(f"unknown series kind {kind!r}")

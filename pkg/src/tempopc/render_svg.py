"""Headless deterministic SVG rendering of a layout plus a selection partition.

Output is plain text SVG with coordinates rounded to 3 decimals, so equal
inputs yield byte-identical documents on any platform (golden-file
friendly).  Inactive runs are drawn first in the gray-out color, active runs
after in full color, which makes the layering testable via document order.

Scalar axes get min/max end labels and tick marks; temporal axes draw their
cluster boxes with embedded multi-line charts and omit ticks and time marks.
"""

from dataclasses import dataclass
from typing import Collection, Sequence
from xml.sax.saxutils import escape

from .clustering import ClusterModel
from .data_model import ParameterScan
from .layout import Color, LayoutModel

POLYLINE_COLOR = "#2f2f2f"


@dataclass(frozen=True)
class RenderConfig:
    width: int = 1600
    height: int = 900
    margin_top: int = 60
    margin_bottom: int = 40
    margin_left: int = 40
    margin_right: int = 40
    polyline_width_active: float = 1.6
    polyline_width_inactive: float = 1.0
    trend_width_active: float = 1.0
    trend_width_inactive: float = 0.6
    grayout_color: str = "#d4d4d4"
    font_family: str = "sans-serif"
    font_size: float = 12.0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("canvas dimensions must be positive")
        if not (
            0 <= self.margin_left < self.width / 2
            and 0 <= self.margin_right < self.width / 2
            and 0 <= self.margin_top < self.height / 2
            and 0 <= self.margin_bottom < self.height / 2
        ):
            raise ValueError("margins must be non-negative and below half the canvas")


def _fmt(v: float) -> str:
    # -0.000 and 0.000 must print identically for byte determinism.
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


class _Frame:
    """Maps normalized [0,1]^2 (y up) to pixel coordinates (y down)."""

    def __init__(self, cfg: RenderConfig):
        self.x0 = cfg.margin_left
        self.y0 = cfg.margin_top
        self.w = cfg.width - cfg.margin_left - cfg.margin_right
        self.h = cfg.height - cfg.margin_top - cfg.margin_bottom

    def x(self, nx: float) -> float:
        return self.x0 + nx * self.w

    def y(self, ny: float) -> float:
        return self.y0 + (1.0 - ny) * self.h


def _path(points: Sequence[tuple[float, float]], stroke: str, width: float, css: str) -> str:
    d = "M " + " L ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in points)
    return (
        f'<path class="{css}" d="{d}" fill="none" stroke="{stroke}" '
        f'stroke-width="{_fmt(width)}" stroke-linejoin="round" stroke-linecap="round"/>'
    )


def _dark(color: Color) -> str:
    return Color(color.hue, color.saturation, 0.32).to_hex()


def render(
    scan: ParameterScan,
    model: ClusterModel,
    layout: LayoutModel,
    active_run_ids: Collection[str],
    cfg: RenderConfig = RenderConfig(),
) -> bytes:
    """Render the full plot; returns UTF-8 SVG bytes, byte-deterministic."""
    frame = _Frame(cfg)
    active = set(active_run_ids)
    unknown = active - set(scan.run_ids)
    if unknown:
        raise ValueError(f"active ids not in scan: {sorted(unknown)}")

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{cfg.width}" height="{cfg.height}" '
        f'viewBox="0 0 {cfg.width} {cfg.height}" font-family="{escape(cfg.font_family)}" '
        f'font-size="{_fmt(cfg.font_size)}">'
    )

    # Axes: vertical lines with name labels; min/max end labels on scalar axes.
    xs = {ax.id: (ax.position + 0.5) / len(layout.axes) for ax in layout.axes}
    label_y = frame.y0 - 14 if frame.y0 >= 26 else 12.0
    for ax in layout.axes:
        x = frame.x(xs[ax.id])
        parts.append(
            f'<line class="axis" x1="{_fmt(x)}" y1="{_fmt(frame.y(0.0))}" '
            f'x2="{_fmt(x)}" y2="{_fmt(frame.y(1.0))}" stroke="#888888" stroke-width="1"/>'
        )
        parts.append(
            f'<text class="axis-label" x="{_fmt(x)}" y="{_fmt(label_y)}" '
            f'text-anchor="middle">{escape(ax.source)}</text>'
        )
        if ax.kind == "scalar":
            lo, hi = layout.scalar_domains[ax.id]
            for value, ny, dy in ((lo, 0.0, 16.0), (hi, 1.0, -6.0)):
                y = frame.y(ny)
                parts.append(
                    f'<line class="tick" x1="{_fmt(x - 4)}" y1="{_fmt(y)}" '
                    f'x2="{_fmt(x + 4)}" y2="{_fmt(y)}" stroke="#888888" stroke-width="1"/>'
                )
                text_y = min(max(y + dy, 10.0), cfg.height - 4.0)
                parts.append(
                    f'<text class="axis-end" x="{_fmt(x)}" y="{_fmt(text_y)}" '
                    f'text-anchor="middle">{value:g}</text>'
                )

    # Cluster boxes (fills only; member charts are drawn with the run layers).
    for box in layout.boxes:
        x0, y1 = frame.x(box.x0), frame.y(box.y0)
        x1, y0 = frame.x(box.x1), frame.y(box.y1)
        parts.append(
            f'<rect class="cluster-box" x="{_fmt(x0)}" y="{_fmt(y0)}" '
            f'width="{_fmt(x1 - x0)}" height="{_fmt(y1 - y0)}" rx="3" '
            f'fill="{box.color.to_hex()}"/>'
        )

    # Run layers: every inactive path precedes every active path.
    grid = scan.observable_schema.time_grid
    box_by_key = {(b.axis_id, b.cluster_id): b for b in layout.boxes}

    def run_paths(run_id: str, is_active: bool) -> list[str]:
        run = scan.run_by_id(run_id)
        out = []
        for ax in layout.axes:
            if ax.kind != "temporal":
                continue
            cid = model.per_observable[ax.source].assignment[run_id]
            box = box_by_key[(ax.id, cid)]
            pts = [
                (frame.x(nx), frame.y(ny))
                for nx, ny in (
                    box.trend.apply(t, v) for t, v in zip(grid, run.series[ax.source])
                )
            ]
            stroke = _dark(box.color) if is_active else cfg.grayout_color
            width = cfg.trend_width_active if is_active else cfg.trend_width_inactive
            out.append(_path(pts, stroke, width, f"trend obs-{ax.source}"))
        pts = [(frame.x(xs[a]), frame.y(y)) for a, y in layout.polylines[run_id]]
        stroke = POLYLINE_COLOR if is_active else cfg.grayout_color
        width = cfg.polyline_width_active if is_active else cfg.polyline_width_inactive
        out.append(_path(pts, stroke, width, "polyline"))
        return out

    parts.append('<g class="inactive-runs">')
    for run in scan.runs:
        if run.run_id not in active:
            parts.extend(run_paths(run.run_id, False))
    parts.append("</g>")
    parts.append('<g class="active-runs">')
    for run in scan.runs:
        if run.run_id in active:
            parts.extend(run_paths(run.run_id, True))
    parts.append("</g>")

    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")

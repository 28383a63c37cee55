"""Resolution-independent parallel-coordinates geometry.

Scalar axes carry min-max normalized control points; temporal axes carry
parallel-sets-style cluster boxes whose heights are proportional to cluster
sizes (largest at the bottom by default, 2% gaps), each box holding an
affine trend transform that maps the shared time range and the observable's
global value range into the box.  All coordinates live in [0, 1] x [0, 1]
with y pointing up; mapping to pixels is the renderer's job.

Polylines anchor at the vertical center of their cluster's box, and every
trend figure of one observable shares the same value scale, so cluster
charts stay comparable across boxes.
"""

import colorsys
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .clustering import ClusterModel
from .data_model import ParameterScan, min_max

BOX_GAP = 0.02
MAX_TOTAL_GAP = 0.5
BASE_HUE_DEGREES = 210.0
SATURATION_MAX = 0.9
SATURATION_MIN = 0.3
BOX_LIGHTNESS = 0.62


@dataclass(frozen=True)
class AxisSpec:
    id: str
    kind: str  # "scalar" | "temporal"
    source: str
    position: int


@dataclass(frozen=True)
class Color:
    hue: float
    saturation: float
    lightness: float

    def to_hex(self) -> str:
        r, g, b = colorsys.hls_to_rgb(self.hue / 360.0, self.lightness, self.saturation)
        return "#{:02x}{:02x}{:02x}".format(round(r * 255), round(g * 255), round(b * 255))


@dataclass(frozen=True)
class TrendTransform:
    """Affine map (t, value) -> normalized canvas coordinates inside one box."""

    x_scale: float
    x_offset: float
    y_scale: float
    y_offset: float

    def apply(self, t: float, value: float) -> tuple[float, float]:
        return (self.x_scale * t + self.x_offset, self.y_scale * value + self.y_offset)


@dataclass(frozen=True)
class ClusterBox:
    axis_id: str
    cluster_id: int
    x0: float
    x1: float
    y0: float
    y1: float
    color: Color
    trend: TrendTransform

    @property
    def center_y(self) -> float:
        return 0.5 * (self.y0 + self.y1)


@dataclass(frozen=True)
class Palette:
    hue_by_observable: dict[str, float]
    color_by_cluster: dict[str, dict[int, Color]]


@dataclass
class LayoutModel:
    axes: tuple[AxisSpec, ...]
    scalar_domains: dict[str, tuple[float, float]]
    boxes: tuple[ClusterBox, ...]
    polylines: dict[str, tuple[tuple[str, float], ...]]
    palette: Palette
    axis_order: tuple[str, ...]
    cluster_orders: dict[str, tuple[int, ...]]
    warnings: tuple[str, ...] = ()
    box_gap: float = BOX_GAP

    def axis(self, axis_id: str) -> AxisSpec:
        for ax in self.axes:
            if ax.id == axis_id:
                return ax
        raise KeyError(f"unknown axis {axis_id!r}")

    def boxes_on(self, axis_id: str) -> tuple[ClusterBox, ...]:
        return tuple(b for b in self.boxes if b.axis_id == axis_id)


def assign_colors(model: ClusterModel, observable_order: Sequence[str]) -> Palette:
    """Hue per observable (evenly spaced), saturation decreasing with size rank."""
    observables = list(observable_order)
    if not observables:
        raise ValueError("at least one observable is required")
    hues = {
        obs: (BASE_HUE_DEGREES + i * 360.0 / len(observables)) % 360.0
        for i, obs in enumerate(observables)
    }
    colors: dict[str, dict[int, Color]] = {}
    for obs in observables:
        clustering = model.per_observable[obs]
        k = len(clustering.order)
        step = (SATURATION_MAX - SATURATION_MIN) / max(k - 1, 1)
        colors[obs] = {
            cid: Color(hues[obs], SATURATION_MAX - rank * step, BOX_LIGHTNESS)
            for rank, cid in enumerate(clustering.order)
        }
    return Palette(hue_by_observable=hues, color_by_cluster=colors)


def _axis_positions(n: int) -> list[float]:
    return [(i + 0.5) / n for i in range(n)]


def _box_width(n_axes: int) -> float:
    return min(0.5 / n_axes, 0.08)


def compute_layout(
    scan: ParameterScan,
    model: ClusterModel,
    axis_order: Optional[Sequence[str]] = None,
    cluster_order_overrides: Optional[Mapping[str, Sequence[int]]] = None,
    box_gap: float = BOX_GAP,
) -> LayoutModel:
    """Geometry for the given axis order (default: parameters, then observables)."""
    if not 0.0 <= box_gap < 1.0:
        raise ValueError(f"box_gap must be in [0, 1), got {box_gap}")
    pnames = scan.parameter_schema.names
    onames = scan.observable_schema.names
    if axis_order is None:
        axis_order = list(pnames) + list(onames)
    axis_order = [str(a) for a in axis_order]
    known = set(pnames) | set(onames)
    unknown = [a for a in axis_order if a not in known]
    if unknown:
        raise ValueError(f"axis order names unknown entries {unknown}")
    if len(set(axis_order)) != len(axis_order):
        raise ValueError("axis order contains duplicates")
    if not axis_order:
        raise ValueError("axis order is empty")

    overrides = {k: tuple(int(c) for c in v) for k, v in (cluster_order_overrides or {}).items()}
    warnings: list[str] = []

    for obs in onames:
        if obs in axis_order and obs not in model.per_observable:
            raise ValueError(f"cluster model lacks observable {obs!r}")
    scan_ids = set(scan.run_ids)
    for obs, clustering in model.per_observable.items():
        if set(clustering.assignment) != scan_ids:
            raise ValueError(f"cluster model for {obs!r} does not cover the scan's runs")

    xs = _axis_positions(len(axis_order))
    half_w = 0.5 * _box_width(len(axis_order))
    axes = tuple(
        AxisSpec(
            id=name,
            kind="scalar" if name in pnames else "temporal",
            source=name,
            position=i,
        )
        for i, name in enumerate(axis_order)
    )

    palette = assign_colors(model, list(onames))

    scalar_domains: dict[str, tuple[float, float]] = {}
    for ax in axes:
        if ax.kind != "scalar":
            continue
        idx = scan.parameter_schema.index_of(ax.source)
        values = [float(r.config[idx]) for r in scan.runs]
        if not values:
            raise ValueError("cannot lay out a scan with no runs")
        lo, hi = min(values), max(values)
        if lo == hi:
            warnings.append(f"axis {ax.id!r} is constant at {lo:g}; points pinned to 0.5")
        scalar_domains[ax.id] = (lo, hi)

    t0 = scan.observable_schema.time_grid[0]
    t1 = scan.observable_schema.time_grid[-1]

    boxes: list[ClusterBox] = []
    anchor: dict[tuple[str, int], float] = {}
    cluster_orders: dict[str, tuple[int, ...]] = {}
    for ax in axes:
        if ax.kind != "temporal":
            continue
        clustering = model.per_observable[ax.source]
        order = overrides.get(ax.source, clustering.order)
        if sorted(order) != sorted(clustering.order):
            raise ValueError(
                f"cluster order override for {ax.source!r} is not a permutation "
                f"of {sorted(clustering.order)}"
            )
        cluster_orders[ax.source] = tuple(order)
        k = len(order)
        gap = box_gap if k <= 1 or box_gap * (k - 1) <= MAX_TOTAL_GAP else MAX_TOTAL_GAP / (k - 1)
        if gap != box_gap:
            warnings.append(f"axis {ax.id!r}: {k} boxes; gap shrunk to keep heights positive")
        total = sum(clustering.sizes.values())
        usable = 1.0 - gap * (k - 1)
        vmin, vmax = min_max(scan, ax.source)
        x_axis = xs[ax.position]

        y = 0.0
        for cid in order:
            height = usable * clustering.sizes[cid] / total
            y0, y1 = y, y + height
            y = y1 + gap
            x0, x1 = x_axis - half_w, x_axis + half_w
            if vmax > vmin:
                y_scale = (y1 - y0) / (vmax - vmin)
                y_offset = y0 - vmin * y_scale
            else:
                y_scale = 0.0
                y_offset = 0.5 * (y0 + y1)
            trend = TrendTransform(
                x_scale=(x1 - x0) / (t1 - t0),
                x_offset=x0 - t0 * (x1 - x0) / (t1 - t0),
                y_scale=y_scale,
                y_offset=y_offset,
            )
            boxes.append(
                ClusterBox(
                    axis_id=ax.id,
                    cluster_id=cid,
                    x0=x0,
                    x1=x1,
                    y0=y0,
                    y1=y1,
                    color=palette.color_by_cluster[ax.source][cid],
                    trend=trend,
                )
            )
            anchor[(ax.id, cid)] = 0.5 * (y0 + y1)

    polylines: dict[str, tuple[tuple[str, float], ...]] = {}
    for run in scan.runs:
        points: list[tuple[str, float]] = []
        for ax in axes:
            if ax.kind == "scalar":
                lo, hi = scalar_domains[ax.id]
                value = run.value_of(scan.parameter_schema, ax.source)
                y = 0.5 if hi == lo else (value - lo) / (hi - lo)
            else:
                cid = model.per_observable[ax.source].assignment[run.run_id]
                y = anchor[(ax.id, cid)]
            points.append((ax.id, y))
        polylines[run.run_id] = tuple(points)

    return LayoutModel(
        axes=axes,
        scalar_domains=scalar_domains,
        boxes=tuple(boxes),
        polylines=polylines,
        palette=palette,
        axis_order=tuple(axis_order),
        cluster_orders=cluster_orders,
        warnings=tuple(warnings),
        box_gap=box_gap,
    )


def reorder_axes(
    scan: ParameterScan,
    model: ClusterModel,
    layout: LayoutModel,
    new_order: Sequence[str],
) -> LayoutModel:
    """Same scan/model, new axis order; membership and colors are untouched."""
    if sorted(new_order) != sorted(layout.axis_order):
        raise ValueError(
            f"new order must be a permutation of {sorted(layout.axis_order)}"
        )
    return compute_layout(scan, model, new_order, layout.cluster_orders, layout.box_gap)


def reorder_clusters(
    scan: ParameterScan,
    model: ClusterModel,
    layout: LayoutModel,
    observable: str,
    new_order: Sequence[int],
) -> LayoutModel:
    """Permute one temporal axis's boxes; heights stay size-proportional."""
    if observable not in layout.cluster_orders:
        raise KeyError(f"no temporal axis for observable {observable!r}")
    overrides = dict(layout.cluster_orders)
    overrides[observable] = tuple(int(c) for c in new_order)
    return compute_layout(scan, model, layout.axis_order, overrides, layout.box_gap)


# --- serialization --------------------------------------------------------


def _color_obj(color: Color) -> dict:
    return {
        "hue": color.hue,
        "saturation": color.saturation,
        "lightness": color.lightness,
        "hex": color.to_hex(),
    }


def layout_to_obj(layout: LayoutModel) -> dict:
    return {
        "axes": [
            {"id": ax.id, "kind": ax.kind, "source": ax.source, "position": ax.position}
            for ax in layout.axes
        ],
        "scalar_domains": {k: [lo, hi] for k, (lo, hi) in layout.scalar_domains.items()},
        "boxes": [
            {
                "axis_id": b.axis_id,
                "cluster_id": b.cluster_id,
                "x0": b.x0,
                "x1": b.x1,
                "y0": b.y0,
                "y1": b.y1,
                "color": _color_obj(b.color),
                "trend": {
                    "x_scale": b.trend.x_scale,
                    "x_offset": b.trend.x_offset,
                    "y_scale": b.trend.y_scale,
                    "y_offset": b.trend.y_offset,
                },
            }
            for b in layout.boxes
        ],
        "polylines": {
            run_id: [{"axis_id": a, "y": y} for a, y in points]
            for run_id, points in layout.polylines.items()
        },
        "palette": {
            "hue_by_observable": dict(layout.palette.hue_by_observable),
            "color_by_cluster": {
                obs: {str(cid): _color_obj(c) for cid, c in by_cluster.items()}
                for obs, by_cluster in layout.palette.color_by_cluster.items()
            },
        },
        "axis_order": list(layout.axis_order),
        "cluster_orders": {k: list(v) for k, v in layout.cluster_orders.items()},
        "warnings": list(layout.warnings),
    }

import numpy as np
import pytest

from tempopc import (
    ClusterConfig,
    assign_colors,
    cluster_scan,
    compute_layout,
    min_max,
    reorder_axes,
    reorder_clusters,
)
from tempopc.clustering import ClusterModel, ObservableClustering
from tempopc.layout import BASE_HUE_DEGREES, layout_to_obj

from conftest import make_scan


def synthetic_model(scan_id, sizes_by_observable, run_ids):
    """Cluster model with prescribed sizes; centroids are placeholders."""
    per_observable = {}
    for obs, sizes in sizes_by_observable.items():
        assignment = {}
        i = 0
        for cid, size in enumerate(sizes):
            for _ in range(size):
                assignment[run_ids[i]] = cid
                i += 1
        order = tuple(sorted(range(len(sizes)), key=lambda c: (-sizes[c], c)))
        per_observable[obs] = ObservableClustering(
            observable=obs,
            assignment=assignment,
            centroids={cid: np.zeros(3) for cid in range(len(sizes))},
            sizes=dict(enumerate(sizes)),
            order=order,
            inertia=0.0,
        )
    return ClusterModel(scan_id=scan_id, per_observable=per_observable)


def scan_with_values(values, observable_values=None):
    n = len(values)
    runs = []
    for i, v in enumerate(values):
        series = observable_values[i] if observable_values else [0.0, 1.0, 2.0]
        runs.append((f"run-{i:03d}", [float(v)], {"y1": series}))
    return make_scan(runs=runs)


def test_scalar_axis_min_max_normalization():
    scan = scan_with_values([0.0, 5.0, 10.0])
    model = synthetic_model("test", {"y1": [3]}, [f"run-{i:03d}" for i in range(3)])
    layout = compute_layout(scan, model)
    ys = {run_id: dict(points)["p1"] for run_id, points in layout.polylines.items()}
    assert ys == {"run-000": 0.0, "run-001": 0.5, "run-002": 1.0}


def test_constant_scalar_axis_pins_to_center_with_warning():
    scan = scan_with_values([4.0, 4.0, 4.0])
    model = synthetic_model("test", {"y1": [3]}, [f"run-{i:03d}" for i in range(3)])
    layout = compute_layout(scan, model)
    assert all(dict(points)["p1"] == 0.5 for points in layout.polylines.values())
    assert any("constant" in w for w in layout.warnings)


def test_box_heights_match_spec_arithmetic():
    # Sizes 70/50/21 of 141 with zero gap: heights exactly size/141, largest
    # at the bottom.
    run_ids = [f"run-{i:03d}" for i in range(141)]
    scan = make_scan(
        runs=[(rid, [float(i)], {"y1": [0.0, float(i % 7), 2.0]}) for i, rid in enumerate(run_ids)]
    )
    model = synthetic_model("test", {"y1": [70, 50, 21]}, run_ids)
    layout = compute_layout(scan, model, box_gap=0.0)
    boxes = sorted(layout.boxes_on("y1"), key=lambda b: b.y0)
    heights = [b.y1 - b.y0 for b in boxes]
    assert heights == pytest.approx([70 / 141, 50 / 141, 21 / 141], abs=1e-12)
    assert boxes[0].y0 == 0.0
    assert [b.cluster_id for b in boxes] == [0, 1, 2]


def test_heights_plus_gaps_sum_to_one(small_scan, small_model):
    layout = compute_layout(small_scan, small_model)
    for obs in small_scan.observable_schema.names:
        boxes = sorted(layout.boxes_on(obs), key=lambda b: b.y0)
        heights = sum(b.y1 - b.y0 for b in boxes)
        gaps = layout.box_gap * (len(boxes) - 1)
        assert heights + gaps == pytest.approx(1.0, abs=1e-12)
        sizes = [small_model.per_observable[obs].sizes[b.cluster_id] for b in boxes]
        total = sum(sizes)
        for box, size in zip(boxes, sizes):
            assert box.y1 - box.y0 == pytest.approx(
                size / total * (1 - gaps), abs=1e-12
            )
        # Default order: non-increasing size bottom -> top.
        assert sizes == sorted(sizes, reverse=True)


def test_polyline_anchors_at_box_centers(small_scan, small_model):
    layout = compute_layout(small_scan, small_model)
    box_center = {(b.axis_id, b.cluster_id): b.center_y for b in layout.boxes}
    for run in small_scan.runs:
        points = dict(layout.polylines[run.run_id])
        for obs in small_scan.observable_schema.names:
            cid = small_model.per_observable[obs].assignment[run.run_id]
            assert points[obs] == box_center[(obs, cid)]


def test_every_run_has_one_point_per_axis(small_scan, small_model):
    layout = compute_layout(small_scan, small_model)
    for points in layout.polylines.values():
        assert [a for a, _ in points] == list(layout.axis_order)


def test_trend_transform_shares_global_scale(small_scan, small_model):
    layout = compute_layout(small_scan, small_model)
    grid = small_scan.observable_schema.time_grid
    for obs in small_scan.observable_schema.names:
        lo, hi = min_max(small_scan, obs)
        for box in layout.boxes_on(obs):
            x_lo, y_lo = box.trend.apply(grid[0], lo)
            x_hi, y_hi = box.trend.apply(grid[-1], hi)
            assert (x_lo, x_hi) == pytest.approx((box.x0, box.x1), abs=1e-12)
            assert (y_lo, y_hi) == pytest.approx((box.y0, box.y1), abs=1e-12)


def test_hue_assignment_even_spacing(small_scan, small_model):
    layout = compute_layout(small_scan, small_model)
    hues = [layout.palette.hue_by_observable[o] for o in small_scan.observable_schema.names]
    expected = [(BASE_HUE_DEGREES + i * 90.0) % 360.0 for i in range(4)]
    assert hues == pytest.approx(expected)
    assert len(set(hues)) == 4


def test_single_cluster_gets_rank_zero_saturation():
    run_ids = ["a", "b"]
    scan = make_scan(runs=[("a", [0.0], {"y1": [0, 1, 2]}), ("b", [1.0], {"y1": [0, 1, 2]})])
    model = synthetic_model("test", {"y1": [2]}, run_ids)
    palette = assign_colors(model, ["y1"])
    colors = palette.color_by_cluster["y1"]
    assert len(colors) == 1
    assert colors[0].saturation == 0.9


def test_saturation_decreases_with_size_rank():
    run_ids = [f"run-{i:03d}" for i in range(141)]
    scan = make_scan(
        runs=[(rid, [0.0], {"y1": [0.0, 1.0, 2.0]}) for rid in run_ids]
    )
    model = synthetic_model("test", {"y1": [70, 50, 21]}, run_ids)
    palette = assign_colors(model, ["y1"])
    colors = palette.color_by_cluster["y1"]
    ordered = [colors[cid].saturation for cid in model.per_observable["y1"].order]
    assert ordered[0] > ordered[1] > ordered[2]


def test_reorder_axes_identity(small_scan, small_model):
    layout = compute_layout(small_scan, small_model)
    again = reorder_axes(small_scan, small_model, layout, layout.axis_order)
    assert layout_to_obj(again) == layout_to_obj(layout)


def test_reorder_axes_swap_changes_only_positions(small_scan, small_model):
    layout = compute_layout(small_scan, small_model)
    order = list(layout.axis_order)
    order[0], order[1] = order[1], order[0]
    swapped = reorder_axes(small_scan, small_model, layout, order)
    assert [a.source for a in swapped.axes] == order
    # Control points keep their values per axis, only the order changes.
    for run_id, points in layout.polylines.items():
        assert dict(points) == dict(swapped.polylines[run_id])


def test_reorder_axes_rejects_non_permutation(small_scan, small_model):
    layout = compute_layout(small_scan, small_model)
    with pytest.raises(ValueError, match="permutation"):
        reorder_axes(small_scan, small_model, layout, ["nWnt"])


def test_reorder_clusters_preserves_heights(small_scan, small_model):
    layout = compute_layout(small_scan, small_model)
    obs = "bCat_nuc"
    order = list(layout.cluster_orders[obs])
    flipped = list(reversed(order))
    got = reorder_clusters(small_scan, small_model, layout, obs, flipped)
    before = {b.cluster_id: b.y1 - b.y0 for b in layout.boxes_on(obs)}
    after = {b.cluster_id: b.y1 - b.y0 for b in got.boxes_on(obs)}
    assert before == pytest.approx(after)
    bottom = min(got.boxes_on(obs), key=lambda b: b.y0)
    assert bottom.cluster_id == flipped[0]
    # Colors unchanged by reordering.
    assert {b.cluster_id: b.color for b in got.boxes_on(obs)} == {
        b.cluster_id: b.color for b in layout.boxes_on(obs)
    }


def test_boxes_disjoint_and_ordered(small_scan, small_model):
    layout = compute_layout(small_scan, small_model)
    for obs in small_scan.observable_schema.names:
        boxes = sorted(layout.boxes_on(obs), key=lambda b: b.y0)
        for a, b in zip(boxes, boxes[1:]):
            assert a.y1 < b.y0 + 1e-12
        assert boxes[0].y0 >= 0.0 and boxes[-1].y1 <= 1.0 + 1e-12


def test_mismatched_model_rejected(small_scan, tiny_scan, small_model):
    with pytest.raises(ValueError, match="cluster model"):
        compute_layout(tiny_scan, small_model, ["rate", "level"])


def test_hidden_axes_allowed(small_scan, small_model):
    layout = compute_layout(small_scan, small_model, ["nWnt", "bCat_nuc"])
    assert len(layout.axes) == 2
    for points in layout.polylines.values():
        assert len(points) == 2


def test_layout_invariant_under_run_reordering(small_scan, small_model):
    from tempopc import ParameterScan

    reordered = ParameterScan(
        small_scan.scan_id,
        small_scan.parameter_schema,
        small_scan.observable_schema,
        tuple(reversed(small_scan.runs)),
    )
    a = layout_to_obj(compute_layout(small_scan, small_model))
    b = layout_to_obj(compute_layout(reordered, small_model))
    assert a["boxes"] == b["boxes"]
    assert a["scalar_domains"] == b["scalar_domains"]
    assert a["polylines"] == b["polylines"]

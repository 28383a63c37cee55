"""Compute parallel-coordinates geometry and render it headlessly to SVG.

Scalar parameter axes carry min-max scaled points; each observable becomes a
temporal axis whose cluster boxes are stacked largest-at-bottom with heights
proportional to cluster size, each box holding a multi-line chart of its
member series.  Brushing grays out the non-matching runs in every view.
"""

from pathlib import Path

from tempopc import (
    ClusterConfig,
    RenderConfig,
    SelectionState,
    cluster_scan,
    compute_layout,
    evaluate,
    render,
    reorder_axes,
)
from tempopc.simgen import demo_grid, generate_scan

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

scan = generate_scan(demo_grid(), seed=0)
model = cluster_scan(scan, ClusterConfig(k=3, restarts=5, seed=0))
layout = compute_layout(scan, model)

for axis in layout.axes:
    kind = f"{axis.kind:8}"
    extra = ""
    if axis.kind == "temporal":
        boxes = layout.boxes_on(axis.id)
        extra = f"{len(boxes)} boxes, heights " + ", ".join(
            f"{b.y1 - b.y0:.3f}" for b in sorted(boxes, key=lambda b: b.y0)
        )
    else:
        lo, hi = layout.scalar_domains[axis.id]
        extra = f"domain [{lo:g}, {hi:g}]"
    print(f"axis {axis.position}: {kind} {axis.source:>14}  {extra}")

everything, _ = evaluate(SelectionState(), scan, model)
(OUT / "overview.svg").write_bytes(render(scan, model, layout, everything, RenderConfig()))

# Brush the raft fraction to its top value: the calibration view of the
# high-activation regime.
state = SelectionState(brushes={"nLRP6_lr": (1.0, 1.0)})
active, inactive = evaluate(state, scan, model)
print(f"\nbrush nLRP6_lr=[1,1]: {len(active)} active / {len(inactive)} grayed out")
(OUT / "brushed.svg").write_bytes(render(scan, model, layout, active, RenderConfig()))

# Drag the pathway-activation axis next to the parameters that drive it.
moved = reorder_axes(
    scan, model, layout,
    ["nWnt", "nLRP6_lr", "kRaftInternal", "bCat_nuc", "kLrpEndo",
     "lrp6Dim", "lrp6Int", "lrp6Phos"],
)
(OUT / "reordered.svg").write_bytes(render(scan, model, moved, active, RenderConfig()))

for name in ("overview.svg", "brushed.svg", "reordered.svg"):
    print(f"wrote {OUT / name}")

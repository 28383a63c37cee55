"""The four-task analysis loop, scripted headlessly on the surrogate scan.

Verification: does internalization actually respond to its rate parameter?
Outlier analysis: which configuration bucks that trend, and why?
Calibration: which configurations produce the desired activation behavior?
Sensitivity: how does activation change as the raft fraction sweeps up?
"""

import numpy as np

from tempopc import (
    ClusterConfig,
    SelectionState,
    cluster_scan,
    evaluate,
    move_brush,
    parameter_footprint,
    pick_cluster,
)
from tempopc.data_model import parameter_min_max
from tempopc.simgen import demo_grid, generate_scan

scan = generate_scan(demo_grid(), seed=0)
model = cluster_scan(scan, ClusterConfig(k=3, restarts=5, seed=0))
lr_index = scan.parameter_schema.index_of("nLRP6_lr")
endo_index = scan.parameter_schema.index_of("kLrpEndo")

print("== Verification: higher kLrpEndo -> more internalized receptors ==")
nonraft = [r for r in scan.runs if r.config[lr_index] == 0.0]
for k_endo in sorted({r.config[endo_index] for r in nonraft}):
    finals = [r.series["lrp6Int"][-1] for r in nonraft if r.config[endo_index] == k_endo]
    print(f"  kLrpEndo={k_endo:<6g} mean lrp6Int(360) = {np.mean(finals):6.1f}  (n={len(finals)})")

print("\n== Outlier: high kLrpEndo but low internalization ==")
state = SelectionState(brushes={"kLrpEndo": (0.1, 0.1)})
active, _ = evaluate(state, scan, model)
finals = {r: scan.run_by_id(r).series["lrp6Int"][-1] for r in active}
low = [r for r, v in finals.items() if v < 50]
print(f"  {len(active)} runs at the top kLrpEndo; {len(low)} of them internalize < 50 receptors")
footprint = parameter_footprint(low, scan)
print(f"  their nLRP6_lr footprint: {footprint['nLRP6_lr']}")
print("  -> the outliers keep all receptors in rafts, out of kLrpEndo's reach")

print("\n== Calibration: few receptors in rafts -> consistently low activation ==")
lo, hi = parameter_min_max(scan, "nLRP6_lr")
state = SelectionState(brushes={"nLRP6_lr": (lo, lo)})
active, _ = evaluate(state, scan, model)
clustering = model.per_observable["bCat_nuc"]
end_per_cluster = {cid: clustering.centroids[cid][-1] for cid in clustering.centroids}
low_cluster = min(end_per_cluster, key=lambda c: end_per_cluster[c])
in_low = sum(1 for r in active if clustering.assignment[r] == low_cluster)
stimuli = sorted({float(scan.run_by_id(r).config[0]) for r in active})
print(f"  {in_low}/{len(active)} low-raft runs sit in the lowest-activation cluster")
print(f"  independent of stimulus intensity nWnt in {[int(s) for s in stimuli]}")

print("\n== Sensitivity: sweep the raft-fraction brush from low to high ==")
state = SelectionState()
for value in sorted({r.config[lr_index] for r in scan.runs}):
    state = move_brush(state, "nLRP6_lr", (value, value))
    active, _ = evaluate(state, scan, model)
    shares = {
        cid: sum(1 for r in active if clustering.assignment[r] == cid) for cid in clustering.order
    }
    print(f"  nLRP6_lr={value:g}: bCat_nuc cluster membership {shares}")

print("\n== Region of interest: the transient-activation cluster ==")
ratios = {
    cid: (clustering.centroids[cid][-1] / clustering.centroids[cid].max()
          if clustering.centroids[cid].max() > 0 else 1.0)
    for cid in clustering.centroids
}
transient = min(ratios, key=lambda c: ratios[c])
state = pick_cluster(SelectionState(), "bCat_nuc", transient, "exclusive")
active, _ = evaluate(state, scan, model)
footprint = parameter_footprint(active, scan)
print(f"  cluster {transient} ({len(active)} runs) parameter footprint:")
for name, info in footprint.items():
    print(f"    {name:>14}: values {info['values']}")
kraft_index = scan.parameter_schema.index_of("kRaftInternal")
counts: dict[float, int] = {}
for run_id in active:
    value = float(scan.run_by_id(run_id).config[kraft_index])
    counts[value] = counts.get(value, 0) + 1
print(f"  kRaftInternal counts inside the cluster: {dict(sorted(counts.items()))}")
print("  -> transient activation concentrates at fast raft internalization")

"""Cluster each observable's time series into behavior groups.

k-means under dynamic time warping groups runs whose trajectories share a
shape; the cluster count is a user choice made per observable (the engine
reports inertia per candidate k but never picks one).  For bCat_nuc, k=3
cleanly separates no-activation, stable-high, and transient-peak behaviors.
"""

import numpy as np

from tempopc import ClusterConfig, cluster_scan, inertia_profile
from tempopc.simgen import demo_grid, generate_scan

scan = generate_scan(demo_grid(), seed=0)

print("inertia per k for bCat_nuc (lower = tighter clusters):")
profile = inertia_profile(scan, "bCat_nuc", [1, 2, 3, 4, 5], ClusterConfig(restarts=3, seed=0))
for k, inertia in profile.items():
    print(f"  k={k}: {inertia:10.1f}")

cfg = ClusterConfig(k=3, restarts=5, seed=0)
model = cluster_scan(scan, cfg)

for obs, clustering in model.per_observable.items():
    print(f"\n{obs}: {len(clustering.order)} clusters, inertia {clustering.inertia:.1f}")
    for rank, cid in enumerate(clustering.order):
        centroid = clustering.centroids[cid]
        peak = centroid.max()
        shape = "flat"
        if peak > 0:
            ratio = centroid[-1] / peak
            if np.all(np.diff(centroid) >= 0):
                shape = "accumulating"
            elif ratio >= 0.8:
                shape = "stable-high"
            elif ratio <= 0.3:
                shape = "transient"
            else:
                shape = "rising/mixed"
        print(
            f"  #{rank} cluster {cid}: {clustering.sizes[cid]:3d} runs, "
            f"centroid {np.array(centroid, dtype=int)} ({shape})"
        )

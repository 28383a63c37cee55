"""Behavior clustering of per-observable time series: k-means under DTW.

Each observable is clustered independently.  The algorithm is Lloyd-style
alternation of (1) assigning every series to its nearest centroid by DTW and
(2) recomputing centroids by DTW barycenter averaging, repeated over several
independently seeded restarts; the restart with the lowest inertia wins.

Everything is deterministic given (scan, config): runs are processed in
run_id order (so permuting the scan's run list changes nothing), restarts
are seeded from (seed, restart index), and all ties break toward the lowest
cluster id or lowest run index.

The barycenter update aligns every member to the current centroid and takes
the per-index median of aligned values, which under the absolute-difference
local cost never increases the sum of member distances; the incumbent
centroid is kept whenever the refreshed barycenter would be worse, so the
reported inertia trace is non-increasing within every restart.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from .data_model import ParameterScan
from .dtw import DtwConfig, dtw_alignment, dtw_distance, dtw_distance_matrix

CENTROID_METHODS = ("dba", "medoid")


@dataclass(frozen=True)
class ClusterConfig:
    k: int = 3
    k_by_observable: Mapping[str, int] = field(default_factory=dict)
    max_iter: int = 50
    restarts: int = 5
    seed: int = 0
    dtw: DtwConfig = field(default_factory=DtwConfig)
    dba_iterations: int = 10
    centroid_method: str = "dba"
    # Compare series on the raw scale by default: absolute levels are signal
    # in this domain.  normalize=True min-max scales each observable by its
    # global range before computing DTW distances.
    normalize: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.centroid_method not in CENTROID_METHODS:
            raise ValueError(f"centroid_method must be one of {CENTROID_METHODS}")
        object.__setattr__(self, "k_by_observable", dict(self.k_by_observable))

    def k_for(self, observable: str) -> int:
        return int(self.k_by_observable.get(observable, self.k))


@dataclass
class ObservableClustering:
    """Partition of one observable's runs into behavior clusters."""

    observable: str
    assignment: dict[str, int]
    centroids: dict[int, np.ndarray]
    sizes: dict[int, int]
    order: tuple[int, ...]
    inertia: float
    notes: tuple[str, ...] = ()
    inertia_traces: tuple[tuple[float, ...], ...] = ()

    def members(self, cluster_id: int) -> tuple[str, ...]:
        return tuple(sorted(r for r, c in self.assignment.items() if c == cluster_id))

    def cluster_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self.centroids))


@dataclass
class ClusterModel:
    """Independent per-observable partitions for a whole scan."""

    scan_id: str
    per_observable: dict[str, ObservableClustering]

    def observables(self) -> tuple[str, ...]:
        return tuple(self.per_observable)


# --- core k-means ---------------------------------------------------------


@dataclass(frozen=True)
class _Scale:
    """Optional min-max scaling of one observable; identity when disabled."""

    lo: float = 0.0
    span: float = 1.0
    enabled: bool = False

    def forward(self, series: np.ndarray) -> np.ndarray:
        if not self.enabled:
            return series
        return (series - self.lo) / self.span

    def inverse(self, series: np.ndarray) -> np.ndarray:
        if not self.enabled:
            return series
        return series * self.span + self.lo


def _canonical_series(
    scan: ParameterScan, observable: str, cfg: ClusterConfig
) -> tuple[list[str], list[np.ndarray], _Scale]:
    if observable not in scan.observable_schema.names:
        raise KeyError(f"unknown observable {observable!r}")
    ordered = sorted(scan.runs, key=lambda r: r.run_id)
    run_ids = [r.run_id for r in ordered]
    series = [r.series[observable] for r in ordered]
    scale = _Scale()
    if cfg.normalize and series:
        lo = min(float(s.min()) for s in series)
        hi = max(float(s.max()) for s in series)
        scale = _Scale(lo=lo, span=(hi - lo) or 1.0, enabled=True)
        series = [scale.forward(s) for s in series]
    return run_ids, series, scale


def _medoid_index(indices: Sequence[int], dmat: np.ndarray) -> int:
    """Member minimizing total DTW distance to the others; lowest index on ties."""
    best = indices[0]
    best_sum = math.inf
    for i in indices:
        total = float(sum(dmat[i, j] for j in indices))
        if total < best_sum - 1e-15:
            best, best_sum = i, total
    return best


def _dba_refine(
    members: list[np.ndarray], start: np.ndarray, cfg: ClusterConfig
) -> np.ndarray:
    """DTW barycenter: iteratively align members and take per-index medians."""
    centroid = np.array(start, dtype=np.float64)
    for _ in range(cfg.dba_iterations):
        aligned: list[list[float]] = [[] for _ in range(centroid.size)]
        for series in members:
            _, path = dtw_alignment(series, centroid, cfg.dtw)
            for i, j in path:
                aligned[j].append(float(series[i]))
        new_centroid = np.array([float(np.median(v)) for v in aligned])
        if np.array_equal(new_centroid, centroid):
            break
        centroid = new_centroid
    return centroid


def _centroid_for(
    members: list[np.ndarray],
    member_rows: Sequence[int],
    dmat: np.ndarray,
    cfg: ClusterConfig,
    incumbent: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Cluster representative: barycenter refined from the member-set medoid.

    When an incumbent centroid exists it is kept unless the refreshed
    barycenter is at least as good, which keeps Lloyd iterations monotone.
    """
    medoid = members[member_rows.index(_medoid_index(list(member_rows), dmat))]
    if cfg.centroid_method == "medoid":
        candidate = np.array(medoid, dtype=np.float64)
    else:
        candidate = _dba_refine(members, medoid, cfg)
    if incumbent is not None:
        cand_cost = sum(dtw_distance(s, candidate, cfg.dtw) for s in members)
        inc_cost = sum(dtw_distance(s, incumbent, cfg.dtw) for s in members)
        if inc_cost < cand_cost:
            return incumbent
    return candidate


def _kmeans_once(
    series: list[np.ndarray],
    k: int,
    dmat: np.ndarray,
    cfg: ClusterConfig,
    restart: int,
) -> tuple[np.ndarray, list[np.ndarray], float, list[float]]:
    """One seeded restart; returns (assignment rows, centroids, inertia, trace)."""
    n = len(series)
    rng = np.random.default_rng([cfg.seed, restart])

    # k-means++ style seeding on the precomputed DTW matrix.
    chosen = [int(rng.integers(n))]
    while len(chosen) < k:
        weights = np.min(dmat[:, chosen], axis=1) ** 2
        total = float(weights.sum())
        if total <= 0.0:
            remaining = [i for i in range(n) if min(dmat[i, c] for c in chosen) > 0]
            if not remaining:  # fewer distinct series than k; caller prevents this
                break
            chosen.append(remaining[0])
        else:
            chosen.append(int(rng.choice(n, p=weights / total)))
    centroids = [np.array(series[c], dtype=np.float64) for c in chosen]
    k = len(centroids)

    assign = np.full(n, -1, dtype=np.int64)
    trace: list[float] = []
    for _ in range(cfg.max_iter):
        # Assignment: nearest centroid by DTW, lowest cluster id on ties.
        new_assign = np.empty(n, dtype=np.int64)
        dists = np.empty(n)
        for i in range(n):
            best_c, best_d = 0, math.inf
            for c in range(k):
                d = dtw_distance(series[i], centroids[c], cfg.dtw)
                if d < best_d:
                    best_c, best_d = c, d
            new_assign[i] = best_c
            dists[i] = best_d

        # Empty-cluster repair: reseed with the member farthest from its centroid.
        for c in range(k):
            if not np.any(new_assign == c):
                farthest = int(np.argmax(dists))
                centroids[c] = np.array(series[farthest], dtype=np.float64)
                new_assign[farthest] = c
                dists[farthest] = 0.0

        if np.array_equal(new_assign, assign):
            break
        assign = new_assign

        # Update: refreshed barycenters, never worse than the incumbents.
        inertia = 0.0
        for c in range(k):
            rows = [i for i in range(n) if assign[i] == c]
            members = [series[i] for i in rows]
            centroids[c] = _centroid_for(members, rows, dmat, cfg, incumbent=centroids[c])
            inertia += sum(dtw_distance(s, centroids[c], cfg.dtw) for s in members)
        trace.append(inertia)

    return assign, centroids, trace[-1], trace


def cluster_observable(
    scan: ParameterScan, observable: str, cfg: ClusterConfig
) -> ObservableClustering:
    """Cluster one observable's series into cfg.k_for(observable) behaviors.

    Centroids are always reported on the raw data scale, even when distances
    are computed on normalized series; inertia is the optimized objective
    (normalized-scale when cfg.normalize is set).
    """
    run_ids, series, scale = _canonical_series(scan, observable, cfg)
    n = len(series)
    if n == 0:
        raise ValueError("cannot cluster an empty scan")
    k = cfg.k_for(observable)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of runs ({n})")

    notes: list[str] = []
    distinct = len({tuple(s.tolist()) for s in series})
    if distinct < k:
        notes.append(
            f"only {distinct} distinct series for k={k}; fell back to k={distinct}"
        )
        k = distinct

    dmat = dtw_distance_matrix(series, cfg.dtw)

    best = None
    traces: list[tuple[float, ...]] = []
    for restart in range(cfg.restarts):
        assign, centroids, inertia, trace = _kmeans_once(series, k, dmat, cfg, restart)
        traces.append(tuple(trace))
        if best is None or inertia < best[2] - 1e-12:
            best = (assign, centroids, inertia)
    assign, centroids, inertia = best

    assignment = {run_ids[i]: int(assign[i]) for i in range(n)}
    present = sorted(set(assignment.values()))
    relabel = {old: new for new, old in enumerate(present)}
    assignment = {r: relabel[c] for r, c in assignment.items()}
    centroid_map = {relabel[c]: scale.inverse(centroids[c]) for c in present}
    sizes = {c: sum(1 for v in assignment.values() if v == c) for c in centroid_map}
    order = tuple(sorted(sizes, key=lambda c: (-sizes[c], c)))
    return ObservableClustering(
        observable=observable,
        assignment=assignment,
        centroids=centroid_map,
        sizes=sizes,
        order=order,
        inertia=float(inertia),
        notes=tuple(notes),
        inertia_traces=tuple(traces),
    )


def cluster_scan(scan: ParameterScan, cfg: ClusterConfig) -> ClusterModel:
    """Independent clustering of every observable in the scan."""
    per_observable = {
        obs: cluster_observable(scan, obs, cfg) for obs in scan.observable_schema.names
    }
    return ClusterModel(scan_id=scan.scan_id, per_observable=per_observable)


def inertia_profile(
    scan: ParameterScan, observable: str, ks: Sequence[int], cfg: ClusterConfig
) -> dict[int, float]:
    """Inertia for each candidate k; choosing k stays a user decision."""
    profile = {}
    for k in ks:
        k_cfg = replace(cfg, k=int(k), k_by_observable={})
        profile[int(k)] = cluster_observable(scan, observable, k_cfg).inertia
    return profile


# --- user refinement ------------------------------------------------------


def _rebuild(
    scan: ParameterScan,
    model: ClusterModel,
    observable: str,
    assignment: dict[str, int],
    old: ObservableClustering,
    cfg: ClusterConfig,
    touched: set[int],
) -> ClusterModel:
    """New model with `assignment` applied; centroids of touched clusters redone."""
    run_ids, series, scale = _canonical_series(scan, observable, cfg)
    row_of = {r: i for i, r in enumerate(run_ids)}
    dmat = dtw_distance_matrix(series, cfg.dtw)

    present = sorted(set(assignment.values()))
    centroids: dict[int, np.ndarray] = {}
    inertia = 0.0
    for c in present:
        rows = [row_of[r] for r in sorted(assignment) if assignment[r] == c]
        members = [series[i] for i in rows]
        if c in touched or c not in old.centroids:
            scaled_centroid = _centroid_for(members, rows, dmat, cfg)
        else:
            scaled_centroid = scale.forward(old.centroids[c])
        centroids[c] = scale.inverse(scaled_centroid)
        inertia += sum(dtw_distance(s, scaled_centroid, cfg.dtw) for s in members)

    sizes = {c: sum(1 for v in assignment.values() if v == c) for c in present}
    order = tuple(sorted(sizes, key=lambda c: (-sizes[c], c)))
    updated = ObservableClustering(
        observable=observable,
        assignment=dict(assignment),
        centroids=centroids,
        sizes=sizes,
        order=order,
        inertia=float(inertia),
        notes=old.notes,
    )
    per_observable = dict(model.per_observable)
    per_observable[observable] = updated
    return ClusterModel(scan_id=model.scan_id, per_observable=per_observable)


def _get_clustering(model: ClusterModel, observable: str) -> ObservableClustering:
    if observable not in model.per_observable:
        raise KeyError(f"unknown observable {observable!r}")
    return model.per_observable[observable]


def move_runs(
    scan: ParameterScan,
    model: ClusterModel,
    observable: str,
    run_ids: Sequence[str],
    target_cluster: int,
    cfg: ClusterConfig,
) -> ClusterModel:
    """Reassign runs to an existing or fresh cluster; emptied sources vanish."""
    clustering = _get_clustering(model, observable)
    unknown = [r for r in run_ids if r not in clustering.assignment]
    if unknown:
        raise KeyError(f"unknown runs for observable {observable!r}: {unknown}")
    if not run_ids:
        return model

    target = int(target_cluster)
    assignment = dict(clustering.assignment)
    touched = {target}
    for r in run_ids:
        touched.add(assignment[r])
        assignment[r] = target
    return _rebuild(scan, model, observable, assignment, clustering, cfg, touched)


def merge_clusters(
    scan: ParameterScan,
    model: ClusterModel,
    observable: str,
    cluster_ids: Sequence[int],
    cfg: ClusterConfig,
) -> ClusterModel:
    """Union the given clusters into the lowest id, recomputing its centroid."""
    clustering = _get_clustering(model, observable)
    ids = sorted({int(c) for c in cluster_ids})
    unknown = [c for c in ids if c not in clustering.centroids]
    if unknown:
        raise KeyError(f"unknown clusters for observable {observable!r}: {unknown}")
    if len(ids) < 2:
        return model

    target = ids[0]
    assignment = {
        r: (target if c in ids else c) for r, c in clustering.assignment.items()
    }
    return _rebuild(scan, model, observable, assignment, clustering, cfg, {target})


def split_cluster(
    scan: ParameterScan,
    model: ClusterModel,
    observable: str,
    cluster_id: int,
    k2: int,
    cfg: ClusterConfig,
) -> ClusterModel:
    """Re-cluster one cluster's members into k2 fresh clusters."""
    clustering = _get_clustering(model, observable)
    cluster_id = int(cluster_id)
    if cluster_id not in clustering.centroids:
        raise KeyError(f"unknown cluster {cluster_id} for observable {observable!r}")
    members = clustering.members(cluster_id)
    if k2 < 2:
        raise ValueError(f"split requires k2 >= 2, got {k2}")
    if k2 > len(members):
        raise ValueError(f"cannot split {len(members)} members into k2={k2} clusters")

    sub_scan = ParameterScan(
        scan.scan_id,
        scan.parameter_schema,
        scan.observable_schema,
        [r for r in scan.runs if r.run_id in set(members)],
    )
    sub_cfg = replace(cfg, k=k2, k_by_observable={})
    sub = cluster_observable(sub_scan, observable, sub_cfg)

    next_id = max(clustering.centroids) + 1
    assignment = dict(clustering.assignment)
    new_ids = set()
    for r in members:
        new_c = next_id + sub.assignment[r]
        assignment[r] = new_c
        new_ids.add(new_c)
    return _rebuild(scan, model, observable, assignment, clustering, cfg, new_ids)


# --- serialization --------------------------------------------------------


def model_to_obj(model: ClusterModel) -> dict:
    return {
        "scan_id": model.scan_id,
        "observables": {
            obs: {
                "assignment": dict(sorted(c.assignment.items())),
                "centroids": {str(cid): [float(v) for v in c.centroids[cid]] for cid in c.centroids},
                "sizes": {str(cid): int(c.sizes[cid]) for cid in c.sizes},
                "order": [int(cid) for cid in c.order],
                "inertia": float(c.inertia),
                "notes": list(c.notes),
            }
            for obs, c in model.per_observable.items()
        },
    }


def model_from_obj(obj: dict) -> ClusterModel:
    per_observable = {}
    for obs, c in obj["observables"].items():
        per_observable[obs] = ObservableClustering(
            observable=obs,
            assignment={r: int(v) for r, v in c["assignment"].items()},
            centroids={int(cid): np.asarray(vs, dtype=np.float64) for cid, vs in c["centroids"].items()},
            sizes={int(cid): int(v) for cid, v in c["sizes"].items()},
            order=tuple(int(v) for v in c["order"]),
            inertia=float(c["inertia"]),
            notes=tuple(c.get("notes", ())),
        )
    return ClusterModel(scan_id=obj.get("scan_id", ""), per_observable=per_observable)

"""Brush and cluster-pick semantics with linked active/inactive partitioning.

A run is active iff it satisfies every brush (closed intervals, inclusive on
both ends so point brushes on discrete grids work) and, on every temporal
axis with a non-empty pick set, its cluster is picked.  Constraints AND
across axes; picked clusters OR within an axis.  The empty state keeps all
runs active.

Hover is transient presentation state and never filters.  The evaluation
result is a single run-id partition shared by every view, which is what
keeps polylines and trend figures visually consistent.
"""

from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence, Union

from .clustering import ClusterModel
from .data_model import ParameterScan

HoverTarget = Union[None, str, tuple[str, int]]


class SelectionError(ValueError):
    pass


class StaleClusterError(SelectionError):
    """A pick references a cluster that no longer exists; the UI drops it."""

    def __init__(self, stale: Sequence[tuple[str, int]]):
        self.stale = tuple(stale)
        refs = ", ".join(f"{axis}:{cid}" for axis, cid in self.stale)
        super().__init__(f"stale cluster picks: {refs}")


@dataclass(frozen=True)
class SelectionState:
    brushes: Mapping[str, tuple[float, float]] = field(default_factory=dict)
    cluster_picks: Mapping[str, frozenset[int]] = field(default_factory=dict)
    hovered: HoverTarget = None
    bookmarks: frozenset[str] = frozenset()

    def __post_init__(self):
        brushes = {}
        for axis, interval in dict(self.brushes).items():
            lo, hi = float(interval[0]), float(interval[1])
            if lo > hi:
                raise SelectionError(f"brush on {axis!r}: lo {lo:g} > hi {hi:g}")
            brushes[str(axis)] = (lo, hi)
        picks = {
            str(axis): frozenset(int(c) for c in ids)
            for axis, ids in dict(self.cluster_picks).items()
        }
        object.__setattr__(self, "brushes", brushes)
        object.__setattr__(self, "cluster_picks", picks)
        object.__setattr__(self, "bookmarks", frozenset(self.bookmarks))

    def is_empty(self) -> bool:
        return not self.brushes and not any(self.cluster_picks.values())


def evaluate(
    state: SelectionState, scan: ParameterScan, model: ClusterModel
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Partition run ids into (active, inactive), both in scan order."""
    schema = scan.parameter_schema
    for axis in state.brushes:
        schema.index_of(axis)  # raises KeyError on unknown parameters

    stale: list[tuple[str, int]] = []
    for axis, picks in state.cluster_picks.items():
        if axis not in model.per_observable:
            stale.extend((axis, cid) for cid in sorted(picks))
            continue
        known = set(model.per_observable[axis].centroids)
        stale.extend((axis, cid) for cid in sorted(picks) if cid not in known)
    if stale:
        raise StaleClusterError(stale)

    active: list[str] = []
    inactive: list[str] = []
    for run in scan.runs:
        ok = True
        for axis, (lo, hi) in state.brushes.items():
            value = run.value_of(schema, axis)
            if not (lo <= value <= hi):
                ok = False
                break
        if ok:
            for axis, picks in state.cluster_picks.items():
                if not picks:
                    continue
                if model.per_observable[axis].assignment[run.run_id] not in picks:
                    ok = False
                    break
        (active if ok else inactive).append(run.run_id)
    return tuple(active), tuple(inactive)


def move_brush(
    state: SelectionState, axis: str, new_interval: Optional[tuple[float, float]]
) -> SelectionState:
    """Replace (or with None, clear) the brush on one scalar axis."""
    brushes = dict(state.brushes)
    if new_interval is None:
        brushes.pop(axis, None)
    else:
        brushes[axis] = (float(new_interval[0]), float(new_interval[1]))
    return replace(state, brushes=brushes)


def pick_cluster(
    state: SelectionState, axis: str, cluster_id: int, mode: str = "toggle"
) -> SelectionState:
    """Update one axis's pick set; toggling a pick twice restores the state."""
    if mode not in ("toggle", "exclusive"):
        raise SelectionError(f"unknown pick mode {mode!r}")
    cluster_id = int(cluster_id)
    picks = {k: set(v) for k, v in state.cluster_picks.items()}
    if mode == "exclusive":
        picks[axis] = {cluster_id}
    else:
        current = picks.setdefault(axis, set())
        if cluster_id in current:
            current.remove(cluster_id)
        else:
            current.add(cluster_id)
    picks = {k: v for k, v in picks.items() if v}
    return replace(state, cluster_picks=picks)


def toggle_bookmark(state: SelectionState, run_id: str) -> SelectionState:
    bookmarks = set(state.bookmarks)
    if run_id in bookmarks:
        bookmarks.remove(run_id)
    else:
        bookmarks.add(run_id)
    return replace(state, bookmarks=frozenset(bookmarks))


def set_hover(state: SelectionState, target: HoverTarget) -> SelectionState:
    return replace(state, hovered=target)


def parameter_footprint(
    active_run_ids: Sequence[str], scan: ParameterScan
) -> dict[str, dict]:
    """Per-parameter extrema and distinct values over the active runs."""
    ids = list(active_run_ids)
    if not ids:
        raise SelectionError("parameter footprint of an empty active set is undefined")
    runs = [scan.run_by_id(r) for r in ids]
    footprint = {}
    for i, spec in enumerate(scan.parameter_schema.parameters):
        values = sorted({float(r.config[i]) for r in runs})
        footprint[spec.name] = {
            "min": values[0],
            "max": values[-1],
            "values": values,
        }
    return footprint


# --- serialization --------------------------------------------------------


def selection_to_obj(state: SelectionState) -> dict:
    if state.hovered is None:
        hovered = None
    elif isinstance(state.hovered, str):
        hovered = {"run": state.hovered}
    else:
        axis, cid = state.hovered
        hovered = {"cluster": {"axis": axis, "id": int(cid)}}
    return {
        "brushes": {axis: [lo, hi] for axis, (lo, hi) in sorted(state.brushes.items())},
        "cluster_picks": {
            axis: sorted(picks) for axis, picks in sorted(state.cluster_picks.items())
        },
        "hovered": hovered,
        "bookmarks": sorted(state.bookmarks),
    }


def selection_from_obj(obj: Mapping) -> SelectionState:
    hovered_obj = obj.get("hovered")
    hovered: HoverTarget = None
    if isinstance(hovered_obj, Mapping):
        if "run" in hovered_obj:
            hovered = str(hovered_obj["run"])
        elif "cluster" in hovered_obj:
            hovered = (str(hovered_obj["cluster"]["axis"]), int(hovered_obj["cluster"]["id"]))
    return SelectionState(
        brushes={str(a): (v[0], v[1]) for a, v in dict(obj.get("brushes", {})).items()},
        cluster_picks={
            str(a): frozenset(int(c) for c in v)
            for a, v in dict(obj.get("cluster_picks", {})).items()
        },
        hovered=hovered,
        bookmarks=frozenset(str(r) for r in obj.get("bookmarks", ())),
    )

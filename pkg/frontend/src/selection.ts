/** Pure client-side updates of the selection state (the server evaluates). */

import { cloneSelection, type Interval, type SelectionState } from "./types.js";

export function moveBrush(
  state: SelectionState,
  axis: string,
  interval: Interval | null,
): SelectionState {
  const next = cloneSelection(state);
  if (interval === null) {
    delete next.brushes[axis];
  } else {
    const [a, b] = interval;
    next.brushes[axis] = a <= b ? [a, b] : [b, a];
  }
  return next;
}

export function pickCluster(
  state: SelectionState,
  axis: string,
  clusterId: number,
  mode: "toggle" | "exclusive" = "toggle",
): SelectionState {
  const next = cloneSelection(state);
  if (mode === "exclusive") {
    next.cluster_picks[axis] = [clusterId];
    return next;
  }
  const current = new Set(next.cluster_picks[axis] ?? []);
  if (current.has(clusterId)) {
    current.delete(clusterId);
  } else {
    current.add(clusterId);
  }
  if (current.size === 0) {
    delete next.cluster_picks[axis];
  } else {
    next.cluster_picks[axis] = [...current].sort((a, b) => a - b);
  }
  return next;
}

export function clearPicks(state: SelectionState): SelectionState {
  const next = cloneSelection(state);
  next.cluster_picks = {};
  return next;
}

export function toggleBookmark(state: SelectionState, runId: string): SelectionState {
  const next = cloneSelection(state);
  const set = new Set(next.bookmarks);
  if (set.has(runId)) {
    set.delete(runId);
  } else {
    set.add(runId);
  }
  next.bookmarks = [...set].sort();
  return next;
}

/** Drop picks the server reported stale (cluster deleted by a refine op). */
export function dropStalePicks(
  state: SelectionState,
  stale: { axis: string; cluster: number }[],
): SelectionState {
  const next = cloneSelection(state);
  for (const { axis, cluster } of stale) {
    const kept = (next.cluster_picks[axis] ?? []).filter((id) => id !== cluster);
    if (kept.length === 0) {
      delete next.cluster_picks[axis];
    } else {
      next.cluster_picks[axis] = kept;
    }
  }
  return next;
}

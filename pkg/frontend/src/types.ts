/** Wire types of the tempopc HTTP API (canonical JSON payloads). */

export interface AxisSpec {
  id: string;
  kind: "scalar" | "temporal";
  source: string;
  position: number;
}

export interface ColorSpec {
  hue: number;
  saturation: number;
  lightness: number;
  hex: string;
}

export interface TrendTransform {
  x_scale: number;
  x_offset: number;
  y_scale: number;
  y_offset: number;
}

export interface ClusterBox {
  axis_id: string;
  cluster_id: number;
  x0: number;
  x1: number;
  y0: number;
  y1: number;
  color: ColorSpec;
  trend: TrendTransform;
}

export interface PolylinePoint {
  axis_id: string;
  y: number;
}

export interface LayoutModel {
  axes: AxisSpec[];
  scalar_domains: Record<string, [number, number]>;
  boxes: ClusterBox[];
  polylines: Record<string, PolylinePoint[]>;
  palette: {
    hue_by_observable: Record<string, number>;
    color_by_cluster: Record<string, Record<string, ColorSpec>>;
  };
  axis_order: string[];
  cluster_orders: Record<string, number[]>;
  warnings: string[];
}

export interface ObservableClustering {
  assignment: Record<string, number>;
  centroids: Record<string, number[]>;
  sizes: Record<string, number>;
  order: number[];
  inertia: number;
  notes: string[];
}

export interface ClusterModel {
  scan_id: string;
  observables: Record<string, ObservableClustering>;
}

export interface ScanDocument {
  scan_id: string;
  parameters: { name: string; unit: string; kind: string }[];
  observables: { name: string; unit: string }[];
  time_grid: number[];
  runs: { run_id: string; config: number[]; series: Record<string, number[]> }[];
}

export type Interval = [number, number];

/** Client-owned selection state, serialized verbatim to the server. */
export interface SelectionState {
  brushes: Record<string, Interval>;
  cluster_picks: Record<string, number[]>;
  hovered: null | { run: string } | { cluster: { axis: string; id: number } };
  bookmarks: string[];
}

export interface EvaluateResult {
  active: string[];
  inactive: string[];
  footprint: Record<string, { min: number; max: number; values: number[] }> | null;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail: unknown;
}

export type RefineOp =
  | { op: "move"; observable: string; run_ids: string[]; target_cluster: number }
  | { op: "merge"; observable: string; cluster_ids: number[] }
  | { op: "split"; observable: string; cluster_id: number; k2: number };

export function emptySelection(): SelectionState {
  return { brushes: {}, cluster_picks: {}, hovered: null, bookmarks: [] };
}

export function cloneSelection(state: SelectionState): SelectionState {
  return {
    brushes: { ...state.brushes },
    cluster_picks: Object.fromEntries(
      Object.entries(state.cluster_picks).map(([k, v]) => [k, [...v]]),
    ),
    hovered: state.hovered,
    bookmarks: [...state.bookmarks],
  };
}

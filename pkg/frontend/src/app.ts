/** Controller: owns the selection state and keeps the view consistent.
 *
 * All analysis math happens on the server; this class only sequences
 * requests.  Brush drags re-evaluate with ~50 ms debouncing, the final
 * state after an interaction is always evaluated exactly once more, and at
 * most one evaluate request is in flight with latest-state-wins so the
 * rendered partition never lags behind the selection.
 */

import { ApiClient, ApiError } from "./api.js";
import * as sel from "./selection.js";
import type {
  ClusterModel,
  EvaluateResult,
  Interval,
  LayoutModel,
  ScanDocument,
  SelectionState,
} from "./types.js";
import { cloneSelection, emptySelection } from "./types.js";
import { PcpView } from "./view.js";

export interface AppOptions {
  debounceMs: number;
  clusterConfig: { k: number; restarts: number; seed: number };
  notify(message: string): void;
}

const DEFAULT_OPTIONS: AppOptions = {
  debounceMs: 50,
  clusterConfig: { k: 3, restarts: 3, seed: 0 },
  notify: () => undefined,
};

export class AnalysisApp {
  readonly options: AppOptions;
  selection: SelectionState = emptySelection();
  scanId = "";
  scan: ScanDocument | null = null;
  model: ClusterModel | null = null;
  layout: LayoutModel | null = null;
  lastResult: EvaluateResult | null = null;

  private undoStack: SelectionState[] = [];
  private debounceTimer: ReturnType<typeof setTimeout> | null = null;
  private inflight: Promise<void> = Promise.resolve();
  private generation = 0;

  constructor(
    private readonly api: ApiClient,
    readonly view: PcpView,
    options: Partial<AppOptions> = {},
  ) {
    this.options = { ...DEFAULT_OPTIONS, ...options };
  }

  /** Generate (or load) a scan, cluster it, lay it out, render everything. */
  async init(scanId?: string, seed = 0): Promise<void> {
    if (scanId) {
      this.scanId = scanId;
    } else {
      const generated = await this.api.generateScan(seed);
      this.scanId = generated.scan_id;
    }
    this.scan = await this.api.getScan(this.scanId);
    this.model = await this.api.cluster(this.scanId, this.options.clusterConfig);
    this.layout = await this.api.layout(this.scanId);
    this.view.render(this.scan, this.model, this.layout);
    await this.evaluateNow();
  }

  // --- selection interactions --------------------------------------------

  previewBrush(axis: string, interval: Interval): void {
    this.view.showBrush(axis, interval);
    this.selection = sel.moveBrush(this.selection, axis, interval);
    this.scheduleEvaluate();
  }

  setBrush(axis: string, interval: Interval | null): void {
    this.pushUndo();
    this.selection = sel.moveBrush(this.selection, axis, interval);
    this.view.showBrush(axis, interval);
    void this.evaluateNow();
  }

  pickCluster(axis: string, clusterId: number, exclusive: boolean): void {
    this.pushUndo();
    this.selection = sel.pickCluster(
      this.selection,
      axis,
      clusterId,
      exclusive ? "exclusive" : "toggle",
    );
    this.view.setPickedClusters(this.selection.cluster_picks);
    void this.evaluateNow();
  }

  toggleBookmark(runId: string): void {
    this.pushUndo();
    this.selection = sel.toggleBookmark(this.selection, runId);
    this.view.setBookmarks(this.selection.bookmarks);
  }

  hover(runId: string | null): void {
    this.selection = { ...cloneSelection(this.selection), hovered: runId ? { run: runId } : null };
    this.view.setHovered(runId);
  }

  undo(): void {
    const previous = this.undoStack.pop();
    if (!previous) return;
    this.selection = previous;
    this.syncSelectionVisuals();
    void this.evaluateNow();
  }

  private pushUndo(): void {
    this.undoStack.push(cloneSelection(this.selection));
    if (this.undoStack.length > 100) this.undoStack.shift();
  }

  private syncSelectionVisuals(): void {
    if (!this.layout) return;
    for (const axis of this.layout.axes) {
      if (axis.kind === "scalar") {
        this.view.showBrush(axis.id, this.selection.brushes[axis.id] ?? null);
      }
    }
    this.view.setPickedClusters(this.selection.cluster_picks);
    this.view.setBookmarks(this.selection.bookmarks);
  }

  // --- evaluation loop ----------------------------------------------------

  private scheduleEvaluate(): void {
    if (this.debounceTimer !== null) return;
    this.debounceTimer = setTimeout(() => {
      this.debounceTimer = null;
      void this.evaluateNow();
    }, this.options.debounceMs);
  }

  /** Evaluate the current selection.
   *
   * Requests are serialized on one promise chain (at most one in flight);
   * a pass that has been superseded by a newer call skips its fetch, so the
   * partition applied to the view always belongs to the newest selection.
   * Awaiting this method therefore means "the view reflects my state".
   */
  async evaluateNow(): Promise<void> {
    const myGeneration = ++this.generation;
    const run = async (): Promise<void> => {
      // Stale picks shrink the selection and retry, so this loop terminates.
      for (;;) {
        if (myGeneration !== this.generation) return;
        try {
          const result = await this.api.evaluate(this.scanId, this.selection);
          if (myGeneration === this.generation) {
            this.lastResult = result;
            this.view.applyPartition(result.active);
          }
          return;
        } catch (error) {
          if (error instanceof ApiError && error.body.code === "stale_cluster_pick") {
            const stale = error.body.detail as { axis: string; cluster: number }[];
            this.selection = sel.dropStalePicks(this.selection, stale);
            this.view.setPickedClusters(this.selection.cluster_picks);
            continue;
          }
          this.options.notify(String(error));
          return;
        }
      }
    };
    const chained = this.inflight.then(run);
    this.inflight = chained.catch(() => undefined);
    await chained;
  }

  // --- structural interactions --------------------------------------------

  /** Drag-and-drop axis reordering: the dragged axis lands at the target's
   * slot; brushes and picks survive untouched. */
  async reorderAxes(sourceAxis: string, targetAxis: string): Promise<void> {
    if (!this.layout || sourceAxis === targetAxis) return;
    const order = [...this.layout.axis_order];
    const from = order.indexOf(sourceAxis);
    const to = order.indexOf(targetAxis);
    if (from < 0 || to < 0) return;
    order.splice(from, 1);
    order.splice(to, 0, sourceAxis);
    await this.applyAxisOrder(order);
  }

  async applyAxisOrder(order: string[]): Promise<void> {
    if (!this.scan || !this.model) return;
    this.layout = await this.api.layout(this.scanId, order, this.layout?.cluster_orders);
    this.view.render(this.scan, this.model, this.layout);
    this.syncSelectionVisuals();
    await this.evaluateNow();
  }

  async refine(
    op:
      | { op: "move"; observable: string; run_ids: string[]; target_cluster: number }
      | { op: "merge"; observable: string; cluster_ids: number[] }
      | { op: "split"; observable: string; cluster_id: number; k2: number },
  ): Promise<void> {
    if (!this.scan) return;
    try {
      this.model = await this.api.refine(this.scanId, op);
    } catch (error) {
      this.options.notify(String(error));
      return;
    }
    this.layout = await this.api.layout(
      this.scanId,
      this.layout?.axis_order,
    );
    this.view.render(this.scan, this.model, this.layout);
    this.syncSelectionVisuals();
    await this.evaluateNow();
  }

  /** Wire the view's callbacks to this controller. */
  static createCallbacks(getApp: () => AnalysisApp) {
    return {
      onBrush: (axis: string, interval: Interval | null) => getApp().setBrush(axis, interval),
      onBrushPreview: (axis: string, interval: Interval) => getApp().previewBrush(axis, interval),
      onClusterClick: (axis: string, clusterId: number, exclusive: boolean) =>
        getApp().pickCluster(axis, clusterId, exclusive),
      onAxisDrop: (source: string, target: string) => void getApp().reorderAxes(source, target),
      onRunClick: (runId: string) => getApp().toggleBookmark(runId),
      onHover: (runId: string | null) => getApp().hover(runId),
    };
  }
}

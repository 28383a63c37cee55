/** SVG scene for one layout: axes, cluster boxes, trend charts, polylines.
 *
 * The view draws exactly what the server's LayoutModel prescribes (normalized
 * [0,1]^2 geometry mapped to pixels here) and keeps one invariant: every
 * element belonging to a run -- its polyline and each of its trend lines --
 * always carries the same active/inactive/hovered/bookmarked state, so
 * brushing on any axis grays out whole runs consistently in every view.
 */

import type { ClusterModel, Interval, LayoutModel, ScanDocument } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface ViewCallbacks {
  onBrush(axis: string, interval: Interval | null): void;
  onBrushPreview(axis: string, interval: Interval): void;
  onClusterClick(axis: string, clusterId: number, exclusive: boolean): void;
  onAxisDrop(sourceAxis: string, targetAxis: string): void;
  onRunClick(runId: string): void;
  onHover(runId: string | null): void;
}

export interface ViewOptions {
  width: number;
  height: number;
  marginTop: number;
  marginBottom: number;
  marginLeft: number;
  marginRight: number;
}

const DEFAULTS: ViewOptions = {
  width: 1400,
  height: 780,
  marginTop: 56,
  marginBottom: 36,
  marginLeft: 36,
  marginRight: 36,
};

export class PcpView {
  readonly svg: SVGSVGElement;
  private readonly options: ViewOptions;
  private layout: LayoutModel | null = null;
  private scan: ScanDocument | null = null;
  private model: ClusterModel | null = null;
  private runElements = new Map<string, SVGElement[]>();
  private brushRects = new Map<string, SVGRectElement>();
  private axisX = new Map<string, number>();
  private dragSourceAxis: string | null = null;

  constructor(
    private readonly container: HTMLElement,
    private readonly callbacks: ViewCallbacks,
    options: Partial<ViewOptions> = {},
  ) {
    this.options = { ...DEFAULTS, ...options };
    this.svg = document.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.svg.setAttribute("viewBox", `0 0 ${this.options.width} ${this.options.height}`);
    this.svg.setAttribute("class", "pcp");
    this.container.appendChild(this.svg);
  }

  private px(nx: number): number {
    const { marginLeft, marginRight, width } = this.options;
    return marginLeft + nx * (width - marginLeft - marginRight);
  }

  private py(ny: number): number {
    const { marginTop, marginBottom, height } = this.options;
    return marginTop + (1 - ny) * (height - marginTop - marginBottom);
  }

  /** Inverse of py, back to normalized axis coordinates. */
  normalizedY(pixelY: number): number {
    const { marginTop, marginBottom, height } = this.options;
    return 1 - (pixelY - marginTop) / (height - marginTop - marginBottom);
  }

  render(scan: ScanDocument, model: ClusterModel, layout: LayoutModel): void {
    this.scan = scan;
    this.model = model;
    this.layout = layout;
    this.svg.replaceChildren();
    this.runElements.clear();
    this.brushRects.clear();
    this.axisX.clear();

    for (const axis of layout.axes) {
      this.axisX.set(axis.id, (axis.position + 0.5) / layout.axes.length);
    }

    this.drawAxes();
    this.drawBoxes();
    this.drawRuns();
    this.drawBrushOverlays();
  }

  private element<K extends keyof SVGElementTagNameMap>(
    tag: K,
    attrs: Record<string, string>,
    parent: SVGElement,
  ): SVGElementTagNameMap[K] {
    const el = document.createElementNS(SVG_NS, tag);
    for (const [key, value] of Object.entries(attrs)) {
      el.setAttribute(key, value);
    }
    parent.appendChild(el);
    return el;
  }

  private drawAxes(): void {
    if (!this.layout) return;
    const group = this.element("g", { class: "axes" }, this.svg);
    for (const axis of this.layout.axes) {
      const x = this.px(this.axisX.get(axis.id)!);
      this.element(
        "line",
        {
          class: "axis-line",
          x1: String(x),
          y1: String(this.py(0)),
          x2: String(x),
          y2: String(this.py(1)),
          stroke: "#888",
          "stroke-width": "1",
        },
        group,
      );
      const label = this.element(
        "text",
        {
          class: "axis-label",
          "data-axis": axis.id,
          x: String(x),
          y: String(this.options.marginTop - 18),
          "text-anchor": "middle",
        },
        group,
      );
      label.textContent = axis.source;
      label.addEventListener("mousedown", (event) => {
        event.preventDefault();
        this.dragSourceAxis = axis.id;
      });
      label.addEventListener("mouseup", () => {
        if (this.dragSourceAxis && this.dragSourceAxis !== axis.id) {
          this.callbacks.onAxisDrop(this.dragSourceAxis, axis.id);
        }
        this.dragSourceAxis = null;
      });
      if (axis.kind === "scalar") {
        const [lo, hi] = this.layout.scalar_domains[axis.id]!;
        for (const [value, ny, dy] of [
          [lo, 0, 14],
          [hi, 1, -6],
        ] as const) {
          const tick = this.element(
            "text",
            {
              class: "axis-end",
              x: String(x),
              y: String(this.py(ny) + dy),
              "text-anchor": "middle",
            },
            group,
          );
          tick.textContent = formatNumber(value);
        }
      }
    }
  }

  private drawBoxes(): void {
    if (!this.layout) return;
    const group = this.element("g", { class: "boxes" }, this.svg);
    for (const box of this.layout.boxes) {
      const rect = this.element(
        "rect",
        {
          class: "cluster-box",
          "data-axis": box.axis_id,
          "data-cluster": String(box.cluster_id),
          x: String(this.px(box.x0)),
          y: String(this.py(box.y1)),
          width: String(this.px(box.x1) - this.px(box.x0)),
          height: String(this.py(box.y0) - this.py(box.y1)),
          rx: "3",
          fill: box.color.hex,
        },
        group,
      );
      rect.addEventListener("click", (event) => {
        this.callbacks.onClusterClick(box.axis_id, box.cluster_id, event.shiftKey);
      });
    }
  }

  private trendPath(runId: string, axisId: string): string {
    const layout = this.layout!;
    const scan = this.scan!;
    const model = this.model!;
    const clusterId = model.observables[axisId]!.assignment[runId]!;
    const box = layout.boxes.find(
      (b) => b.axis_id === axisId && b.cluster_id === clusterId,
    )!;
    const run = scan.runs.find((r) => r.run_id === runId)!;
    const points = scan.time_grid.map((t, i) => {
      const value = run.series[axisId]![i]!;
      const nx = box.trend.x_scale * t + box.trend.x_offset;
      const ny = box.trend.y_scale * value + box.trend.y_offset;
      return `${this.px(nx).toFixed(2)},${this.py(ny).toFixed(2)}`;
    });
    return points.join(" ");
  }

  private drawRuns(): void {
    const layout = this.layout!;
    const scan = this.scan!;
    const trendGroup = this.element("g", { class: "trends" }, this.svg);
    const lineGroup = this.element("g", { class: "polylines" }, this.svg);

    for (const run of scan.runs) {
      const elements: SVGElement[] = [];
      for (const axis of layout.axes) {
        if (axis.kind !== "temporal") continue;
        const path = this.element(
          "polyline",
          {
            class: "trend",
            "data-run": run.run_id,
            "data-obs": axis.source,
            points: this.trendPath(run.run_id, axis.id),
            fill: "none",
          },
          trendGroup,
        );
        const title = document.createElementNS(SVG_NS, "title");
        title.textContent = scan.time_grid
          .map((t, i) => `t=${formatNumber(t)}: ${formatNumber(run.series[axis.id]![i]!)}`)
          .join("\n");
        path.appendChild(title);
        this.wireRunEvents(path, run.run_id);
        elements.push(path);
      }
      const points = layout.polylines[run.run_id]!
        .map((p) => `${this.px(this.axisX.get(p.axis_id)!).toFixed(2)},${this.py(p.y).toFixed(2)}`)
        .join(" ");
      const polyline = this.element(
        "polyline",
        {
          class: "polyline",
          "data-run": run.run_id,
          points,
          fill: "none",
        },
        lineGroup,
      );
      this.wireRunEvents(polyline, run.run_id);
      elements.push(polyline);
      this.runElements.set(run.run_id, elements);
    }
  }

  private wireRunEvents(el: SVGElement, runId: string): void {
    el.addEventListener("mouseenter", () => this.callbacks.onHover(runId));
    el.addEventListener("mouseleave", () => this.callbacks.onHover(null));
    el.addEventListener("click", () => this.callbacks.onRunClick(runId));
  }

  private drawBrushOverlays(): void {
    const layout = this.layout!;
    const group = this.element("g", { class: "brushes" }, this.svg);
    for (const axis of layout.axes) {
      if (axis.kind !== "scalar") continue;
      const x = this.px(this.axisX.get(axis.id)!);
      const hit = this.element(
        "rect",
        {
          class: "brush-hit",
          "data-axis": axis.id,
          x: String(x - 10),
          y: String(this.py(1)),
          width: "20",
          height: String(this.py(0) - this.py(1)),
          fill: "transparent",
        },
        group,
      );
      const brushRect = this.element(
        "rect",
        {
          class: "brush-range",
          "data-axis": axis.id,
          x: String(x - 7),
          y: "0",
          width: "14",
          height: "0",
          visibility: "hidden",
        },
        group,
      );
      this.brushRects.set(axis.id, brushRect);
      this.wireBrushDrag(hit, axis.id);
    }
  }

  private dataValue(axisId: string, pixelY: number): number {
    const [lo, hi] = this.layout!.scalar_domains[axisId]!;
    const ny = Math.min(1, Math.max(0, this.normalizedY(pixelY)));
    return lo + ny * (hi - lo);
  }

  private wireBrushDrag(hit: SVGRectElement, axisId: string): void {
    let startY: number | null = null;
    hit.addEventListener("mousedown", (event) => {
      event.preventDefault();
      startY = (event as MouseEvent).clientY;
    });
    hit.addEventListener("mousemove", (event) => {
      if (startY === null) return;
      const y = (event as MouseEvent).clientY;
      const interval = this.sortedInterval(axisId, startY, y);
      this.callbacks.onBrushPreview(axisId, interval);
    });
    hit.addEventListener("mouseup", (event) => {
      if (startY === null) return;
      const y = (event as MouseEvent).clientY;
      const interval = this.sortedInterval(axisId, startY, y);
      startY = null;
      // A zero-length drag clears the brush (click on the axis).
      this.callbacks.onBrush(axisId, interval[0] === interval[1] ? null : interval);
    });
  }

  private sortedInterval(axisId: string, y0: number, y1: number): Interval {
    const a = this.dataValue(axisId, y0);
    const b = this.dataValue(axisId, y1);
    return a <= b ? [a, b] : [b, a];
  }

  /** Reflect a brush interval (data units) on its axis overlay. */
  showBrush(axisId: string, interval: Interval | null): void {
    const rect = this.brushRects.get(axisId);
    if (!rect || !this.layout) return;
    if (interval === null) {
      rect.setAttribute("visibility", "hidden");
      return;
    }
    const [lo, hi] = this.layout.scalar_domains[axisId]!;
    const span = hi - lo || 1;
    const yTop = this.py((interval[1] - lo) / span);
    const yBottom = this.py((interval[0] - lo) / span);
    rect.setAttribute("y", String(yTop));
    rect.setAttribute("height", String(Math.max(0, yBottom - yTop)));
    rect.setAttribute("visibility", "visible");
  }

  /** Apply the evaluated partition to every element of every run. */
  applyPartition(activeRunIds: Iterable<string>): void {
    const active = new Set(activeRunIds);
    for (const [runId, elements] of this.runElements) {
      const state = active.has(runId) ? "active" : "inactive";
      for (const el of elements) {
        el.classList.remove("active", "inactive");
        el.classList.add(state);
      }
    }
  }

  setHovered(runId: string | null): void {
    for (const [id, elements] of this.runElements) {
      for (const el of elements) {
        el.classList.toggle("hovered", id === runId);
      }
    }
  }

  setBookmarks(runIds: Iterable<string>): void {
    const marked = new Set(runIds);
    for (const [id, elements] of this.runElements) {
      for (const el of elements) {
        el.classList.toggle("bookmarked", marked.has(id));
      }
    }
  }

  setPickedClusters(picks: Record<string, number[]>): void {
    const boxes = this.svg.querySelectorAll<SVGRectElement>("rect.cluster-box");
    boxes.forEach((box) => {
      const axis = box.getAttribute("data-axis")!;
      const cluster = Number(box.getAttribute("data-cluster"));
      box.classList.toggle("picked", (picks[axis] ?? []).includes(cluster));
    });
  }

  /** run ids whose polyline carries the given state class (test hook). */
  runsWithClass(cls: string, selector = ".polyline"): string[] {
    const out: string[] = [];
    this.svg.querySelectorAll<SVGElement>(selector).forEach((el) => {
      if (el.classList.contains(cls)) {
        out.push(el.getAttribute("data-run")!);
      }
    });
    return [...new Set(out)].sort();
  }
}

function formatNumber(value: number): string {
  if (Number.isInteger(value)) return String(value);
  return String(Math.round(value * 1e6) / 1e6);
}

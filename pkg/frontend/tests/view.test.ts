/** DOM-level tests of the scene against recorded server payloads. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { beforeEach, describe, expect, it, vi } from "vitest";

import { PcpView, type ViewCallbacks } from "../src/view.js";
import type {
  ClusterModel,
  EvaluateResult,
  LayoutModel,
  ScanDocument,
} from "../src/types.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf-8")) as T;
}

const scan = fixture<ScanDocument>("scan.json");
const model = fixture<ClusterModel>("clusters.json");
const layout = fixture<LayoutModel>("layout.json");
const evaluated = fixture<EvaluateResult>("evaluate_lr1.json");

function noopCallbacks(): ViewCallbacks {
  return {
    onBrush: vi.fn(),
    onBrushPreview: vi.fn(),
    onClusterClick: vi.fn(),
    onAxisDrop: vi.fn(),
    onRunClick: vi.fn(),
    onHover: vi.fn(),
  };
}

function freshView(callbacks = noopCallbacks()): PcpView {
  document.body.innerHTML = "<div id='plot'></div>";
  const view = new PcpView(document.getElementById("plot")!, callbacks);
  view.render(scan, model, layout);
  return view;
}

describe("scene construction", () => {
  it("draws one polyline per run and one trend line per (run, observable)", () => {
    const view = freshView();
    const polylines = view.svg.querySelectorAll("polyline.polyline");
    const trends = view.svg.querySelectorAll("polyline.trend");
    expect(polylines.length).toBe(scan.runs.length);
    expect(trends.length).toBe(scan.runs.length * scan.observables.length);
  });

  it("draws one box per cluster, filled with the server palette", () => {
    const view = freshView();
    const boxes = [...view.svg.querySelectorAll("rect.cluster-box")];
    expect(boxes.length).toBe(layout.boxes.length);
    const byKey = new Map(
      layout.boxes.map((b) => [`${b.axis_id}:${b.cluster_id}`, b.color.hex]),
    );
    for (const box of boxes) {
      const key = `${box.getAttribute("data-axis")}:${box.getAttribute("data-cluster")}`;
      expect(box.getAttribute("fill")).toBe(byKey.get(key));
    }
  });

  it("attaches exact (t, value) tooltips to trend lines", () => {
    const view = freshView();
    const first = view.svg.querySelector("polyline.trend")!;
    const runId = first.getAttribute("data-run")!;
    const obs = first.getAttribute("data-obs")!;
    const run = scan.runs.find((r) => r.run_id === runId)!;
    const title = first.querySelector("title")!.textContent!;
    scan.time_grid.forEach((t, i) => {
      expect(title).toContain(`t=${t}`);
      expect(title).toContain(String(run.series[obs]![i]));
    });
  });
});

describe("linking invariant at the DOM level", () => {
  it("applyPartition marks a run's polyline and all its trend lines alike", () => {
    const view = freshView();
    view.applyPartition(evaluated.active);
    const activePolylines = view.runsWithClass("active", ".polyline");
    const activeTrendRuns = view.runsWithClass("active", ".trend");
    expect(activePolylines).toEqual([...evaluated.active].sort());
    expect(activeTrendRuns).toEqual(activePolylines);
    const inactivePolylines = view.runsWithClass("inactive", ".polyline");
    expect(inactivePolylines).toEqual([...evaluated.inactive].sort());
    expect(view.runsWithClass("inactive", ".trend")).toEqual(inactivePolylines);
  });

  it("re-applying a new partition leaves no element behind", () => {
    const view = freshView();
    view.applyPartition(evaluated.active);
    const all = scan.runs.map((r) => r.run_id);
    view.applyPartition(all);
    expect(view.runsWithClass("active", ".polyline").length).toBe(all.length);
    expect(view.runsWithClass("inactive", ".trend").length).toBe(0);
  });

  it("hover emphasizes every element of exactly one run", () => {
    const view = freshView();
    const runId = scan.runs[3]!.run_id;
    view.setHovered(runId);
    expect(view.runsWithClass("hovered", ".polyline")).toEqual([runId]);
    expect(view.runsWithClass("hovered", ".trend")).toEqual([runId]);
    view.setHovered(null);
    expect(view.runsWithClass("hovered", ".polyline")).toEqual([]);
  });
});

describe("interaction wiring", () => {
  it("cluster clicks report axis, id, and exclusivity", () => {
    const callbacks = noopCallbacks();
    const view = freshView(callbacks);
    const box = view.svg.querySelector("rect.cluster-box")!;
    box.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(callbacks.onClusterClick).toHaveBeenCalledWith(
      box.getAttribute("data-axis"),
      Number(box.getAttribute("data-cluster")),
      false,
    );
    box.dispatchEvent(new MouseEvent("click", { bubbles: true, shiftKey: true }));
    expect(callbacks.onClusterClick).toHaveBeenLastCalledWith(
      box.getAttribute("data-axis"),
      Number(box.getAttribute("data-cluster")),
      true,
    );
  });

  it("axis label drag from one axis to another reports the pair", () => {
    const callbacks = noopCallbacks();
    const view = freshView(callbacks);
    const labels = [...view.svg.querySelectorAll("text.axis-label")];
    const source = labels[0]!;
    const target = labels[2]!;
    source.dispatchEvent(new MouseEvent("mousedown", { bubbles: true }));
    target.dispatchEvent(new MouseEvent("mouseup", { bubbles: true }));
    expect(callbacks.onAxisDrop).toHaveBeenCalledWith(
      source.getAttribute("data-axis"),
      target.getAttribute("data-axis"),
    );
  });

  it("vertical drag on a scalar axis reports a data-unit interval", () => {
    const callbacks = noopCallbacks();
    const view = freshView(callbacks);
    const hit = view.svg.querySelector("rect.brush-hit[data-axis='nLRP6_lr']")!;
    // clientY values inside the plot area; exact data values depend on the
    // margin mapping, so assert ordering and bounds rather than magic numbers.
    hit.dispatchEvent(new MouseEvent("mousedown", { bubbles: true, clientY: 600 }));
    hit.dispatchEvent(new MouseEvent("mouseup", { bubbles: true, clientY: 200 }));
    expect(callbacks.onBrush).toHaveBeenCalledTimes(1);
    const [axis, interval] = (callbacks.onBrush as ReturnType<typeof vi.fn>).mock.calls[0]!;
    expect(axis).toBe("nLRP6_lr");
    const [lo, hi] = interval as [number, number];
    expect(lo).toBeLessThan(hi);
    expect(lo).toBeGreaterThanOrEqual(0);
    expect(hi).toBeLessThanOrEqual(1);
  });

  it("a zero-length click clears the brush", () => {
    const callbacks = noopCallbacks();
    const view = freshView(callbacks);
    const hit = view.svg.querySelector("rect.brush-hit[data-axis='nWnt']")!;
    hit.dispatchEvent(new MouseEvent("mousedown", { bubbles: true, clientY: 300 }));
    hit.dispatchEvent(new MouseEvent("mouseup", { bubbles: true, clientY: 300 }));
    expect(callbacks.onBrush).toHaveBeenCalledWith("nWnt", null);
  });

  it("showBrush reflects intervals on the overlay rect", () => {
    const view = freshView();
    view.showBrush("nWnt", [120, 300]);
    const rect = view.svg.querySelector("rect.brush-range[data-axis='nWnt']")!;
    expect(rect.getAttribute("visibility")).toBe("visible");
    expect(Number(rect.getAttribute("height"))).toBeGreaterThan(0);
    view.showBrush("nWnt", null);
    expect(rect.getAttribute("visibility")).toBe("hidden");
  });
});

/** Controller invariants against a scripted in-memory transport. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { AnalysisApp } from "../src/app.js";
import { PcpView } from "../src/view.js";
import type { EvaluateResult, ScanDocument, SelectionState } from "../src/types.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");
const scanDoc = JSON.parse(readFileSync(join(FIXTURES, "scan.json"), "utf-8")) as ScanDocument;
const clustersDoc = readFileSync(join(FIXTURES, "clusters.json"), "utf-8");
const layoutDoc = readFileSync(join(FIXTURES, "layout.json"), "utf-8");

interface FakeServer {
  evaluateCalls: SelectionState[];
  evaluateDelayMs: number[];
  fetch: typeof fetch;
}

/** Minimal contract double: evaluate applies the nLRP6_lr brush for real. */
function fakeServer(): FakeServer {
  const state: FakeServer = { evaluateCalls: [], evaluateDelayMs: [], fetch: undefined as never };
  const lrIndex = scanDoc.parameters.findIndex((p) => p.name === "nLRP6_lr");

  const respond = (body: string, status = 200): Response =>
    new Response(body, { status, headers: { "content-type": "application/json" } });

  state.fetch = (async (url: RequestInfo | URL, init?: RequestInit) => {
    const path = String(url);
    if (path.endsWith("/scans/generate")) {
      return respond(JSON.stringify({ scan_id: "scan-0001", runs: scanDoc.runs.length }));
    }
    if (path.endsWith("/scans/scan-0001")) {
      return respond(JSON.stringify(scanDoc));
    }
    if (path.endsWith("/cluster")) {
      return respond(clustersDoc);
    }
    if (path.endsWith("/layout")) {
      return respond(layoutDoc);
    }
    if (path.endsWith("/selection/evaluate")) {
      const { selection } = JSON.parse(String(init?.body)) as { selection: SelectionState };
      state.evaluateCalls.push(selection);
      const delay = state.evaluateDelayMs.shift() ?? 0;
      if (delay) await new Promise((resolve) => setTimeout(resolve, delay));
      const brush = selection.brushes["nLRP6_lr"];
      const active: string[] = [];
      const inactive: string[] = [];
      for (const run of scanDoc.runs) {
        const v = run.config[lrIndex]!;
        (brush === undefined || (v >= brush[0] && v <= brush[1]) ? active : inactive).push(
          run.run_id,
        );
      }
      const body: EvaluateResult = { active, inactive, footprint: null };
      return respond(JSON.stringify(body));
    }
    return respond(JSON.stringify({ code: "unknown", message: path, detail: null }), 404);
  }) as typeof fetch;
  return state;
}

async function bootApp(server: FakeServer, debounceMs = 10) {
  document.body.innerHTML = "<div id='plot'></div>";
  let app: AnalysisApp;
  const view = new PcpView(document.getElementById("plot")!, AnalysisApp.createCallbacks(() => app!));
  app = new AnalysisApp(new ApiClient("http://fake", server.fetch), view, { debounceMs });
  await app.init();
  return app;
}

describe("evaluation consistency", () => {
  it("latest-wins: a slow older response never overwrites a newer partition", async () => {
    const server = fakeServer();
    const app = await bootApp(server);

    // First evaluation is slow, second is fast; both fire back to back.
    server.evaluateDelayMs = [80, 0];
    app.setBrush("nLRP6_lr", [0.0, 0.0]);
    const second = (async () => {
      app.setBrush("nLRP6_lr", [1.0, 1.0]);
    })();
    await second;
    await app.evaluateNow();

    const lrIndex = scanDoc.parameters.findIndex((p) => p.name === "nLRP6_lr");
    const expected = scanDoc.runs
      .filter((r) => r.config[lrIndex] === 1.0)
      .map((r) => r.run_id)
      .sort();
    expect(app.view.runsWithClass("active", ".polyline")).toEqual(expected);
    expect(app.lastResult?.active.sort()).toEqual(expected);
  });

  it("debounces brush previews but always evaluates the final state", async () => {
    const server = fakeServer();
    const app = await bootApp(server, 25);
    const before = server.evaluateCalls.length;

    app.previewBrush("nLRP6_lr", [0.0, 0.4]);
    app.previewBrush("nLRP6_lr", [0.0, 0.6]);
    app.previewBrush("nLRP6_lr", [0.0, 1.0]);
    expect(server.evaluateCalls.length).toBe(before); // debounce pending
    app.setBrush("nLRP6_lr", [0.5, 1.0]); // brush end evaluates immediately
    await app.evaluateNow();
    await new Promise((resolve) => setTimeout(resolve, 60));

    const after = server.evaluateCalls.slice(before);
    expect(after.length).toBeGreaterThanOrEqual(1);
    expect(after.length).toBeLessThan(4);
    const last = server.evaluateCalls.at(-1)!;
    expect(last.brushes["nLRP6_lr"]).toEqual([0.5, 1.0]);
  });

  it("keeps the view and lastResult in sync across undo", async () => {
    const server = fakeServer();
    const app = await bootApp(server);
    app.setBrush("nLRP6_lr", [1.0, 1.0]);
    await app.evaluateNow();
    const brushed = app.view.runsWithClass("active", ".polyline");
    app.undo();
    await app.evaluateNow();
    expect(app.view.runsWithClass("active", ".polyline").length).toBe(scanDoc.runs.length);
    expect(brushed.length).toBeLessThan(scanDoc.runs.length);
  });
});

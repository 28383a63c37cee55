/** Browser bootstrap: connect to the server, build the scene, wire controls. */

import { ApiClient } from "./api.js";
import { AnalysisApp } from "./app.js";
import { PcpView } from "./view.js";

const SERVER = (window as unknown as { TEMPO_SERVER?: string }).TEMPO_SERVER ?? "http://127.0.0.1:8080";

function notify(message: string): void {
  const toast = document.createElement("div");
  toast.className = "toast";
  toast.textContent = message;
  document.body.appendChild(toast);
  setTimeout(() => toast.remove(), 4000);
}

async function boot(): Promise<void> {
  const container = document.getElementById("plot")!;
  const api = new ApiClient(SERVER);
  let app: AnalysisApp;
  const view = new PcpView(container, AnalysisApp.createCallbacks(() => app));
  app = new AnalysisApp(api, view, { notify });

  document.getElementById("undo")!.addEventListener("click", () => app.undo());
  document.addEventListener("keydown", (event) => {
    if ((event.ctrlKey || event.metaKey) && event.key === "z") {
      event.preventDefault();
      app.undo();
    }
  });
  document.getElementById("merge")!.addEventListener("click", () => {
    const [axis, picks] = Object.entries(app.selection.cluster_picks)[0] ?? [];
    if (!axis || !picks || picks.length < 2) {
      notify("Pick at least two clusters on one axis to merge.");
      return;
    }
    void app.refine({ op: "merge", observable: axis, cluster_ids: picks });
  });
  document.getElementById("split")!.addEventListener("click", () => {
    const [axis, picks] = Object.entries(app.selection.cluster_picks)[0] ?? [];
    if (!axis || !picks || picks.length !== 1) {
      notify("Pick exactly one cluster to split.");
      return;
    }
    const k2 = Number((document.getElementById("split-k") as HTMLInputElement).value);
    void app.refine({ op: "split", observable: axis, cluster_id: picks[0]!, k2 });
  });

  const status = document.getElementById("status")!;
  status.textContent = "generating demo scan + clustering (first load takes a few seconds)...";
  try {
    await app.init();
    status.textContent = `scan ${app.scanId}: ${app.scan?.runs.length} runs`;
  } catch (error) {
    status.textContent = `failed to reach server at ${SERVER}: ${String(error)}`;
  }
}

void boot();

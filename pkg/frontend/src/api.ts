/** Thin typed client for the tempopc server; all analysis math stays server-side. */

import type {
  ApiErrorBody,
  ClusterModel,
  EvaluateResult,
  LayoutModel,
  RefineOp,
  ScanDocument,
  SelectionState,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody,
  ) {
    super(`${body.code}: ${body.message}`);
  }
}

export interface ClusterRequest {
  k?: number;
  k_by_observable?: Record<string, number>;
  restarts?: number;
  seed?: number;
  max_iter?: number;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let parsed: ApiErrorBody;
      try {
        parsed = (await response.json()) as ApiErrorBody;
      } catch {
        parsed = { code: "http_error", message: response.statusText, detail: null };
      }
      throw new ApiError(response.status, parsed);
    }
    return (await response.json()) as T;
  }

  generateScan(seed = 0): Promise<{ scan_id: string; runs: number }> {
    return this.request("POST", "/scans/generate", { seed });
  }

  getScan(scanId: string): Promise<ScanDocument> {
    return this.request("GET", `/scans/${scanId}`);
  }

  cluster(scanId: string, config: ClusterRequest): Promise<ClusterModel> {
    return this.request("POST", `/scans/${scanId}/cluster`, config);
  }

  refine(scanId: string, op: RefineOp): Promise<ClusterModel> {
    return this.request("POST", `/scans/${scanId}/cluster/refine`, op);
  }

  layout(scanId: string, axisOrder?: string[], clusterOrders?: Record<string, number[]>): Promise<LayoutModel> {
    const body: Record<string, unknown> = {};
    if (axisOrder) body.axis_order = axisOrder;
    if (clusterOrders) body.cluster_orders = clusterOrders;
    return this.request("POST", `/scans/${scanId}/layout`, body);
  }

  evaluate(scanId: string, selection: SelectionState): Promise<EvaluateResult> {
    return this.request("POST", `/scans/${scanId}/selection/evaluate`, { selection });
  }
}

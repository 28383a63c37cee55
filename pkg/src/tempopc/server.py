"""HTTP/JSON service exposing the full analysis pipeline.

Endpoints (all errors are structured JSON {code, message, detail}):

    POST /scans?format=long-csv|wide-csv|json   upload a scan file
    POST /scans/generate                        run the surrogate simulator
    GET  /scans/{id}                            canonical scan JSON
    POST /scans/{id}/cluster                    (re)cluster, body = config
    POST /scans/{id}/cluster/refine             move / merge / split
    POST /scans/{id}/layout                     compute layout geometry
    POST /scans/{id}/selection/evaluate         active/inactive + footprint
    POST /scans/{id}/render                     SVG document

Clustering state is server-side per scan (expensive, shared); selection
state is client-owned and sent per request.  Scan ids are sequential, and
all responses go through canonical serialization, so identical request
sequences against a fresh store replay byte-identically.  Writes take a
per-scan lock and swap immutable objects, so concurrent readers never see a
half-updated model; unrelated scans cluster in parallel.
"""

import concurrent.futures
import os
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response

from . import clustering as cl
from . import layout as lay
from . import selection as sel
from .canonical import canonical_json_bytes, canonical_json_loads
from .data_model import ParameterScan
from .dtw import DtwConfig
from .ingest import FORMATS, ScanFormatError, emit_scan, parse_scan, scan_from_obj, scan_to_obj
from .render_svg import RenderConfig, render
from .simgen import GridSpec, WntConfig, demo_grid, generate_scan

DATA_DIR_ENV = "TEMPO_DATA_DIR"
DEFAULT_MAX_BODY_BYTES = 64 * 1024 * 1024
DEFAULT_CLUSTER_TIMEOUT_S = 120.0


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, detail=None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail

    def response(self) -> Response:
        body = {"code": self.code, "message": self.message, "detail": self.detail}
        return Response(
            content=canonical_json_bytes(body),
            status_code=self.status,
            media_type="application/json",
        )


@dataclass
class ScanRecord:
    scan: ParameterScan
    cluster_model: Optional[cl.ClusterModel] = None
    cluster_cfg: cl.ClusterConfig = field(default_factory=cl.ClusterConfig)
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """In-memory scan registry with optional write-through JSON persistence."""

    def __init__(self, data_dir: Optional[str] = None):
        self._records: dict[str, ScanRecord] = {}
        self._lock = threading.Lock()
        self._counter = 0
        self.data_dir = Path(data_dir) if data_dir else None
        if self.data_dir:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            self._load_persisted()

    def _load_persisted(self):
        for path in sorted(self.data_dir.glob("*.scan.json")):
            scan = scan_from_obj(canonical_json_loads(path.read_bytes()))
            record = ScanRecord(scan=scan)
            store_id = path.name[: -len(".scan.json")]
            model_path = self.data_dir / f"{store_id}.clusters.json"
            if model_path.exists():
                record.cluster_model = cl.model_from_obj(canonical_json_loads(model_path.read_bytes()))
            self._records[store_id] = record
            number = store_id.rsplit("-", 1)[-1]
            if number.isdigit():
                self._counter = max(self._counter, int(number))

    def add(self, scan: ParameterScan) -> str:
        with self._lock:
            self._counter += 1
            store_id = f"scan-{self._counter:04d}"
            self._records[store_id] = ScanRecord(scan=scan)
        self._persist_scan(store_id)
        return store_id

    def get(self, store_id: str) -> ScanRecord:
        with self._lock:
            record = self._records.get(store_id)
        if record is None:
            raise ApiError(404, "unknown_scan", f"no scan with id {store_id!r}")
        return record

    def _persist_scan(self, store_id: str):
        if not self.data_dir:
            return
        record = self._records[store_id]
        path = self.data_dir / f"{store_id}.scan.json"
        path.write_bytes(canonical_json_bytes(scan_to_obj(record.scan)))

    def persist_clusters(self, store_id: str):
        if not self.data_dir:
            return
        record = self._records[store_id]
        if record.cluster_model is not None:
            path = self.data_dir / f"{store_id}.clusters.json"
            path.write_bytes(canonical_json_bytes(cl.model_to_obj(record.cluster_model)))


def _json_body(raw: bytes) -> dict:
    if not raw:
        return {}
    try:
        obj = canonical_json_loads(raw)
    except ValueError as exc:
        raise ApiError(400, "invalid_json", f"request body is not valid JSON: {exc}")
    if not isinstance(obj, dict):
        raise ApiError(400, "invalid_json", "request body must be a JSON object")
    return obj


def cluster_config_from_obj(obj: dict) -> cl.ClusterConfig:
    try:
        dtw_obj = obj.get("dtw", {})
        window = dtw_obj.get("window")
        return cl.ClusterConfig(
            k=int(obj.get("k", 3)),
            k_by_observable={str(k): int(v) for k, v in obj.get("k_by_observable", {}).items()},
            max_iter=int(obj.get("max_iter", 50)),
            restarts=int(obj.get("restarts", 5)),
            seed=int(obj.get("seed", 0)),
            dtw=DtwConfig(window=None if window is None else int(window)),
            dba_iterations=int(obj.get("dba_iterations", 10)),
            centroid_method=str(obj.get("centroid_method", "dba")),
            normalize=bool(obj.get("normalize", False)),
        )
    except (TypeError, ValueError) as exc:
        raise ApiError(400, "invalid_cluster_config", str(exc))


def render_config_from_obj(obj: dict) -> RenderConfig:
    try:
        defaults = RenderConfig()
        return RenderConfig(
            **{
                key: type(getattr(defaults, key))(value)
                for key, value in obj.items()
                if hasattr(defaults, key)
            }
        )
    except (TypeError, ValueError) as exc:
        raise ApiError(400, "invalid_render_config", str(exc))


def _canonical_response(obj, status: int = 200) -> Response:
    return Response(
        content=canonical_json_bytes(obj), status_code=status, media_type="application/json"
    )


def create_app(
    data_dir: Optional[str] = None,
    max_body_bytes: int = DEFAULT_MAX_BODY_BYTES,
    cluster_timeout_s: float = DEFAULT_CLUSTER_TIMEOUT_S,
) -> FastAPI:
    if data_dir is None:
        data_dir = os.environ.get(DATA_DIR_ENV) or None
    store = SessionStore(data_dir)
    app = FastAPI(title="tempopc", docs_url=None, redoc_url=None)
    app.state.store = store
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(ApiError)
    async def _api_error(_request, exc: ApiError):
        return exc.response()

    @app.middleware("http")
    async def _cap_body(request: Request, call_next):
        length = request.headers.get("content-length")
        if length and length.isdigit() and int(length) > max_body_bytes:
            return ApiError(
                413, "payload_too_large", f"request body exceeds {max_body_bytes} bytes"
            ).response()
        return await call_next(request)

    def _require_model(record: ScanRecord) -> cl.ClusterModel:
        model = record.cluster_model
        if model is None:
            raise ApiError(409, "not_clustered", "scan has no cluster model yet; POST .../cluster first")
        return model

    @app.post("/scans")
    async def upload_scan(request: Request, format: str = "json"):
        if format not in FORMATS:
            raise ApiError(400, "unknown_format", f"format must be one of {FORMATS}")
        body = await request.body()
        try:
            scan = parse_scan(body, format)
        except ScanFormatError as exc:
            raise ApiError(400, "parse_error", str(exc))
        return _canonical_response({"scan_id": store.add(scan)}, status=201)

    @app.post("/scans/generate")
    async def generate(request: Request):
        obj = _json_body(await request.body())
        seed = int(obj.get("seed", 0))
        try:
            if "grid" in obj:
                grid = GridSpec.from_obj(obj["grid"])
            else:
                grid = demo_grid()
            overrides = {
                k: v for k, v in obj.get("model", {}).items() if hasattr(WntConfig(), k)
            }
            base = replace(WntConfig(), **overrides) if overrides else WntConfig()
            scan = generate_scan(grid, seed=seed, base=base)
        except (TypeError, ValueError) as exc:
            raise ApiError(400, "invalid_grid", str(exc))
        return _canonical_response({"scan_id": store.add(scan), "runs": len(scan.runs)}, status=201)

    @app.get("/scans/{scan_id}")
    async def get_scan(scan_id: str):
        record = store.get(scan_id)
        return Response(content=emit_scan(record.scan, "json"), media_type="application/json")

    @app.post("/scans/{scan_id}/cluster")
    async def cluster(scan_id: str, request: Request):
        record = store.get(scan_id)
        cfg = cluster_config_from_obj(_json_body(await request.body()))
        n_runs = len(record.scan.runs)
        ks = [cfg.k_for(obs) for obs in record.scan.observable_schema.names]
        if any(k > n_runs for k in ks):
            raise ApiError(409, "k_too_large", f"k exceeds the number of runs ({n_runs})")

        def work():
            with record.lock:
                model = cl.cluster_scan(record.scan, cfg)
                record.cluster_model = model
                record.cluster_cfg = cfg
                store.persist_clusters(scan_id)
                return model

        pool = concurrent.futures.ThreadPoolExecutor(max_workers=1)
        future = pool.submit(work)
        pool.shutdown(wait=False)
        try:
            model = future.result(timeout=cluster_timeout_s)
        except concurrent.futures.TimeoutError:
            raise ApiError(
                504, "cluster_timeout", f"clustering exceeded {cluster_timeout_s:g}s"
            )
        return _canonical_response(cl.model_to_obj(model))

    @app.post("/scans/{scan_id}/cluster/refine")
    async def refine(scan_id: str, request: Request):
        record = store.get(scan_id)
        obj = _json_body(await request.body())
        op = obj.get("op")
        with record.lock:
            model = _require_model(record)
            cfg = record.cluster_cfg
            try:
                if op == "move":
                    model = cl.move_runs(
                        record.scan, model, str(obj["observable"]),
                        [str(r) for r in obj["run_ids"]], int(obj["target_cluster"]), cfg,
                    )
                elif op == "merge":
                    model = cl.merge_clusters(
                        record.scan, model, str(obj["observable"]),
                        [int(c) for c in obj["cluster_ids"]], cfg,
                    )
                elif op == "split":
                    model = cl.split_cluster(
                        record.scan, model, str(obj["observable"]),
                        int(obj["cluster_id"]), int(obj["k2"]), cfg,
                    )
                else:
                    raise ApiError(400, "unknown_op", "op must be move, merge, or split")
            except KeyError as exc:
                raise ApiError(400, "invalid_refine", f"missing or unknown reference: {exc}")
            except ValueError as exc:
                raise ApiError(409, "invalid_refine", str(exc))
            record.cluster_model = model
            store.persist_clusters(scan_id)
        return _canonical_response(cl.model_to_obj(model))

    @app.post("/scans/{scan_id}/layout")
    async def layout_endpoint(scan_id: str, request: Request):
        record = store.get(scan_id)
        obj = _json_body(await request.body())
        model = _require_model(record)
        axis_order = obj.get("axis_order")
        overrides = {
            str(k): [int(c) for c in v] for k, v in obj.get("cluster_orders", {}).items()
        }
        try:
            layout = lay.compute_layout(record.scan, model, axis_order, overrides)
        except (KeyError, ValueError) as exc:
            raise ApiError(400, "invalid_layout", str(exc))
        return _canonical_response(lay.layout_to_obj(layout))

    def _evaluate(record: ScanRecord, obj: dict):
        model = _require_model(record)
        try:
            state = sel.selection_from_obj(obj)
        except (KeyError, TypeError, ValueError, sel.SelectionError) as exc:
            raise ApiError(400, "invalid_selection", str(exc))
        try:
            active, inactive = sel.evaluate(state, record.scan, model)
        except sel.StaleClusterError as exc:
            raise ApiError(
                409,
                "stale_cluster_pick",
                str(exc),
                detail=[{"axis": axis, "cluster": cid} for axis, cid in exc.stale],
            )
        except KeyError as exc:
            raise ApiError(400, "invalid_selection", f"unknown axis: {exc}")
        return state, active, inactive

    @app.post("/scans/{scan_id}/selection/evaluate")
    async def evaluate_selection(scan_id: str, request: Request):
        record = store.get(scan_id)
        obj = _json_body(await request.body())
        _state, active, inactive = _evaluate(record, obj.get("selection", obj))
        footprint = sel.parameter_footprint(active, record.scan) if active else None
        return _canonical_response(
            {"active": list(active), "inactive": list(inactive), "footprint": footprint}
        )

    @app.post("/scans/{scan_id}/render")
    async def render_endpoint(scan_id: str, request: Request):
        record = store.get(scan_id)
        obj = _json_body(await request.body())
        model = _require_model(record)
        _state, active, _inactive = _evaluate(record, obj.get("selection", {}))
        cfg = render_config_from_obj(obj.get("render", {}))
        axis_order = obj.get("axis_order")
        overrides = {
            str(k): [int(c) for c in v] for k, v in obj.get("cluster_orders", {}).items()
        }
        try:
            layout = lay.compute_layout(record.scan, model, axis_order, overrides)
            svg = render(record.scan, model, layout, active, cfg)
        except (KeyError, ValueError) as exc:
            raise ApiError(400, "invalid_render", str(exc))
        return Response(content=svg, media_type="image/svg+xml")

    return app

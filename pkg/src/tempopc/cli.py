"""Command-line entry points: simulate, convert, cluster, render, serve."""

import argparse
import sys
from pathlib import Path

from . import clustering as cl
from . import layout as lay
from . import selection as sel
from .canonical import canonical_json_bytes, canonical_json_loads
from .dtw import DtwConfig
from .ingest import FORMATS, ScanFormatError, emit_scan, parse_scan
from .render_svg import RenderConfig, render
from .simgen import GridSpec, demo_grid, generate_scan


def _sniff_format(data: bytes, path: Path) -> str:
    if path.suffix == ".json" or data.lstrip()[:1] == b"{":
        return "json"
    header = data.split(b"\n", 1)[0].decode("utf-8", "replace")
    columns = [c.strip() for c in header.split(",")]
    if columns[-3:] == ["observable", "t", "value"]:
        return "long-csv"
    return "wide-csv"


def _load_scan(path: str, fmt: str):
    data = Path(path).read_bytes()
    if fmt == "auto":
        fmt = _sniff_format(data, Path(path))
    return parse_scan(data, fmt)


def _cmd_simulate(args) -> int:
    if args.grid:
        obj = canonical_json_loads(Path(args.grid).read_bytes())
        grid = GridSpec.from_obj(obj)
    else:
        grid = demo_grid()
    scan = generate_scan(grid, seed=args.seed, scan_id=args.scan_id)
    Path(args.out).write_bytes(emit_scan(scan, args.format))
    print(f"wrote {len(scan.runs)} runs to {args.out}")
    return 0


def _cmd_convert(args) -> int:
    scan = _load_scan(args.input, args.input_format)
    Path(args.output).write_bytes(emit_scan(scan, args.format))
    print(f"wrote {args.output} ({args.format})")
    return 0


def _cmd_cluster(args) -> int:
    scan = _load_scan(args.scan, "auto")
    k_by = {}
    for item in args.k_for or ():
        name, _, value = item.partition("=")
        if not value:
            raise SystemExit(f"--k-for expects <observable>=<k>, got {item!r}")
        k_by[name] = int(value)
    cfg = cl.ClusterConfig(
        k=args.k,
        k_by_observable=k_by,
        max_iter=args.max_iter,
        restarts=args.restarts,
        seed=args.seed,
        dtw=DtwConfig(window=args.window),
        centroid_method="medoid" if args.medoid else "dba",
        normalize=args.normalize,
    )
    model = cl.cluster_scan(scan, cfg)
    Path(args.out).write_bytes(canonical_json_bytes(cl.model_to_obj(model)))
    for obs, clustering in model.per_observable.items():
        sizes = [clustering.sizes[c] for c in clustering.order]
        print(f"{obs}: {len(sizes)} clusters, sizes {sizes}, inertia {clustering.inertia:.3f}")
    return 0


def _cmd_render(args) -> int:
    scan = _load_scan(args.scan, "auto")
    model = cl.model_from_obj(canonical_json_loads(Path(args.clusters).read_bytes()))
    state = sel.SelectionState()
    if args.selection:
        state = sel.selection_from_obj(canonical_json_loads(Path(args.selection).read_bytes()))
    axis_order = args.axis_order.split(",") if args.axis_order else None
    layout = lay.compute_layout(scan, model, axis_order)
    active, _ = sel.evaluate(state, scan, model)
    cfg = RenderConfig(width=args.width, height=args.height)
    Path(args.out).write_bytes(render(scan, model, layout, active, cfg))
    print(f"wrote {args.out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(
        data_dir=args.data_dir,
        max_body_bytes=args.max_body_bytes,
        cluster_timeout_s=args.cluster_timeout,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tempopc",
        description="Temporal parallel coordinates for simulation parameter scans",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a surrogate Wnt parameter scan")
    p.add_argument("--grid", help="grid spec JSON (default: built-in 141-run demo grid)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scan-id", default="wnt-surrogate")
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("convert", help="convert a scan between file formats")
    p.add_argument("--input", required=True)
    p.add_argument("--input-format", choices=("auto",) + FORMATS, default="auto")
    p.add_argument("--format", choices=FORMATS, required=True, help="output format")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("cluster", help="cluster each observable's time series")
    p.add_argument("--scan", required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--k-for", action="append", metavar="OBS=K")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--window", type=int, default=None, help="Sakoe-Chiba half-width")
    p.add_argument("--medoid", action="store_true", help="medoid centroids instead of DBA")
    p.add_argument(
        "--normalize", action="store_true",
        help="min-max scale each observable before DTW (default: raw scale)",
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("render", help="render a scan + cluster model to SVG")
    p.add_argument("--scan", required=True)
    p.add_argument("--clusters", required=True)
    p.add_argument("--selection", help="selection state JSON (default: everything active)")
    p.add_argument("--axis-order", help="comma-separated axis names")
    p.add_argument("--width", type=int, default=1600)
    p.add_argument("--height", type=int, default=900)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("serve", help="run the HTTP analysis server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--data-dir", default=None, help="write-through persistence directory")
    p.add_argument("--max-body-bytes", type=int, default=64 * 1024 * 1024)
    p.add_argument("--cluster-timeout", type=float, default=120.0)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScanFormatError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

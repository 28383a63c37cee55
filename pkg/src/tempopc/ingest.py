"""Parse and emit parameter scans in three interchange formats.

``long-csv``   one data row per (run, observable, time point):
               ``run_id, <param_1..n>, observable, t, value``.
``wide-csv``   one row per run: ``run_id, <params...>`` followed by one
               ``<observable>_<time>`` column per (observable, grid time).
``json``       canonical JSON mirroring the data model; the only lossless
               archival format (CSV drops units, kinds, and the scan id).

Emission is deterministic: equal scans produce byte-identical files, and
``parse_scan(emit_scan(scan, fmt), fmt)`` returns a structurally equal scan
(for the CSV variants, up to the metadata they cannot carry).  Long-CSV row
order carries no meaning, so that parser sorts runs and observables by name;
round-tripping through long CSV therefore assumes name-sorted scans, which
every generator in this package produces.
"""

import csv
import io
import math

from .canonical import canonical_json_bytes, canonical_json_loads
from .data_model import (
    ObservableSchema,
    ObservableSpec,
    ParameterSchema,
    ParameterSpec,
    ParameterScan,
    SimulationRun,
    validate_scan,
)

FORMATS = ("long-csv", "wide-csv", "json")

LONG_FIXED_COLUMNS = ("observable", "t", "value")

DEFAULT_SCAN_ID = "scan"


class ScanFormatError(ValueError):
    """Raised when a scan file cannot be parsed or fails validation."""


def _format_number(x: float) -> str:
    """Shortest stable decimal form; integers lose the trailing ``.0``."""
    x = float(x)
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _parse_cell(text: str, row: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ScanFormatError(
            f"row {row}, column {column!r}: non-numeric cell {text!r}"
        ) from None
    if not math.isfinite(value):
        raise ScanFormatError(f"row {row}, column {column!r}: non-finite cell {text!r}")
    return value


def parse_scan(data: bytes, fmt: str, scan_id: str = DEFAULT_SCAN_ID) -> ParameterScan:
    """Parse ``data`` in the given format into a validated ParameterScan.

    Raises ScanFormatError with row/column context on malformed input, and
    when the parsed scan fails validation.
    """
    if fmt not in FORMATS:
        raise ScanFormatError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ScanFormatError(f"input is not valid UTF-8: {exc}") from None

    if fmt == "json":
        scan = _parse_json(data)
    elif fmt == "long-csv":
        scan = _parse_long_csv(text, scan_id)
    else:
        scan = _parse_wide_csv(text, scan_id)

    report = validate_scan(scan)
    if report:
        lines = "; ".join(str(v) for v in report[:5])
        raise ScanFormatError(f"parsed scan fails validation ({len(report)} problems): {lines}")
    return scan


def emit_scan(scan: ParameterScan, fmt: str) -> bytes:
    """Serialize a valid scan deterministically (stable field and row order)."""
    if fmt not in FORMATS:
        raise ScanFormatError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    if fmt == "json":
        return canonical_json_bytes(scan_to_obj(scan))
    if fmt == "long-csv":
        return _emit_long_csv(scan)
    return _emit_wide_csv(scan)


# --- canonical JSON -------------------------------------------------------


def scan_to_obj(scan: ParameterScan) -> dict:
    return {
        "scan_id": scan.scan_id,
        "parameters": [
            {"name": p.name, "unit": p.unit, "kind": p.kind}
            for p in scan.parameter_schema.parameters
        ],
        "observables": [
            {"name": o.name, "unit": o.unit} for o in scan.observable_schema.observables
        ],
        "time_grid": list(scan.observable_schema.time_grid),
        "runs": [
            {
                "run_id": run.run_id,
                "config": [float(v) for v in run.config],
                "series": {k: [float(v) for v in vs] for k, vs in run.series.items()},
            }
            for run in scan.runs
        ],
    }


def scan_from_obj(obj: dict) -> ParameterScan:
    try:
        parameters = ParameterSchema(
            ParameterSpec(p["name"], p.get("unit", ""), p.get("kind", "continuous"))
            for p in obj["parameters"]
        )
        observables = ObservableSchema(
            (ObservableSpec(o["name"], o.get("unit", "")) for o in obj["observables"]),
            obj["time_grid"],
        )
        runs = [
            SimulationRun(r["run_id"], r["config"], r["series"]) for r in obj["runs"]
        ]
        return ParameterScan(obj.get("scan_id", DEFAULT_SCAN_ID), parameters, observables, runs)
    except (KeyError, TypeError, ValueError) as exc:
        raise ScanFormatError(f"malformed scan JSON: {exc!r}") from None


def _parse_json(data: bytes) -> ParameterScan:
    try:
        obj = canonical_json_loads(data)
    except ValueError as exc:
        raise ScanFormatError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ScanFormatError("scan JSON must be an object")
    return scan_from_obj(obj)


# --- long CSV -------------------------------------------------------------


def _emit_long_csv(scan: ParameterScan) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    pnames = list(scan.parameter_schema.names)
    writer.writerow(["run_id", *pnames, "observable", "t", "value"])
    grid = scan.observable_schema.time_grid
    for run in scan.runs:
        config = [_format_number(v) for v in run.config]
        for obs in scan.observable_schema.names:
            values = run.series[obs]
            for t, v in zip(grid, values):
                writer.writerow([run.run_id, *config, obs, _format_number(t), _format_number(v)])
    return buf.getvalue().encode("utf-8")


def _parse_long_csv(text: str, scan_id: str) -> ParameterScan:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r]
    if not rows:
        raise ScanFormatError("empty file: missing header")
    header = rows[0]
    if (
        len(header) < 4
        or header[0] != "run_id"
        or header[-3:] != list(LONG_FIXED_COLUMNS)
    ):
        raise ScanFormatError(
            "malformed header: expected 'run_id, <parameters...>, observable, t, value', "
            f"got {header!r}"
        )
    pnames = header[1:-3]
    if len(set(pnames)) != len(pnames):
        raise ScanFormatError(f"malformed header: duplicate parameter columns in {pnames!r}")

    # run_id -> (config, {observable: {t: value}}), insertion order = file order
    configs: dict[str, list[float]] = {}
    cells: dict[str, dict[str, dict[float, float]]] = {}
    obs_order: list[str] = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ScanFormatError(f"row {i}: expected {len(header)} cells, got {len(row)}")
        run_id = row[0]
        config = [_parse_cell(row[1 + j], i, pnames[j]) for j in range(len(pnames))]
        obs = row[-3]
        t = _parse_cell(row[-2], i, "t")
        value = _parse_cell(row[-1], i, "value")
        if run_id not in configs:
            configs[run_id] = config
            cells[run_id] = {}
        elif configs[run_id] != config:
            raise ScanFormatError(
                f"row {i}: run {run_id!r} repeats with different parameter values"
            )
        if obs not in obs_order:
            obs_order.append(obs)
        series = cells[run_id].setdefault(obs, {})
        if t in series:
            raise ScanFormatError(f"row {i}: duplicate cell (run {run_id!r}, {obs!r}, t={t:g})")
        series[t] = value

    if not configs:
        raise ScanFormatError("long-csv file has a header but no data rows")
    obs_order.sort()

    grids = {
        run_id: {obs: tuple(sorted(ts)) for obs, ts in per_run.items()}
        for run_id, per_run in cells.items()
    }
    all_grids = {g for per_run in grids.values() for g in per_run.values()}
    if len(all_grids) != 1:
        raise ScanFormatError(
            f"inconsistent time grid: found {len(all_grids)} distinct grids across "
            "(run, observable) pairs"
        )
    grid = all_grids.pop()
    for run_id, per_run in cells.items():
        missing = set(obs_order) - set(per_run)
        if missing:
            raise ScanFormatError(f"run {run_id!r} is missing observables {sorted(missing)}")

    schema_p = ParameterSchema(ParameterSpec(n) for n in pnames)
    schema_o = ObservableSchema((ObservableSpec(n) for n in obs_order), grid)
    # Row order carries no meaning in long CSV, so runs come out sorted by
    # run_id; any permutation of the data rows parses to an equal scan.
    runs = [
        SimulationRun(
            run_id,
            configs[run_id],
            {obs: [cells[run_id][obs][t] for t in grid] for obs in obs_order},
        )
        for run_id in sorted(configs)
    ]
    return ParameterScan(scan_id, schema_p, schema_o, runs)


# --- wide CSV -------------------------------------------------------------


def _series_column(observable: str, t: float) -> str:
    return f"{observable}_{_format_number(t)}"


def _emit_wide_csv(scan: ParameterScan) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    pnames = list(scan.parameter_schema.names)
    grid = scan.observable_schema.time_grid
    obs_names = scan.observable_schema.names
    series_cols = [(obs, t) for obs in obs_names for t in grid]
    writer.writerow(["run_id", *pnames, *(_series_column(o, t) for o, t in series_cols)])
    for run in scan.runs:
        row = [run.run_id, *(_format_number(v) for v in run.config)]
        for obs, t in series_cols:
            idx = grid.index(t)
            row.append(_format_number(run.series[obs][idx]))
        writer.writerow(row)
    return buf.getvalue().encode("utf-8")


def _parse_wide_csv(text: str, scan_id: str) -> ParameterScan:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r]
    if not rows:
        raise ScanFormatError("empty file: missing header")
    header = rows[0]
    if not header or header[0] != "run_id":
        raise ScanFormatError(f"malformed header: first column must be 'run_id', got {header!r}")

    # Split header into parameter columns and <observable>_<time> columns:
    # a column is a series column iff its suffix after the last '_' parses as
    # a number.  Parameters therefore may not end in '_<number>'.
    pnames: list[str] = []
    series_cols: list[tuple[str, float]] = []
    for col in header[1:]:
        obs, sep, suffix = col.rpartition("_")
        t = None
        if sep:
            try:
                t = float(suffix)
            except ValueError:
                t = None
        if t is None:
            if series_cols:
                raise ScanFormatError(
                    f"malformed header: parameter column {col!r} appears after series columns"
                )
            pnames.append(col)
        else:
            if not math.isfinite(t):
                raise ScanFormatError(f"malformed header: non-finite time in column {col!r}")
            series_cols.append((obs, t))
    if not series_cols:
        raise ScanFormatError("malformed header: no '<observable>_<time>' series columns found")
    if len(set(pnames)) != len(pnames):
        raise ScanFormatError(f"malformed header: duplicate parameter columns in {pnames!r}")
    if len(set(series_cols)) != len(series_cols):
        raise ScanFormatError("malformed header: duplicate series columns")

    obs_order: list[str] = []
    times_per_obs: dict[str, list[float]] = {}
    for obs, t in series_cols:
        if obs not in obs_order:
            obs_order.append(obs)
        times_per_obs.setdefault(obs, []).append(t)
    grids = {tuple(sorted(ts)) for ts in times_per_obs.values()}
    if len(grids) != 1:
        raise ScanFormatError(
            "inconsistent time grid: observables declare different time-point sets"
        )
    grid = grids.pop()

    runs = []
    seen: set[str] = set()
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ScanFormatError(f"row {i}: expected {len(header)} cells, got {len(row)}")
        run_id = row[0]
        if run_id in seen:
            raise ScanFormatError(f"row {i}: duplicate run_id {run_id!r}")
        seen.add(run_id)
        config = [_parse_cell(row[1 + j], i, pnames[j]) for j in range(len(pnames))]
        by_obs: dict[str, dict[float, float]] = {obs: {} for obs in obs_order}
        for (obs, t), cell in zip(series_cols, row[1 + len(pnames) :]):
            by_obs[obs][t] = _parse_cell(cell, i, _series_column(obs, t))
        series = {obs: [by_obs[obs][t] for t in grid] for obs in obs_order}
        runs.append(SimulationRun(run_id, config, series))

    # Header-only wide CSV is a valid empty scan: the header alone fixes the
    # schemas, which long CSV cannot do.
    schema_p = ParameterSchema(ParameterSpec(n) for n in pnames)
    schema_o = ObservableSchema((ObservableSpec(n) for n in obs_order), grid)
    return ParameterScan(scan_id, schema_p, schema_o, runs)

"""Containers for parameter scans of simulations with time-dependent outputs.

A scan couples an ordered list of model parameters (the independent inputs)
with an ordered list of observables sampled on one shared time grid, plus the
simulation runs themselves.  Instances are treated as immutable after
construction; "modification" means building a new scan.

Construction is permissive: invariants are checked by :func:`validate_scan`,
which reports violations as data instead of raising, so that ingestion
pipelines can surface every problem in a file at once.
"""

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

PARAMETER_KINDS = ("continuous", "discrete")


def _as_readonly_f64(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    arr = arr.reshape(-1).copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ParameterSpec:
    name: str
    unit: str = ""
    kind: str = "continuous"


@dataclass(frozen=True)
class ObservableSpec:
    name: str
    unit: str = ""


@dataclass(frozen=True)
class ParameterSchema:
    """Ordered model-parameter declarations; order defines default axis order."""

    parameters: tuple[ParameterSpec, ...]

    def __init__(self, parameters: Iterable[ParameterSpec]):
        object.__setattr__(self, "parameters", tuple(parameters))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.parameters)

    def index_of(self, name: str) -> int:
        for i, p in enumerate(self.parameters):
            if p.name == name:
                return i
        raise KeyError(f"unknown parameter {name!r}")


@dataclass(frozen=True)
class ObservableSchema:
    """Ordered observable declarations plus the shared time grid (minutes)."""

    observables: tuple[ObservableSpec, ...]
    time_grid: tuple[float, ...]

    def __init__(self, observables: Iterable[ObservableSpec], time_grid: Sequence[float]):
        object.__setattr__(self, "observables", tuple(observables))
        object.__setattr__(self, "time_grid", tuple(float(t) for t in time_grid))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(o.name for o in self.observables)


@dataclass(eq=False)
class SimulationRun:
    """One configuration vector together with its simulated time series."""

    run_id: str
    config: np.ndarray
    series: dict[str, np.ndarray]

    def __init__(self, run_id: str, config, series: Mapping[str, Sequence[float]]):
        self.run_id = str(run_id)
        self.config = _as_readonly_f64(config)
        self.series = {str(k): _as_readonly_f64(v) for k, v in series.items()}

    def value_of(self, schema: ParameterSchema, parameter: str) -> float:
        return float(self.config[schema.index_of(parameter)])


@dataclass(eq=False)
class ParameterScan:
    """A full simulation ensemble: schemas plus one run per configuration."""

    scan_id: str
    parameter_schema: ParameterSchema
    observable_schema: ObservableSchema
    runs: tuple[SimulationRun, ...]

    def __init__(
        self,
        scan_id: str,
        parameter_schema: ParameterSchema,
        observable_schema: ObservableSchema,
        runs: Iterable[SimulationRun],
    ):
        self.scan_id = str(scan_id)
        self.parameter_schema = parameter_schema
        self.observable_schema = observable_schema
        self.runs = tuple(runs)

    @property
    def run_ids(self) -> tuple[str, ...]:
        return tuple(r.run_id for r in self.runs)

    def run_by_id(self, run_id: str) -> SimulationRun:
        for r in self.runs:
            if r.run_id == run_id:
                return r
        raise KeyError(f"unknown run {run_id!r}")


@dataclass(frozen=True)
class Violation:
    """One broken invariant; ``run_id`` is empty for scan-level problems."""

    run_id: str
    field: str
    rule: str

    def __str__(self) -> str:
        where = f"run {self.run_id!r}: " if self.run_id else ""
        return f"{where}{self.field}: {self.rule}"


def validate_scan(scan: ParameterScan) -> list[Violation]:
    """Check every scan invariant; an empty report means the scan is sound.

    Violations are data, not failures: a scan that parses structurally can
    still be inspected even when its content breaks the rules below.
    """
    report: list[Violation] = []
    add = report.append

    pnames = scan.parameter_schema.names
    if len(set(pnames)) != len(pnames):
        add(Violation("", "parameters", "parameter names must be unique"))
    for p in scan.parameter_schema.parameters:
        if not p.name:
            add(Violation("", "parameters", "parameter name must be non-empty"))
        if p.kind not in PARAMETER_KINDS:
            add(Violation("", "parameters", f"unknown parameter kind {p.kind!r}"))

    onames = scan.observable_schema.names
    if len(set(onames)) != len(onames):
        add(Violation("", "observables", "observable names must be unique"))
    for name in onames:
        if not name:
            add(Violation("", "observables", "observable name must be non-empty"))
    overlap = set(onames) & set(pnames)
    if overlap:
        add(
            Violation(
                "",
                "observables",
                f"observable names must be disjoint from parameter names: {sorted(overlap)}",
            )
        )

    grid = np.asarray(scan.observable_schema.time_grid, dtype=np.float64)
    if grid.size < 2:
        add(Violation("", "time_grid", "time_grid must have at least 2 points"))
    if grid.size and not np.all(np.isfinite(grid)):
        add(Violation("", "time_grid", "time_grid values must be finite"))
    elif grid.size >= 2 and not np.all(np.diff(grid) > 0):
        add(Violation("", "time_grid", "time_grid must be strictly increasing"))

    seen_ids: set[str] = set()
    for run in scan.runs:
        if run.run_id in seen_ids:
            add(Violation(run.run_id, "run_id", "duplicate run_id"))
        seen_ids.add(run.run_id)

        if run.config.shape != (len(pnames),):
            add(
                Violation(
                    run.run_id,
                    "config",
                    f"config length {run.config.size} != {len(pnames)} parameters",
                )
            )
        elif not np.all(np.isfinite(run.config)):
            add(Violation(run.run_id, "config", "config values must be finite"))

        if set(run.series) != set(onames):
            missing = sorted(set(onames) - set(run.series))
            extra = sorted(set(run.series) - set(onames))
            add(
                Violation(
                    run.run_id,
                    "series",
                    f"series keys mismatch schema (missing {missing}, extra {extra})",
                )
            )
        for name in sorted(set(run.series) & set(onames)):
            values = run.series[name]
            if values.shape != (grid.size,):
                add(
                    Violation(
                        run.run_id,
                        f"series[{name}]",
                        f"length {values.size} != {grid.size} time points",
                    )
                )
            elif not np.all(np.isfinite(values)):
                add(Violation(run.run_id, f"series[{name}]", "values must be finite"))

    return report


def min_max(scan: ParameterScan, observable_name: str) -> tuple[float, float]:
    """Global (min, max) of one observable over all runs and time points."""
    if observable_name not in scan.observable_schema.names:
        raise KeyError(f"unknown observable {observable_name!r}")
    lo = np.inf
    hi = -np.inf
    for run in scan.runs:
        values = run.series[observable_name]
        if values.size:
            lo = min(lo, float(values.min()))
            hi = max(hi, float(values.max()))
    if not scan.runs:
        raise ValueError(f"scan has no runs; min/max of {observable_name!r} is undefined")
    return lo, hi


def parameter_min_max(scan: ParameterScan, parameter_name: str) -> tuple[float, float]:
    """Global (min, max) of one parameter over all runs."""
    idx = scan.parameter_schema.index_of(parameter_name)
    if not scan.runs:
        raise ValueError(f"scan has no runs; min/max of {parameter_name!r} is undefined")
    values = np.array([run.config[idx] for run in scan.runs])
    return float(values.min()), float(values.max())


def runs_equal(a: SimulationRun, b: SimulationRun) -> bool:
    return (
        a.run_id == b.run_id
        and a.config.shape == b.config.shape
        and bool(np.array_equal(a.config, b.config))
        and set(a.series) == set(b.series)
        and all(np.array_equal(a.series[k], b.series[k]) for k in a.series)
    )


def scans_equal(a: ParameterScan, b: ParameterScan) -> bool:
    """Structural equality, used by round-trip and determinism tests."""
    return (
        a.scan_id == b.scan_id
        and a.parameter_schema == b.parameter_schema
        and a.observable_schema == b.observable_schema
        and len(a.runs) == len(b.runs)
        and all(runs_equal(x, y) for x, y in zip(a.runs, b.runs))
    )

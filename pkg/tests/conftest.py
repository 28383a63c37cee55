import numpy as np
import pytest

from tempopc import (
    ClusterConfig,
    ObservableSchema,
    ObservableSpec,
    ParameterSchema,
    ParameterSpec,
    ParameterScan,
    SimulationRun,
    cluster_scan,
)
from tempopc.simgen import GridSpec, demo_grid, generate_scan


def make_scan(
    scan_id="test",
    parameters=(("p1", "", "continuous"),),
    observables=(("y1", ""),),
    time_grid=(0.0, 1.0, 2.0),
    runs=(),
):
    """Hand-rolled scan builder for small fixtures."""
    schema_p = ParameterSchema(ParameterSpec(*p) for p in parameters)
    schema_o = ObservableSchema((ObservableSpec(*o) for o in observables), time_grid)
    built = [SimulationRun(rid, config, series) for rid, config, series in runs]
    return ParameterScan(scan_id, schema_p, schema_o, built)


@pytest.fixture
def tiny_scan():
    return make_scan(
        parameters=(("rate", "1/min", "continuous"), ("count", "molecules", "discrete")),
        observables=(("level", "au"), ("output", "au")),
        time_grid=(0.0, 10.0, 20.0),
        runs=[
            ("r1", [0.1, 5.0], {"level": [0.0, 1.0, 2.0], "output": [5.0, 5.0, 5.0]}),
            ("r2", [0.2, 5.0], {"level": [-1.0, 0.0, 5.0], "output": [2.0, 1.0, 0.0]}),
            ("r3", [0.3, 10.0], {"level": [1.0, 1.0, 1.0], "output": [0.0, 3.0, 9.0]}),
        ],
    )


@pytest.fixture(scope="session")
def small_scan():
    grid = GridSpec(
        values={
            "nWnt": (120.0, 300.0),
            "nLRP6_lr": (0.0, 1.0),
            "kRaftInternal": (0.002, 0.25),
            "kLrpEndo": (0.001, 0.1),
        }
    )
    return generate_scan(grid, seed=11, scan_id="small")


@pytest.fixture(scope="session")
def small_model(small_scan):
    return cluster_scan(small_scan, ClusterConfig(k=2, restarts=2, seed=5))


@pytest.fixture(scope="session")
def demo_scan():
    return generate_scan(demo_grid(), seed=0, scan_id="wnt-surrogate")


# Three template shapes on the demo time grid; noise sigma is 5% of the
# template value range (0..100 -> sigma 5).
TEMPLATES = (
    ("flat-low", np.array([5, 5, 5, 5, 5, 5, 5], dtype=float)),
    ("rise-hold", np.array([0, 20, 50, 80, 95, 100, 100], dtype=float)),
    ("peak-decay", np.array([0, 40, 90, 100, 60, 25, 5], dtype=float)),
)
TEMPLATE_SIGMA = 5.0


def template_scan(seed, per_template=20):
    """60-series synthetic set with known ground-truth labels."""
    rng = np.random.default_rng(seed)
    runs, truth = [], {}
    i = 0
    for label, (_, template) in enumerate(TEMPLATES):
        for _ in range(per_template):
            run_id = f"run-{i:03d}"
            noisy = template + rng.normal(0.0, TEMPLATE_SIGMA, template.size)
            runs.append((run_id, [float(label)], {"y": noisy}))
            truth[run_id] = label
            i += 1
    scan = make_scan(
        scan_id="templates",
        parameters=(("template", "", "discrete"),),
        observables=(("y", ""),),
        time_grid=(0.0, 10.0, 20.0, 30.0, 60.0, 120.0, 360.0),
        runs=runs,
    )
    return scan, truth

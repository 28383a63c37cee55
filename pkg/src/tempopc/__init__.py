"""tempopc: temporal parallel coordinates for simulation parameter scans."""

from .clustering import (
    ClusterConfig,
    ClusterModel,
    ObservableClustering,
    cluster_observable,
    cluster_scan,
    inertia_profile,
    merge_clusters,
    move_runs,
    split_cluster,
)
from .data_model import (
    ObservableSchema,
    ObservableSpec,
    ParameterSchema,
    ParameterSpec,
    ParameterScan,
    SimulationRun,
    Violation,
    min_max,
    scans_equal,
    validate_scan,
)
from .dtw import DtwConfig, brute_force_dtw, dtw_alignment, dtw_distance, dtw_distance_matrix
from .ingest import ScanFormatError, emit_scan, parse_scan
from .layout import (
    AxisSpec,
    ClusterBox,
    LayoutModel,
    Palette,
    assign_colors,
    compute_layout,
    reorder_axes,
    reorder_clusters,
)
from .render_svg import RenderConfig, render
from .selection import (
    SelectionState,
    StaleClusterError,
    evaluate,
    move_brush,
    parameter_footprint,
    pick_cluster,
    toggle_bookmark,
)
from .simgen import GridSpec, WntConfig, demo_grid, generate_scan, simulate_run

__version__ = "0.1.0"

__all__ = [
    "ClusterConfig",
    "ClusterModel",
    "ObservableClustering",
    "cluster_observable",
    "cluster_scan",
    "inertia_profile",
    "merge_clusters",
    "move_runs",
    "split_cluster",
    "ObservableSchema",
    "ObservableSpec",
    "ParameterSchema",
    "ParameterSpec",
    "ParameterScan",
    "SimulationRun",
    "Violation",
    "min_max",
    "scans_equal",
    "validate_scan",
    "DtwConfig",
    "brute_force_dtw",
    "dtw_alignment",
    "dtw_distance",
    "dtw_distance_matrix",
    "ScanFormatError",
    "emit_scan",
    "parse_scan",
    "AxisSpec",
    "ClusterBox",
    "LayoutModel",
    "Palette",
    "assign_colors",
    "compute_layout",
    "reorder_axes",
    "reorder_clusters",
    "RenderConfig",
    "render",
    "SelectionState",
    "StaleClusterError",
    "evaluate",
    "move_brush",
    "parameter_footprint",
    "pick_cluster",
    "toggle_bookmark",
    "GridSpec",
    "WntConfig",
    "demo_grid",
    "generate_scan",
    "simulate_run",
]

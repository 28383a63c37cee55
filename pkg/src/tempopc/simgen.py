"""Surrogate stochastic simulator of Wnt receptor trafficking.

Produces parameter scans with the demo schema — parameters nWnt, nLRP6_lr,
kRaftInternal, kLrpEndo; observables lrp6Dim, lrp6Int, lrp6Phos, bCat_nuc on
a non-uniform 0..360 minute grid — via an exact Gillespie simulation of a
deliberately simplified reaction network:

    Wnt + free receptor -> bound receptor            (k_bind, per compartment)
    bound + free receptor -> dimer                   (k_dimerize)
    dimer -> phosphorylated dimer                    (k_phosphorylate)
    non-raft bound/dimer/phos -> internalized        (kLrpEndo; ligand degraded)
    raft bound/dimer/phos -> internalized + signal   (kRaftInternal)
    signalosome decay, bCat_nuc production & decay

Internalization is absorbing (no recycling), so lrp6Int is monotone, and
receptors are conserved exactly: free + bound + 2*(dimer + phos) +
internalized = receptor_total at every event.  Raft internalization feeds a
pool of signalosomes that drives saturating bCat_nuc production; slow raft
internalization sustains the pool (stable activation) while fast raft
internalization exhausts it early (transient peak, then decay).

This is not a biologically validated model; magnitudes are chosen so the
responses unfold on the 0-360 minute window.
"""

import itertools
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from .data_model import (
    ObservableSchema,
    ObservableSpec,
    ParameterSchema,
    ParameterSpec,
    ParameterScan,
    SimulationRun,
)

DEFAULT_TIME_GRID = (0.0, 10.0, 20.0, 30.0, 60.0, 120.0, 360.0)

PARAMETER_SPECS = (
    ParameterSpec("nWnt", "molecules", "discrete"),
    ParameterSpec("nLRP6_lr", "fraction", "continuous"),
    ParameterSpec("kRaftInternal", "1/min", "continuous"),
    ParameterSpec("kLrpEndo", "1/min", "continuous"),
)

OBSERVABLE_SPECS = (
    ObservableSpec("lrp6Dim", "molecules"),
    ObservableSpec("lrp6Int", "molecules"),
    ObservableSpec("lrp6Phos", "molecules"),
    ObservableSpec("bCat_nuc", "molecules"),
)


@dataclass(frozen=True)
class Reaction:
    """One reaction channel: a propensity over counts plus its state changes."""

    name: str
    propensity: Callable[[np.ndarray], float]
    changes: tuple[tuple[int, int], ...]


def gillespie(
    initial_state: Sequence[int],
    reactions: Sequence[Reaction],
    time_grid: Sequence[float],
    rng: np.random.Generator,
    max_events: int = 10_000_000,
) -> np.ndarray:
    """Exact SSA (direct method); returns counts sampled at the grid times.

    The state at grid time t is the state just before the first event after
    t.  Once all propensities vanish the remaining grid points repeat the
    final state.
    """
    state = np.array(initial_state, dtype=np.int64)
    grid = [float(t) for t in time_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("time_grid must be strictly increasing")
    if grid and grid[0] < 0:
        raise ValueError("time_grid must start at t >= 0")

    samples = np.empty((len(grid), state.size), dtype=np.int64)
    ptr = 0
    t = 0.0
    for _ in range(max_events):
        propensities = [r.propensity(state) for r in reactions]
        total = 0.0
        for a in propensities:
            if a < 0:
                raise ValueError("negative propensity")
            total += a
        if total <= 0.0:
            break
        t_next = t + rng.exponential(1.0 / total)
        while ptr < len(grid) and grid[ptr] < t_next:
            samples[ptr] = state
            ptr += 1
        if ptr >= len(grid):
            break
        t = t_next
        pick = rng.random() * total
        acc = 0.0
        chosen = len(reactions) - 1
        for idx, a in enumerate(propensities):
            acc += a
            if pick < acc:
                chosen = idx
                break
        for species, change in reactions[chosen].changes:
            state[species] += change
            if state[species] < 0:
                raise RuntimeError(
                    f"reaction {reactions[chosen].name} drove species {species} negative"
                )
    else:
        raise RuntimeError(f"exceeded {max_events} events; check rate magnitudes")

    while ptr < len(grid):
        samples[ptr] = state
        ptr += 1
    return samples


# Species indices of the Wnt network state vector.
WNT, R_NON, R_RAFT, B_NON, B_RAFT, D_NON, D_RAFT, P_NON, P_RAFT, INTERN, SIGNAL, BCAT = range(12)

# Receptors carried by each species; the conserved quantity is the dot
# product of this vector with the state.
RECEPTOR_UNITS = np.array([0, 1, 1, 1, 1, 2, 2, 2, 2, 1, 0, 0], dtype=np.int64)


@dataclass(frozen=True)
class WntConfig:
    """One scan configuration plus the fixed internals of the surrogate model."""

    nWnt: int = 150
    nLRP6_lr: float = 0.5
    kRaftInternal: float = 0.01
    kLrpEndo: float = 0.01
    receptor_total: int = 100
    k_bind: float = 0.0015
    k_dimerize: float = 0.004
    k_phosphorylate: float = 0.1
    k_signal_decay: float = 0.02
    bcat_production: float = 0.6
    bcat_saturation: int = 5
    k_bcat_decay: float = 0.025
    seed: int = 0

    def __post_init__(self):
        if self.nWnt < 0 or self.receptor_total < 0 or self.bcat_saturation < 0:
            raise ValueError("molecule counts must be >= 0")
        if not 0.0 <= self.nLRP6_lr <= 1.0:
            raise ValueError(f"nLRP6_lr must be in [0, 1], got {self.nLRP6_lr}")
        for name in (
            "kRaftInternal",
            "kLrpEndo",
            "k_bind",
            "k_dimerize",
            "k_phosphorylate",
            "k_signal_decay",
            "bcat_production",
            "k_bcat_decay",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def initial_state(self) -> np.ndarray:
        state = np.zeros(12, dtype=np.int64)
        raft = int(round(self.nLRP6_lr * self.receptor_total))
        state[WNT] = int(self.nWnt)
        state[R_RAFT] = raft
        state[R_NON] = self.receptor_total - raft
        return state

    def config_vector(self) -> tuple[float, ...]:
        return (float(self.nWnt), self.nLRP6_lr, self.kRaftInternal, self.kLrpEndo)


def wnt_reactions(cfg: WntConfig) -> tuple[Reaction, ...]:
    kb, kd, kp = cfg.k_bind, cfg.k_dimerize, cfg.k_phosphorylate
    ke, kr = cfg.kLrpEndo, cfg.kRaftInternal
    return (
        Reaction("bind_nonraft", lambda s: kb * s[WNT] * s[R_NON], ((WNT, -1), (R_NON, -1), (B_NON, +1))),
        Reaction("bind_raft", lambda s: kb * s[WNT] * s[R_RAFT], ((WNT, -1), (R_RAFT, -1), (B_RAFT, +1))),
        Reaction("dimerize_nonraft", lambda s: kd * s[B_NON] * s[R_NON], ((B_NON, -1), (R_NON, -1), (D_NON, +1))),
        Reaction("dimerize_raft", lambda s: kd * s[B_RAFT] * s[R_RAFT], ((B_RAFT, -1), (R_RAFT, -1), (D_RAFT, +1))),
        Reaction("phosphorylate_nonraft", lambda s: kp * s[D_NON], ((D_NON, -1), (P_NON, +1))),
        Reaction("phosphorylate_raft", lambda s: kp * s[D_RAFT], ((D_RAFT, -1), (P_RAFT, +1))),
        # Non-raft internalization degrades receptor and ligand: attenuation.
        Reaction("endo_bound", lambda s: ke * s[B_NON], ((B_NON, -1), (INTERN, +1))),
        Reaction("endo_dimer", lambda s: ke * s[D_NON], ((D_NON, -1), (INTERN, +2))),
        Reaction("endo_phos", lambda s: ke * s[P_NON], ((P_NON, -1), (INTERN, +2))),
        # Raft internalization also spawns a signalosome: promotion.
        Reaction("raft_bound", lambda s: kr * s[B_RAFT], ((B_RAFT, -1), (INTERN, +1), (SIGNAL, +1))),
        Reaction("raft_dimer", lambda s: kr * s[D_RAFT], ((D_RAFT, -1), (INTERN, +2), (SIGNAL, +1))),
        Reaction("raft_phos", lambda s: kr * s[P_RAFT], ((P_RAFT, -1), (INTERN, +2), (SIGNAL, +1))),
        Reaction("signal_decay", lambda s: cfg.k_signal_decay * s[SIGNAL], ((SIGNAL, -1),)),
        Reaction(
            "bcat_production",
            lambda s: cfg.bcat_production * min(s[SIGNAL], cfg.bcat_saturation),
            ((BCAT, +1),),
        ),
        Reaction("bcat_decay", lambda s: cfg.k_bcat_decay * s[BCAT], ((BCAT, -1),)),
    )


def simulate_species(cfg: WntConfig, time_grid: Sequence[float] = DEFAULT_TIME_GRID) -> np.ndarray:
    """Raw species counts at the grid times; deterministic given cfg.seed."""
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    return gillespie(cfg.initial_state(), wnt_reactions(cfg), time_grid, rng)


def observables_from_species(samples: np.ndarray) -> dict[str, np.ndarray]:
    return {
        "lrp6Dim": 2 * (samples[:, D_NON] + samples[:, D_RAFT]),
        "lrp6Int": samples[:, INTERN],
        "lrp6Phos": 2 * (samples[:, P_NON] + samples[:, P_RAFT]),
        "bCat_nuc": samples[:, BCAT],
    }


def simulate_run(
    cfg: WntConfig,
    time_grid: Sequence[float] = DEFAULT_TIME_GRID,
    run_id: str = "run",
) -> SimulationRun:
    """One full trajectory sampled at the grid, packaged as a SimulationRun."""
    samples = simulate_species(cfg, time_grid)
    series = {k: v.astype(np.float64) for k, v in observables_from_species(samples).items()}
    return SimulationRun(run_id, cfg.config_vector(), series)


# --- scan generation ------------------------------------------------------

PARAMETER_NAMES = tuple(p.name for p in PARAMETER_SPECS)


@dataclass(frozen=True)
class GridSpec:
    """Configurations to simulate: a factorial product, an explicit list, or both."""

    values: Mapping[str, tuple[float, ...]] = field(default_factory=dict)
    configs: tuple[tuple[float, float, float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "values", {k: tuple(float(x) for x in v) for k, v in self.values.items()}
        )
        object.__setattr__(
            self, "configs", tuple(tuple(float(x) for x in c) for c in self.configs)
        )
        unknown = set(self.values) - set(PARAMETER_NAMES)
        if unknown:
            raise ValueError(f"unknown parameters {sorted(unknown)}; expected {PARAMETER_NAMES}")
        if self.values and set(self.values) != set(PARAMETER_NAMES):
            missing = set(PARAMETER_NAMES) - set(self.values)
            raise ValueError(f"grid values missing parameters {sorted(missing)}")
        for k, v in self.values.items():
            if not v:
                raise ValueError(f"parameter {k!r} has an empty value list")
        for c in self.configs:
            if len(c) != len(PARAMETER_NAMES):
                raise ValueError(f"explicit config {c!r} must have {len(PARAMETER_NAMES)} values")
        if not self.values and not self.configs:
            raise ValueError("grid spec is empty")

    def expand(self) -> list[tuple[float, float, float, float]]:
        configs: list[tuple[float, float, float, float]] = []
        if self.values:
            lists = [self.values[name] for name in PARAMETER_NAMES]
            configs.extend(itertools.product(*lists))
        configs.extend(self.configs)
        return configs

    @staticmethod
    def from_obj(obj: Mapping) -> "GridSpec":
        return GridSpec(
            values={k: v for k, v in obj.items() if k in PARAMETER_NAMES},
            configs=tuple(tuple(c) for c in obj.get("configs", ())),
        )


def demo_grid() -> GridSpec:
    """The 141-configuration demo grid.

    A 3 x 3 x 4 x 4 factorial (144 configurations) minus the three redundant
    corner duplicates at (nWnt=300, nLRP6_lr=1, kRaftInternal=0.25) where only
    the inert kLrpEndo differs; the lowest kLrpEndo representative is kept.
    """
    values = {
        "nWnt": (120.0, 180.0, 300.0),
        "nLRP6_lr": (0.0, 0.5, 1.0),
        "kRaftInternal": (0.001, 0.002, 0.05, 0.25),
        "kLrpEndo": (0.001, 0.005, 0.02, 0.1),
    }
    dropped = {(300.0, 1.0, 0.25, 0.005), (300.0, 1.0, 0.25, 0.02), (300.0, 1.0, 0.25, 0.1)}
    lists = [values[name] for name in PARAMETER_NAMES]
    configs = [c for c in itertools.product(*lists) if c not in dropped]
    return GridSpec(configs=tuple(configs))


def generate_scan(
    grid: GridSpec,
    seed: int = 0,
    scan_id: str = "wnt-surrogate",
    time_grid: Sequence[float] = DEFAULT_TIME_GRID,
    base: WntConfig = WntConfig(),
) -> ParameterScan:
    """Simulate one run per configuration; run seeds derive from (seed, index)."""
    configs = grid.expand()
    runs = []
    for index, values in enumerate(configs):
        n_wnt, raft_fraction, k_raft, k_endo = values
        run_seed = np.random.SeedSequence([int(seed), index]).generate_state(1)[0]
        cfg = _with_parameters(base, int(round(n_wnt)), raft_fraction, k_raft, k_endo, int(run_seed))
        runs.append(simulate_run(cfg, time_grid, run_id=f"run-{index:04d}"))
    return ParameterScan(
        scan_id,
        ParameterSchema(PARAMETER_SPECS),
        ObservableSchema(OBSERVABLE_SPECS, time_grid),
        runs,
    )


def _with_parameters(
    base: WntConfig, n_wnt: int, raft_fraction: float, k_raft: float, k_endo: float, seed: int
) -> WntConfig:
    return replace(
        base,
        nWnt=n_wnt,
        nLRP6_lr=raft_fraction,
        kRaftInternal=k_raft,
        kLrpEndo=k_endo,
        seed=seed,
    )

"""Causal-stability study and synchronizing-variable classification."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ccc import DEFAULT_PARAMS, CccParams, ccc_matrix, net_from_symbols, symbolize_columns
from .dynsys import (
    CouplingSpec,
    DivergenceError,
    SystemSpec,
    Trajectory,
    attractor_diameter,
    builtin_system,
    integrate,
    integrate_slave,
    sync_distance,
)

SYNC = "sync"
NO_SYNC = "no-sync"
INDETERMINATE = "indeterminate"

# slave S_0 offsets from the master's initial condition; lorenz gives (7, 1, 6)
SLAVE_OFFSETS = {
    "lorenz": (4.0, -3.0, 0.0),
    "rossler": (2.0, -2.0, 0.5),
    "chen": (4.0, -3.0, 2.0),
    "lorenz5d": (4.0, -3.0, 0.0, 0.2, -0.2),
    "henon": (0.2, -0.05),
}

# y-forced rossler contracts at ~0.03 per time unit, so it needs a long burn-in
# before slaves agree to the last bit.
STABILITY_TRANSIENTS = {"rossler": 10000}


def default_slave_ic(system: SystemSpec) -> tuple[float, ...]:
    offset = SLAVE_OFFSETS.get(system.name, (1.0,) * system.dimension)
    return tuple(float(a + b) for a, b in zip(system.default_ic, offset))


@dataclass(frozen=True)
class StabilityConfig:
    system: SystemSpec
    forced_variable: int
    master_ic: tuple[float, ...]
    slave0_ic: tuple[float, ...]
    deltas: tuple[float, ...] = (1.0, 10.0, 100.0)
    k_max: int = 100
    seed: int = 0
    ccc_params: CccParams | None = None
    n_samples: int = 10000
    transients: int = 2000
    method: str | None = None
    dt: float | None = None
    # bin every slave on the master's coordinate ranges (False: each slave's own)
    shared_partition: bool = True

    def __post_init__(self):
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        d = np.asarray(self.deltas, dtype=float)
        if d.size == 0:
            raise ValueError("deltas must not be empty")
        if np.any(d < 0) or np.any(np.diff(d) <= 0):
            raise ValueError("deltas must be non-negative and strictly increasing")
        CouplingSpec(self.forced_variable, self.master_ic, self.slave0_ic).validate(self.system)

    @property
    def params(self) -> CccParams:
        return self.ccc_params or DEFAULT_PARAMS[self.system.name]

    @classmethod
    def for_system(cls, name: str, forced_variable: int | str, **kw) -> "StabilityConfig":
        system = builtin_system(name)
        kw.setdefault("master_ic", system.default_ic)
        kw.setdefault("slave0_ic", default_slave_ic(system))
        kw.setdefault("transients", STABILITY_TRANSIENTS.get(name, 2000))
        return cls(system, system.index(forced_variable), **kw)


@dataclass
class StabilityReport:
    system: str
    forced_variable: int
    deltas: tuple[float, ...]
    k_max: int
    seed: int
    net0: float = float("nan")
    s0_diverged: bool = False
    # per delta: CCC_net of each secondary slave (nan when it diverged)
    nets: dict[float, np.ndarray] = field(default_factory=dict)
    M: dict[float, np.ndarray] = field(default_factory=dict)
    diverged: dict[float, list[int]] = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["delta", "k", "M"])
        for delta in self.deltas:
            for k, m in enumerate(self.M.get(delta, []), start=1):
                w.writerow([f"{delta:.6g}", k, f"{m:.6g}"])
        return buf.getvalue()

    def final_M(self) -> dict[float, float]:
        return {d: float(self.M[d][-1]) for d in self.deltas if d in self.M}


def running_mean_abs(net0: float, nets: np.ndarray) -> np.ndarray:
    """M_k over the first k slaves; diverged (nan) slaves are skipped."""
    out = np.empty(nets.size)
    total = 0.0
    count = 0
    for i, v in enumerate(nets):
        if not np.isnan(v):
            total += abs(net0 - v)
            count += 1
        out[i] = total / count if count else np.nan
    return out


def run_stability(config: StabilityConfig) -> StabilityReport:
    """Mean |CCC_net(S_0) - CCC_net(S_k)| for perturbed slaves at each delta.

    Slaves are symbolized on the master's coordinate ranges so every slave is
    coarse-grained on the same state-space partition.
    """
    sys_ = config.system
    params = config.params
    forced = config.forced_variable
    report = StabilityReport(sys_.name, forced, tuple(float(d) for d in config.deltas),
                             config.k_max, config.seed)
    total = config.transients + config.n_samples
    master = integrate(sys_, config.master_ic, total, 0, config.method, config.dt)
    tail = master.samples[config.transients:]
    ranges = list(zip(tail.min(axis=0), tail.max(axis=0))) if config.shared_partition else None

    cache: dict[bytes, float] = {}

    def slave_net(ic) -> float:
        coupling = CouplingSpec(forced, config.master_ic, tuple(ic))
        slave = integrate_slave(sys_, coupling, master, config.n_samples, config.transients,
                                config.method, config.dt)
        sym = symbolize_columns(slave.samples, params.bins, ranges)
        key = sym.tobytes()
        if key not in cache:
            cache[key] = net_from_symbols(sym, forced, params).net
        return cache[key]

    try:
        report.net0 = slave_net(config.slave0_ic)
    except DivergenceError:
        report.s0_diverged = True
        return report

    rng = np.random.default_rng(config.seed)
    base = np.asarray(config.slave0_ic, dtype=float)
    for delta in report.deltas:
        nets = np.full(config.k_max, np.nan)
        bad = []
        for k in range(config.k_max):
            coeff = rng.uniform(-1.0, 1.0, sys_.dimension)
            try:
                nets[k] = slave_net(base + coeff * delta)
            except DivergenceError:
                bad.append(k + 1)
        report.nets[delta] = nets
        report.diverged[delta] = bad
        report.M[delta] = running_mean_abs(report.net0, nets)
    return report


def check_causal_stability(report: StabilityReport, epsilon: float = 1e-6) -> bool:
    """True iff every valid secondary slave's CCC_net is within epsilon of S_0's."""
    if report.s0_diverged:
        return False
    diffs = [np.abs(report.net0 - v[~np.isnan(v)]) for v in report.nets.values()]
    diffs = np.concatenate(diffs) if diffs else np.empty(0)
    if diffs.size == 0:
        raise ValueError("no non-diverged secondary slaves: cannot certify causal stability")
    return bool(diffs.max() < epsilon)


@dataclass(frozen=True)
class SyncResult:
    sync: bool
    distances: tuple[float, ...]  # relative to attractor diameter; inf if diverged
    diverged: bool = False

    @property
    def label(self) -> str:
        return SYNC if self.sync else NO_SYNC


def default_ic_pairs(system: SystemSpec) -> list[tuple[tuple[float, ...], tuple[float, ...]]]:
    m = system.default_ic
    s0 = default_slave_ic(system)
    s1 = tuple(a - 0.5 * (b - a) for a, b in zip(m, s0))
    return [(m, s0), (m, s1)]


def ground_truth_sync(
    system: SystemSpec,
    forced_variable: int,
    ic_pairs: Sequence[tuple[Sequence[float], Sequence[float]]] | None = None,
    tolerance: float = 1e-3,
    n_samples: int = 10000,
    transients: int = 2000,
    method: str | None = None,
    dt: float | None = None,
) -> SyncResult:
    """Direct-simulation check: tail distance below tolerance * diameter for every pair."""
    pairs = list(ic_pairs) if ic_pairs is not None else default_ic_pairs(system)
    if len({tuple(s) for _, s in pairs}) < 2:
        raise ValueError("ground_truth_sync needs at least two distinct slave ics")
    dists = []
    diverged = False
    for m_ic, s_ic in pairs:
        coupling = CouplingSpec(forced_variable, tuple(m_ic), tuple(s_ic))
        try:
            master = integrate(system, m_ic, transients + n_samples, 0, method, dt)
            slave = integrate_slave(system, coupling, master, n_samples, transients, method, dt)
        except DivergenceError:
            diverged = True
            dists.append(float("inf"))
            continue
        tail = Trajectory(master.samples[transients:], master.dt)
        diam = attractor_diameter(tail)
        dists.append(sync_distance(tail, slave, 0.2) / diam)
    sync = not diverged and all(d < tolerance for d in dists)
    return SyncResult(sync, tuple(dists), diverged)


@dataclass
class SyncClassification:
    variable_names: tuple[str, ...]
    net: np.ndarray
    predicted: list[str]
    caveats: dict[str, str] = field(default_factory=dict)
    ground_truth: list[str] | None = None

    def to_dict(self) -> dict:
        out = {}
        for i, name in enumerate(self.variable_names):
            row = {"ccc_net": float(self.net[i]), "predicted": self.predicted[i]}
            if self.ground_truth is not None:
                row["ground_truth"] = self.ground_truth[i]
            if name in self.caveats:
                row["caveat"] = self.caveats[name]
            out[name] = row
        return out


_MARK = {SYNC: "✓", NO_SYNC: "✗", INDETERMINATE: "?"}


def classify_sync_variables(
    trajectory: Trajectory,
    params: CccParams,
    structure_hints: Sequence[bool] | None = None,
) -> SyncClassification:
    """Predict synchronizing variables from the master's CCC_net values alone.

    The most negative CCC_net variable is predicted to synchronize unless the
    hints say its update does not depend on itself, in which case it is held
    as indeterminate and the next negative variable takes its place. Positive
    CCC_net means no-sync; other negative variables stay indeterminate.
    """
    if trajectory.dimension < 2:
        raise ValueError("classification needs at least two variables")
    if structure_hints is not None and len(structure_hints) != trajectory.dimension:
        raise ValueError("structure_hints needs one flag per variable")
    names = trajectory.variable_names
    net = ccc_matrix(trajectory, params).net()
    predicted = [NO_SYNC if v > 0 else INDETERMINATE for v in net]
    caveats = {}
    for i in np.argsort(net, kind="stable"):
        if net[i] >= 0:
            break
        if structure_hints is not None and not structure_hints[i]:
            caveats[names[i]] = "no direct self-dependence"
            continue
        predicted[i] = SYNC
        break
    return SyncClassification(names, net, predicted, caveats)


def sync_table(rows: dict[str, Sequence[str]], width: int = 5) -> str:
    """Aligned text table of sync labels, one row per system."""
    vars_ = ["x", "y", "z", "q", "w"][:width]
    lines = [f"{'system':<10}" + "".join(f"{v:>4}" for v in vars_)]
    for name, labels in rows.items():
        cells = [_MARK.get(lab, lab) for lab in labels] + ["-"] * (width - len(labels))
        lines.append(f"{name:<10}" + "".join(f"{c:>4}" for c in cells))
    return "\n".join(lines) + "\n"

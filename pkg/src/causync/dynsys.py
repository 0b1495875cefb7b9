"""Benchmark chaotic systems, fixed-step integrators and master-slave coupling.

Coupling is complete substitution: one slave variable is overwritten with the
master's value before every vector-field (or map) evaluation, so the forced
slave column is bitwise equal to the master column.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numba import njit

DIVERGENCE_BOUND = 1e9

EULER = 0
RK4 = 1
_METHODS = {"euler": EULER, "rk4": RK4}


class UnknownSystemError(KeyError):
    pass


class DivergenceError(RuntimeError):
    def __init__(self, system: str, step: int):
        super().__init__(f"{system}: state diverged at step {step}")
        self.system = system
        self.step = step


# --- vector fields / maps -------------------------------------------------
# Every function takes (state, params) and returns a fresh array. Continuous
# systems return the time derivative, discrete systems the next state.


@njit(cache=True)
def lorenz_rhs(s, p):
    sigma, rho, beta = p[0], p[1], p[2]
    x, y, z = s[0], s[1], s[2]
    out = np.empty(3)
    out[0] = sigma * (y - x)
    out[1] = x * (rho - z) - y
    out[2] = x * y - beta * z
    return out


@njit(cache=True)
def rossler_rhs(s, p):
    a, b, c = p[0], p[1], p[2]
    x, y, z = s[0], s[1], s[2]
    out = np.empty(3)
    out[0] = -y - z
    out[1] = x + a * y
    out[2] = b + z * (x - c)
    return out


@njit(cache=True)
def chen_rhs(s, p):
    a, b, c = p[0], p[1], p[2]
    x, y, z = s[0], s[1], s[2]
    out = np.empty(3)
    out[0] = a * (y - x)
    out[1] = (c - a) * x - x * z + c * y
    out[2] = x * y - b * z
    return out


@njit(cache=True)
def lorenz5d_rhs(s, p):
    sigma, rho, beta = p[0], p[1], p[2]
    x, y, z, q, w = s[0], s[1], s[2], s[3], s[4]
    out = np.empty(5)
    out[0] = sigma * (y - x) + w
    out[1] = x * (rho - z) - y
    out[2] = x * y - beta * z
    out[3] = -q * q * q + w
    out[4] = -x - q - 8.0 * w
    return out


@njit(cache=True)
def henon_map(s, p):
    a, b = p[0], p[1]
    out = np.empty(2)
    out[0] = 1.0 - a * s[0] * s[0] + s[1]
    out[1] = b * s[0]
    return out


@dataclass(frozen=True)
class SystemSpec:
    name: str
    variable_names: tuple[str, ...]
    parameters: dict[str, float]
    kind: str  # "continuous" | "discrete"
    func: Callable = field(repr=False, compare=False)
    default_step: float = 1.0
    default_method: str = "euler"
    # whether each variable's own update depends directly on itself
    self_dependent: tuple[bool, ...] = ()
    default_ic: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in ("continuous", "discrete"):
            raise ValueError(f"kind must be continuous or discrete, got {self.kind!r}")
        if len(self.variable_names) == 0:
            raise ValueError("system needs at least one variable")
        if not all(np.isfinite(v) for v in self.parameters.values()):
            raise ValueError(f"{self.name}: parameters must be finite")
        if self.self_dependent and len(self.self_dependent) != self.dimension:
            raise ValueError("self_dependent must have one flag per variable")
        if self.default_ic and len(self.default_ic) != self.dimension:
            raise ValueError("default_ic must have one entry per variable")

    @property
    def dimension(self) -> int:
        return len(self.variable_names)

    @property
    def param_array(self) -> np.ndarray:
        return np.array(list(self.parameters.values()), dtype=float)

    def with_parameters(self, **overrides: float) -> "SystemSpec":
        unknown = set(overrides) - set(self.parameters)
        if unknown:
            raise KeyError(f"{self.name}: unknown parameters {sorted(unknown)}")
        params = {**self.parameters, **{k: float(v) for k, v in overrides.items()}}
        return SystemSpec(
            self.name, self.variable_names, params, self.kind, self.func,
            self.default_step, self.default_method, self.self_dependent,
            self.default_ic,
        )

    def index(self, variable: str | int) -> int:
        if isinstance(variable, (int, np.integer)):
            if not 0 <= variable < self.dimension:
                raise IndexError(f"{self.name}: variable index {variable} out of range")
            return int(variable)
        try:
            return self.variable_names.index(variable)
        except ValueError:
            raise KeyError(f"{self.name}: no variable {variable!r}") from None


def _lorenz():
    return SystemSpec(
        "lorenz", ("x", "y", "z"), {"sigma": 10.0, "rho": 60.0, "beta": 8.0 / 3.0},
        "continuous", lorenz_rhs, default_step=0.01, default_method="euler",
        self_dependent=(True, True, True), default_ic=(3.0, 4.0, 6.0),
    )


def _rossler():
    return SystemSpec(
        "rossler", ("x", "y", "z"), {"a": 0.2, "b": 0.2, "c": 9.0},
        "continuous", rossler_rhs, default_step=0.1, default_method="rk4",
        self_dependent=(False, True, True), default_ic=(1.0, 1.0, 1.0),
    )


def _chen():
    return SystemSpec(
        "chen", ("x", "y", "z"), {"a": 35.0, "b": 3.0, "c": 28.0},
        "continuous", chen_rhs, default_step=0.005, default_method="rk4",
        self_dependent=(True, True, True), default_ic=(-3.0, 2.0, 20.0),
    )


def _lorenz5d():
    return SystemSpec(
        "lorenz5d", ("x", "y", "z", "q", "w"),
        {"sigma": 10.0, "rho": 60.0, "beta": 8.0 / 3.0},
        "continuous", lorenz5d_rhs, default_step=0.01, default_method="rk4",
        self_dependent=(True, True, True, True, True),
        default_ic=(3.0, 4.0, 6.0, 0.1, 0.1),
    )


def _henon():
    return SystemSpec(
        "henon", ("x", "y"), {"a": 1.4, "b": 0.3}, "discrete", henon_map,
        self_dependent=(True, False), default_ic=(0.1, 0.1),
    )


_BUILTINS = {
    "lorenz": _lorenz,
    "rossler": _rossler,
    "chen": _chen,
    "lorenz5d": _lorenz5d,
    "henon": _henon,
}

SYSTEM_NAMES = tuple(_BUILTINS)


def builtin_system(name: str) -> SystemSpec:
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise UnknownSystemError(
            f"unknown system {name!r}; choose from {', '.join(SYSTEM_NAMES)}"
        ) from None


@dataclass(frozen=True)
class Trajectory:
    samples: np.ndarray
    dt: float = 1.0
    transient_removed: int = 0
    variable_names: tuple[str, ...] = ()

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 2 or s.shape[0] < 1:
            raise ValueError("samples must be a 2-D array with at least one row")
        if not np.all(np.isfinite(s)):
            raise ValueError("trajectory contains non-finite samples")
        if self.variable_names and len(self.variable_names) != s.shape[1]:
            raise ValueError("variable_names length must match column count")
        object.__setattr__(self, "samples", s)
        if not self.variable_names:
            names = tuple(f"v{i}" for i in range(s.shape[1]))
            object.__setattr__(self, "variable_names", names)

    def __len__(self):
        return self.samples.shape[0]

    @property
    def dimension(self) -> int:
        return self.samples.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.samples[:, i]

    def tail(self, n: int) -> "Trajectory":
        return Trajectory(self.samples[-n:], self.dt, self.transient_removed + len(self) - n,
                          self.variable_names)


@dataclass(frozen=True)
class CouplingSpec:
    forced_variable: int
    master_ic: tuple[float, ...]
    slave_ic: tuple[float, ...]

    def validate(self, system: SystemSpec) -> None:
        if not 0 <= self.forced_variable < system.dimension:
            raise ValueError(
                f"forced_variable {self.forced_variable} out of range for {system.name}"
            )
        for label, ic in (("master_ic", self.master_ic), ("slave_ic", self.slave_ic)):
            if len(ic) != system.dimension:
                raise ValueError(f"{label} must have length {system.dimension}")
            if not np.all(np.isfinite(ic)):
                raise ValueError(f"{label} must be finite")


# --- integration kernels ----------------------------------------------------


@njit(cache=True)
def _diverged(s, bound):
    for v in s:
        if not (abs(v) <= bound):  # catches nan too
            return True
    return False


@njit(cache=True)
def _step(func, s, p, dt, method, discrete):
    if discrete:
        return func(s, p)
    if method == 0:
        return s + dt * func(s, p)
    k1 = func(s, p)
    k2 = func(s + 0.5 * dt * k1, p)
    k3 = func(s + 0.5 * dt * k2, p)
    k4 = func(s + dt * k3, p)
    return s + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@njit(cache=True)
def _run_free(func, ic, p, n_rows, dt, method, discrete, bound):
    out = np.empty((n_rows, ic.size))
    s = ic.copy()
    for n in range(n_rows):
        if _diverged(s, bound):
            return out, n
        out[n] = s
        if n + 1 < n_rows:
            s = _step(func, s, p, dt, method, discrete)
    return out, -1


@njit(cache=True)
def _run_forced(func, ic, p, n_rows, dt, method, discrete, bound, k, drive):
    # drive holds the full master state per row; RK4 stages reuse the master's
    # own stage values of the forced coordinate so that identical initial
    # conditions reproduce the master bit for bit.
    out = np.empty((n_rows, ic.size))
    s = ic.copy()
    for n in range(n_rows):
        s[k] = drive[n, k]
        if _diverged(s, bound):
            return out, n
        out[n] = s
        if n + 1 == n_rows:
            break
        if discrete:
            s = func(s, p)
        elif method == 0:
            s = s + dt * func(s, p)
        else:
            m = drive[n]
            mk1 = func(m, p)
            mk2 = func(m + 0.5 * dt * mk1, p)
            mk3 = func(m + 0.5 * dt * mk2, p)
            k1 = func(s, p)
            t = s + 0.5 * dt * k1
            t[k] = m[k] + 0.5 * dt * mk1[k]
            k2 = func(t, p)
            t = s + 0.5 * dt * k2
            t[k] = m[k] + 0.5 * dt * mk2[k]
            k3 = func(t, p)
            t = s + dt * k3
            t[k] = m[k] + dt * mk3[k]
            k4 = func(t, p)
            s = s + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return out, -1


def _resolve(system: SystemSpec, method: str | None, dt: float | None):
    method = method or system.default_method
    if method not in _METHODS:
        raise ValueError(f"unknown integration method {method!r}; use euler or rk4")
    if system.kind == "discrete":
        return method, 1.0
    dt = system.default_step if dt is None else float(dt)
    if not dt > 0:
        raise ValueError("dt must be positive for continuous systems")
    return method, dt


def integrate(
    system: SystemSpec,
    ic: Sequence[float],
    n_samples: int,
    transients: int = 0,
    method: str | None = None,
    dt: float | None = None,
    bound: float = DIVERGENCE_BOUND,
) -> Trajectory:
    """Integrate from ``ic`` and keep ``n_samples`` rows after ``transients``.

    Row 0 of the untrimmed run is the initial condition itself. Discrete
    systems iterate the map and ignore ``dt``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if transients < 0:
        raise ValueError("transients must be >= 0")
    ic = np.asarray(ic, dtype=float)
    if ic.shape != (system.dimension,):
        raise ValueError(f"{system.name}: ic must have length {system.dimension}")
    if not np.all(np.isfinite(ic)):
        raise ValueError("ic must be finite")
    method, dt = _resolve(system, method, dt)
    out, fail = _run_free(
        system.func, ic, system.param_array, transients + n_samples, dt,
        _METHODS[method], system.kind == "discrete", bound,
    )
    if fail >= 0:
        raise DivergenceError(system.name, fail)
    return Trajectory(out[transients:], dt, transients, system.variable_names)


def integrate_slave(
    system: SystemSpec,
    coupling: CouplingSpec,
    master: Trajectory,
    n_samples: int,
    transients: int = 0,
    method: str | None = None,
    dt: float | None = None,
    bound: float = DIVERGENCE_BOUND,
) -> Trajectory:
    """Integrate the slave driven by an untrimmed master trajectory.

    ``master`` must start at its initial condition (no transients removed)
    and hold at least ``transients + n_samples`` rows.
    """
    coupling.validate(system)
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if master.transient_removed != 0:
        raise ValueError("master trajectory must include its transient rows")
    needed = transients + n_samples
    if len(master) < needed:
        raise ValueError(f"master has {len(master)} rows, slave needs {needed}")
    if master.dimension != system.dimension:
        raise ValueError("master dimension does not match system")
    method, dt = _resolve(system, method, dt)
    if system.kind == "continuous" and master.dt != dt:
        raise ValueError(f"master dt {master.dt} differs from slave dt {dt}")
    out, fail = _run_forced(
        system.func, np.asarray(coupling.slave_ic, dtype=float), system.param_array,
        needed, dt, _METHODS[method], system.kind == "discrete", bound,
        coupling.forced_variable, master.samples,
    )
    if fail >= 0:
        raise DivergenceError(system.name, fail)
    return Trajectory(out[transients:], dt, transients, system.variable_names)


def simulate_pair(
    system: SystemSpec,
    coupling: CouplingSpec,
    n_samples: int,
    transients: int = 0,
    method: str | None = None,
    dt: float | None = None,
    bound: float = DIVERGENCE_BOUND,
) -> tuple[Trajectory, Trajectory]:
    """Master and forced slave, both trimmed by the same transient count."""
    master = integrate(system, coupling.master_ic, transients + n_samples, 0, method, dt, bound)
    slave = integrate_slave(system, coupling, master, n_samples, transients, method, dt, bound)
    return Trajectory(master.samples[transients:], master.dt, transients,
                      master.variable_names), slave


def sync_distance(a: Trajectory, b: Trajectory, tail_fraction: float = 0.2) -> float:
    """Largest Euclidean state distance over the trailing fraction of rows."""
    if a.samples.shape != b.samples.shape:
        raise ValueError(f"shape mismatch: {a.samples.shape} vs {b.samples.shape}")
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must be in (0, 1]")
    n = max(1, int(round(len(a) * tail_fraction)))
    d = np.linalg.norm(a.samples[-n:] - b.samples[-n:], axis=1)
    return float(d.max())


def attractor_diameter(traj: Trajectory) -> float:
    """Largest per-coordinate range of the trajectory."""
    return float(np.ptp(traj.samples, axis=0).max())

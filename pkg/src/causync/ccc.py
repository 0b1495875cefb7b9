"""Windowed Compression-Complexity Causality (CCC).

For a window starting at ``t`` the effect's past is ``[t, t+L)`` and its
current block is ``[t+L, t+L+w)``. Complexity change of the current block
given a set of pasts is

    CC(cur | pasts) = ETC(joint(p + cur for p in pasts)) - ETC(joint(pasts))

with ETC normalized by length - 1, the current block appended to every stream.
CCC of cause -> effect is CC without the cause's past minus CC with it,
averaged over windows. Conditional CCC conditions both terms on the pasts of
every remaining variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numba import njit

from .dynsys import Trajectory
from .etc import SymbolSequence, etc_normalized, joint_codes, symbolize


@dataclass(frozen=True)
class CccParams:
    past_len: int
    current_len: int
    step: int
    bins: int

    def __post_init__(self):
        if self.current_len < 1:
            raise ValueError("current_len (w) must be >= 1")
        if self.past_len < self.current_len:
            raise ValueError("past_len (L) must be >= current_len (w)")
        if self.step < 1:
            raise ValueError("step must be >= 1")
        if self.bins < 2:
            raise ValueError("bins (B) must be >= 2")

    def n_windows(self, n: int) -> int:
        span = n - self.past_len - self.current_len
        return span // self.step + 1 if span >= 0 else 0

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.past_len, self.current_len, self.step, self.bins)


DEFAULT_PARAMS = {
    "lorenz": CccParams(150, 15, 80, 8),
    "rossler": CccParams(300, 15, 200, 8),
    "lorenz5d": CccParams(450, 80, 300, 4),
    "chen": CccParams(100, 15, 80, 8),
    "henon": CccParams(100, 15, 80, 8),
}


# --- kernels -----------------------------------------------------------------


@njit(cache=True)
def _cc(past, cur, cond, radix):
    L = past.size
    w = cur.size
    m = cond.shape[0]
    if m == 0:
        full = np.empty(L + w, dtype=np.int64)
        full[:L] = past
        full[L:] = cur
        return etc_normalized(full) - etc_normalized(past)
    full = np.empty((m + 1, L + w), dtype=np.int64)
    base = np.empty((m + 1, L), dtype=np.int64)
    full[0, :L] = past
    base[0] = past
    for r in range(m):
        full[r + 1, :L] = cond[r]
        base[r + 1] = cond[r]
    for r in range(m + 1):
        full[r, L:] = cur
    return etc_normalized(joint_codes(full, radix)) - etc_normalized(joint_codes(base, radix))


@njit(cache=True)
def _ccc_windows(effect, cause, rest, L, w, step, radix):
    n_win = (effect.size - L - w) // step + 1
    out = np.empty(n_win)
    m = rest.shape[0]
    with_cause = np.empty((m + 1, L), dtype=np.int64)
    for j in range(n_win):
        t = j * step
        past = effect[t:t + L]
        cur = effect[t + L:t + L + w]
        rp = rest[:, t:t + L]
        for r in range(m):
            with_cause[r] = rp[r]
        with_cause[m] = cause[t:t + L]
        out[j] = _cc(past, cur, rp, radix) - _cc(past, cur, with_cause, radix)
    return out


def cc_conditional(
    target_current: SymbolSequence | Sequence[int],
    target_past: SymbolSequence | Sequence[int],
    conditioners_past: Sequence[SymbolSequence | Sequence[int]] = (),
) -> float:
    """Complexity change of the current block given the listed pasts."""
    def arr(s):
        return s.symbols if isinstance(s, SymbolSequence) else np.asarray(s, dtype=np.int64)

    cur, past = arr(target_current), arr(target_past)
    conds = [arr(c) for c in conditioners_past]
    if cur.size < 1 or past.size < 1:
        raise ValueError("target past and current must be non-empty")
    if any(c.size != past.size for c in conds):
        raise ValueError("every conditioner past must have the target past's length")
    stacked = np.stack(conds) if conds else np.empty((0, past.size), dtype=np.int64)
    radix = int(max(past.max(), cur.max(), stacked.max() if conds else 0)) + 1
    return float(_cc(past, cur, stacked, radix))


# --- trajectory-level API ----------------------------------------------------


def symbolize_columns(samples: np.ndarray, bins: int, ranges=None) -> np.ndarray:
    """Symbolize each column; ``ranges`` optionally fixes [lo, hi] per column."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    cols = []
    for i in range(samples.shape[1]):
        rng = None if ranges is None else ranges[i]
        cols.append(symbolize(samples[:, i], bins, rng).symbols)
    return np.stack(cols)


def _check_windows(n: int, params: CccParams) -> None:
    if params.n_windows(n) < 1:
        raise ValueError(
            f"series of length {n} too short for one window "
            f"(needs L + w = {params.past_len + params.current_len})"
        )


def ccc_windows_symbols(sym: np.ndarray, cause: int, effect: int, params: CccParams) -> np.ndarray:
    """Per-window conditional CCC values on a (variables, time) symbol matrix."""
    if cause == effect:
        raise ValueError(f"cause and effect must differ (both {cause})")
    _check_windows(sym.shape[1], params)
    rest_idx = [i for i in range(sym.shape[0]) if i not in (cause, effect)]
    rest = np.ascontiguousarray(sym[rest_idx]) if rest_idx else np.empty((0, sym.shape[1]), np.int64)
    return _ccc_windows(
        np.ascontiguousarray(sym[effect]), np.ascontiguousarray(sym[cause]), rest,
        params.past_len, params.current_len, params.step, params.bins,
    )


def ccc_pairwise(cause, effect, params: CccParams, ranges=None) -> float:
    cause = np.asarray(cause, dtype=float)
    effect = np.asarray(effect, dtype=float)
    if cause.shape != effect.shape or cause.ndim != 1:
        raise ValueError("cause and effect must be 1-D series of equal length")
    sym = symbolize_columns(np.stack([cause, effect], axis=1), params.bins, ranges)
    return float(np.mean(ccc_windows_symbols(sym, 0, 1, params)))


def _samples(trajectory) -> np.ndarray:
    return trajectory.samples if isinstance(trajectory, Trajectory) else np.asarray(trajectory, float)


def ccc_conditional(cause: int, effect: int, trajectory, params: CccParams, ranges=None) -> float:
    """CCC cause -> effect conditioned on every other column."""
    sym = symbolize_columns(_samples(trajectory), params.bins, ranges)
    return float(np.mean(ccc_windows_symbols(sym, cause, effect, params)))


@dataclass(frozen=True)
class NetEntry:
    variable: int
    net: float
    outgoing: dict[int, float] = field(default_factory=dict)  # CCC(variable -> v)
    incoming: dict[int, float] = field(default_factory=dict)  # CCC(v -> variable)


def net_from_symbols(sym: np.ndarray, variable: int, params: CccParams) -> NetEntry:
    others = [v for v in range(sym.shape[0]) if v != variable]
    out = {v: float(np.mean(ccc_windows_symbols(sym, variable, v, params))) for v in others}
    inc = {v: float(np.mean(ccc_windows_symbols(sym, v, variable, params))) for v in others}
    net = sum(out[v] for v in others) - sum(inc[v] for v in others)
    return NetEntry(variable, net, out, inc)


def ccc_net(variable: int, trajectory, params: CccParams, ranges=None) -> NetEntry:
    """Net conditional CCC from ``variable`` to the subsystem of all others."""
    samples = _samples(trajectory)
    if samples.shape[1] < 2:
        raise ValueError("ccc_net needs at least two variables")
    if not 0 <= variable < samples.shape[1]:
        raise IndexError(f"variable index {variable} out of range")
    sym = symbolize_columns(samples, params.bins, ranges)
    return net_from_symbols(sym, variable, params)


@dataclass(frozen=True)
class CccMatrix:
    """values[effect, cause] = conditional CCC cause -> effect (rows "to", columns "from")."""

    values: np.ndarray
    variable_names: tuple[str, ...]
    params: CccParams

    def net(self) -> np.ndarray:
        # outgoing from v is column v, incoming to v is row v
        return self.values.sum(axis=0) - self.values.sum(axis=1)

    def net_report(self) -> list[NetEntry]:
        n = self.values.shape[0]
        entries = []
        for v in range(n):
            others = [u for u in range(n) if u != v]
            out = {u: float(self.values[u, v]) for u in others}
            inc = {u: float(self.values[v, u]) for u in others}
            entries.append(NetEntry(v, sum(out.values()) - sum(inc.values()), out, inc))
        return entries

    def to_dict(self) -> dict:
        return {
            "variables": list(self.variable_names),
            "params": dict(zip(("L", "w", "step", "B"), self.params.as_tuple())),
            "matrix": {name: [float(v) for v in row]
                       for name, row in zip(self.variable_names, self.values)},
            "net": dict(zip(self.variable_names, map(float, self.net()))),
        }


def ccc_matrix(trajectory, params: CccParams, ranges=None, names: Sequence[str] | None = None) -> CccMatrix:
    samples = _samples(trajectory)
    if names is None:
        names = trajectory.variable_names if isinstance(trajectory, Trajectory) else tuple(
            f"v{i}" for i in range(samples.shape[1]))
    sym = symbolize_columns(samples, params.bins, ranges)
    n = sym.shape[0]
    values = np.zeros((n, n))
    for effect in range(n):
        for cause in range(n):
            if cause != effect:
                values[effect, cause] = np.mean(ccc_windows_symbols(sym, cause, effect, params))
    return CccMatrix(values, tuple(names), params)

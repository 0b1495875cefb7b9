"""Symbolization and Effort-To-Compress (ETC) complexity.

ETC counts the passes of non-sequential recursive pair substitution (NSRPS)
needed to reduce a symbol sequence to a constant one. Each pass replaces the
most frequent adjacent pair (non-overlapping, counted left to right; ties go
to the pair seen first) with a fresh symbol.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit


@dataclass(frozen=True)
class SymbolSequence:
    symbols: np.ndarray
    alphabet_size: int

    def __post_init__(self):
        s = np.asarray(self.symbols, dtype=np.int64)
        if s.ndim != 1 or s.size < 1:
            raise ValueError("symbol sequence must be 1-D and non-empty")
        if s.min() < 0:
            raise ValueError("symbols must be non-negative")
        if self.alphabet_size < 1 or s.max() >= self.alphabet_size:
            raise ValueError("every symbol must be below alphabet_size")
        object.__setattr__(self, "symbols", s)

    def __len__(self):
        return self.symbols.size

    @classmethod
    def of(cls, symbols: Sequence[int]) -> "SymbolSequence":
        s = np.asarray(symbols, dtype=np.int64)
        return cls(s, int(s.max()) + 1 if s.size else 1)


@dataclass(frozen=True)
class EtcResult:
    iterations: int
    normalized: float


def symbolize(series, bins: int, range: tuple[float, float] | None = None) -> SymbolSequence:
    """Equal-width binning into ``bins`` symbols.

    Without ``range`` the series' own min/max is used. Values at ``hi`` land in
    the top bin; values outside an explicit range are clipped to the edge bins.
    A constant series with no range maps to all zeros.
    """
    x = np.asarray(series, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("cannot symbolize an empty series")
    if bins < 2:
        raise ValueError("bins must be >= 2")
    if not np.all(np.isfinite(x)):
        raise ValueError("series must be finite")
    lo, hi = (x.min(), x.max()) if range is None else map(float, range)
    if hi < lo:
        raise ValueError("range must satisfy lo <= hi")
    if hi == lo:
        sym = np.where(x > hi, bins - 1, 0) if range is not None else np.zeros(x.size)
        return SymbolSequence(sym.astype(np.int64), bins)
    sym = np.floor((x - lo) / (hi - lo) * bins)
    return SymbolSequence(np.clip(sym, 0, bins - 1).astype(np.int64), bins)


@njit(cache=True)
def _is_constant(s, n):
    for i in range(1, n):
        if s[i] != s[0]:
            return False
    return True


@njit(cache=True)
def etc_iterations(seq):
    """Number of NSRPS passes for an int64 array (any non-negative labels)."""
    s = seq.copy()
    n = s.size
    if n == 0:
        return 0
    fresh = s.max() + 1
    it = 0
    keys = np.empty(n, dtype=np.int64)
    while n > 1 and not _is_constant(s, n):
        radix = fresh + 1
        m = n - 1
        for i in range(m):
            keys[i] = s[i] * radix + s[i + 1]
        order = np.argsort(keys[:m], kind="mergesort")
        # walk groups of equal keys; positions inside a group are ascending
        best_key = -1
        best_count = -1
        best_first = n
        g = 0
        while g < m:
            key = keys[order[g]]
            first = order[g]
            count = 0
            last = -2
            h = g
            while h < m and keys[order[h]] == key:
                pos = order[h]
                if pos != last + 1:
                    count += 1
                    last = pos
                h += 1
            if count > best_count or (count == best_count and first < best_first):
                best_count = count
                best_key = key
                best_first = first
            g = h
        a = best_key // radix
        b = best_key - a * radix
        j = 0
        i = 0
        while i < n:
            if i + 1 < n and s[i] == a and s[i + 1] == b:
                s[j] = fresh
                i += 2
            else:
                s[j] = s[i]
                i += 1
            j += 1
        n = j
        fresh += 1
        it += 1
    return it


@njit(cache=True)
def etc_normalized(seq):
    n = seq.size
    if n < 2:
        return 0.0
    return etc_iterations(seq) / (n - 1)


@njit(cache=True)
def joint_codes(streams, radix):
    """Collapse aligned rows of a (k, n) array of symbols < radix into one code."""
    k, n = streams.shape
    out = np.zeros(n, dtype=np.int64)
    for r in range(k):
        for i in range(n):
            out[i] = out[i] * radix + streams[r, i]
    return out


def etc(seq: SymbolSequence | Sequence[int]) -> EtcResult:
    s = seq.symbols if isinstance(seq, SymbolSequence) else np.asarray(seq, dtype=np.int64)
    if s.size == 0:
        raise ValueError("etc of an empty sequence")
    it = int(etc_iterations(s))
    return EtcResult(it, it / (s.size - 1) if s.size > 1 else 0.0)


def etc_joint(seqs: Sequence[SymbolSequence | Sequence[int]]) -> EtcResult:
    """ETC of the sequence of aligned tuples, each distinct tuple one symbol."""
    if len(seqs) < 2:
        raise ValueError("etc_joint needs at least two sequences; use etc for one")
    arrays = [s.symbols if isinstance(s, SymbolSequence) else np.asarray(s, dtype=np.int64)
              for s in seqs]
    lengths = {a.size for a in arrays}
    if len(lengths) != 1:
        raise ValueError(f"etc_joint length mismatch: {sorted(lengths)}")
    if 0 in lengths:
        raise ValueError("etc_joint of empty sequences")
    _, codes = np.unique(np.stack(arrays, axis=1), axis=0, return_inverse=True)
    return etc(codes.ravel().astype(np.int64))

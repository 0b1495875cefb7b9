"""Slow, independent reference implementations used only by the tests."""

import numpy as np


def count_nonoverlapping(seq, pair):
    i, c = 0, 0
    while i < len(seq) - 1:
        if (seq[i], seq[i + 1]) == pair:
            c += 1
            i += 2
        else:
            i += 1
    return c


def nsrps_oracle(seq):
    """Brute-force ETC: re-count every distinct pair from scratch each pass."""
    s = list(seq)
    passes = 0
    while len(s) > 1 and len(set(s)) > 1:
        pairs = []
        for i in range(len(s) - 1):
            p = (s[i], s[i + 1])
            if p not in pairs:
                pairs.append(p)  # first-appearance order
        counts = [count_nonoverlapping(s, p) for p in pairs]
        best = pairs[counts.index(max(counts))]
        new = max(s) + 1
        out, i = [], 0
        while i < len(s):
            if i < len(s) - 1 and (s[i], s[i + 1]) == best:
                out.append(new)
                i += 2
            else:
                out.append(s[i])
                i += 1
        s = out
        passes += 1
    return passes


def etc_norm_oracle(seq):
    return nsrps_oracle(seq) / (len(seq) - 1) if len(seq) > 1 else 0.0


def joint_oracle(rows):
    table = {}
    return [table.setdefault(t, len(table)) for t in zip(*rows)]


def cc_oracle(past, cur, conds):
    past, cur = list(past), list(cur)
    if not conds:
        return etc_norm_oracle(past + cur) - etc_norm_oracle(past)
    full = [past + cur] + [list(c) + cur for c in conds]
    base = [past] + [list(c) for c in conds]
    return etc_norm_oracle(joint_oracle(full)) - etc_norm_oracle(joint_oracle(base))


def bin_oracle(x, bins):
    lo, hi = min(x), max(x)
    if hi == lo:
        return [0] * len(x)
    out = []
    for v in x:
        b = int((v - lo) / (hi - lo) * bins)
        out.append(min(b, bins - 1))
    return out


def ccc_conditional_oracle(data, cause, effect, L, w, step, bins):
    """Plain loop over windows, global binning, everything in pure Python."""
    cols = [bin_oracle(list(data[:, i]), bins) for i in range(data.shape[1])]
    rest = [i for i in range(len(cols)) if i not in (cause, effect)]
    vals = []
    t = 0
    while t + L + w <= len(cols[0]):
        past = cols[effect][t:t + L]
        cur = cols[effect][t + L:t + L + w]
        rp = [cols[r][t:t + L] for r in rest]
        vals.append(cc_oracle(past, cur, rp) - cc_oracle(past, cur, rp + [cols[cause][t:t + L]]))
        t += step
    return sum(vals) / len(vals)


def henon_by_hand(x, y, n, a=1.4, b=0.3):
    rows = [(x, y)]
    for _ in range(n - 1):
        x, y = 1 - a * x * x + y, b * x
        rows.append((x, y))
    return np.array(rows)


def jacobian_diagonal(func, state, params, h=1e-6):
    """Central finite differences of each component w.r.t. itself."""
    state = np.asarray(state, dtype=float)
    diag = []
    for i in range(state.size):
        e = np.zeros_like(state)
        e[i] = h
        diag.append((func(state + e, params)[i] - func(state - e, params)[i]) / (2 * h))
    return np.array(diag)

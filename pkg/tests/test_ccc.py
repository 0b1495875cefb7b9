import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causync.ccc import (
    DEFAULT_PARAMS,
    CccParams,
    cc_conditional,
    ccc_conditional,
    ccc_matrix,
    ccc_net,
    ccc_pairwise,
    ccc_windows_symbols,
)
from causync.dynsys import Trajectory, builtin_system, integrate

from oracles import cc_oracle, ccc_conditional_oracle

SMALL = CccParams(40, 10, 20, 8)


@pytest.fixture(scope="module")
def lorenz():
    return integrate(builtin_system("lorenz"), (3, 4, 6), 600, 2000)


@pytest.fixture(scope="module")
def henon():
    return integrate(builtin_system("henon"), (0.1, 0.1), 400, 100)


def tent(x, b=0.48):
    return x / b if x < b else (1 - x) / (1 - b)


def coupled_tents(eps, n=2500, seed=0):
    rng = np.random.default_rng(seed)
    x, y = np.empty(n), np.empty(n)
    x[0], y[0] = rng.random(2)
    for t in range(1, n):
        x[t] = tent(x[t - 1])
        y[t] = eps * x[t - 1] + (1 - eps) * tent(y[t - 1])
    return x[500:], y[500:]


def test_params_validation():
    with pytest.raises(ValueError):
        CccParams(10, 15, 1, 8)
    with pytest.raises(ValueError):
        CccParams(10, 5, 0, 8)
    with pytest.raises(ValueError):
        CccParams(10, 5, 1, 1)


def test_default_params():
    assert DEFAULT_PARAMS["lorenz"].as_tuple() == (150, 15, 80, 8)
    assert DEFAULT_PARAMS["rossler"].as_tuple() == (300, 15, 200, 8)
    assert DEFAULT_PARAMS["lorenz5d"].as_tuple() == (450, 80, 300, 4)
    assert DEFAULT_PARAMS["chen"].as_tuple() == DEFAULT_PARAMS["henon"].as_tuple() == (100, 15, 80, 8)


@given(st.integers(1, 2000), st.integers(1, 200), st.integers(1, 200), st.integers(1, 300))
@settings(deadline=None)
def test_window_count_formula(n, L, w, step):
    if L < w:
        L, w = w, L
    p = CccParams(L, w, step, 4)
    expected = (n - L - w) // step + 1 if n >= L + w else 0
    assert p.n_windows(n) == expected
    if expected:
        sym = np.zeros((2, n), dtype=np.int64)
        assert ccc_windows_symbols(sym, 0, 1, p).size == expected


def test_cc_constant_is_zero():
    assert cc_conditional([2, 2], [2, 2, 2, 2]) == 0.0


def test_cc_hand_trace():
    # [0,1,0,1,0,1] -> [2,2,2]: 1/5; [0,1,0,1] -> [2,2]: 1/3
    assert cc_conditional([0, 1], [0, 1, 0, 1]) == pytest.approx(1 / 5 - 1 / 3)
    assert cc_conditional([0, 1], [0, 1, 0, 1]) == pytest.approx(cc_oracle([0, 1, 0, 1], [0, 1], []))


@given(st.lists(st.integers(0, 3), min_size=12, max_size=12),
       st.lists(st.integers(0, 3), min_size=8, max_size=8))
def test_duplicated_stream_invariance(seq, cond):
    past, cur = seq[:8], seq[8:]
    assert cc_conditional(cur, past, [past]) == cc_conditional(cur, past)
    assert cc_conditional(cur, past, [cond, past]) == cc_conditional(cur, past, [cond])


@given(st.lists(st.integers(0, 3), min_size=14, max_size=14),
       st.lists(st.integers(0, 3), min_size=10, max_size=10),
       st.lists(st.integers(0, 3), min_size=10, max_size=10))
def test_cc_matches_oracle(seq, c1, c2):
    past, cur = seq[:10], seq[10:]
    for conds in ([], [c1], [c1, c2]):
        assert cc_conditional(cur, past, conds) == pytest.approx(cc_oracle(past, cur, conds), abs=1e-15)


def test_cc_length_errors():
    with pytest.raises(ValueError):
        cc_conditional([0, 1], [0, 1, 0], [[0, 1]])


def test_pairwise_identical_series_golden(lorenz):
    x = lorenz.samples[:, 0]
    # frozen from the pure-Python oracle
    assert ccc_pairwise(x, x, SMALL) == 0.0


def test_pairwise_constant_series_zero():
    assert ccc_pairwise(np.ones(300), np.ones(300), SMALL) == 0.0


def test_pairwise_too_short():
    with pytest.raises(ValueError, match="too short"):
        ccc_pairwise(np.arange(30.0), np.arange(30.0), SMALL)


@pytest.mark.parametrize("eps", [0.4, 0.5, 0.6])
def test_coupled_tent_maps_negative(eps):
    x, y = coupled_tents(eps)
    assert ccc_pairwise(x, y, CccParams(150, 15, 80, 8)) < 0


def test_conditional_matches_oracle_lorenz(lorenz):
    # frozen from oracles.ccc_conditional_oracle(lorenz.samples, 2, 0, 40, 10, 20, 8)
    golden = -0.01390446288405471
    assert ccc_conditional(2, 0, lorenz, SMALL) == pytest.approx(golden, abs=1e-15)


def test_conditional_matches_oracle_henon(henon):
    golden = -0.06953892668178382
    assert ccc_conditional(0, 1, henon, SMALL) == pytest.approx(golden, abs=1e-15)


@pytest.mark.parametrize("cause,effect", [(0, 1), (1, 2), (2, 1)])
def test_conditional_oracle_live(lorenz, cause, effect):
    sub = lorenz.samples[:200]
    expected = ccc_conditional_oracle(sub, cause, effect, 40, 10, 20, 8)
    assert ccc_conditional(cause, effect, sub, SMALL) == pytest.approx(expected, abs=1e-15)


def test_two_columns_equals_pairwise(henon):
    a = ccc_conditional(0, 1, henon, SMALL)
    b = ccc_pairwise(henon.samples[:, 0], henon.samples[:, 1], SMALL)
    assert a == b


def test_cause_equals_effect_rejected(lorenz):
    with pytest.raises(ValueError):
        ccc_conditional(1, 1, lorenz, SMALL)


def test_constant_cause_matches_oracle(lorenz):
    # the appended target block makes a constant cause informative, so this is not ~0
    s = lorenz.samples[:200].copy()
    s[:, 2] = 5.0
    for effect in (0, 1):
        expected = ccc_conditional_oracle(s, 2, effect, 40, 10, 20, 8)
        assert ccc_conditional(2, effect, s, SMALL) == pytest.approx(expected, abs=1e-15)


def test_net_symmetric_input_zero(lorenz):
    x = lorenz.samples[:, :1]
    tr = Trajectory(np.hstack([x, x, x]))
    for v in range(3):
        assert ccc_net(v, tr, SMALL).net == 0.0
    m = ccc_matrix(tr, SMALL)
    off = m.values[~np.eye(3, dtype=bool)]
    assert np.all(off == off[0])


def test_matrix_diagonal_and_shape(henon):
    m = ccc_matrix(henon, SMALL)
    assert m.values.shape == (2, 2)
    assert np.all(np.diag(m.values) == 0)
    assert m.variable_names == ("x", "y")


def test_net_decomposition_identity(lorenz):
    m = ccc_matrix(lorenz, SMALL)
    net = m.net()
    for v in range(3):
        entry = ccc_net(v, lorenz, SMALL)
        assert abs(entry.net - net[v]) <= 1e-12
        assert abs(m.net_report()[v].net - net[v]) <= 1e-12
        for u, val in entry.outgoing.items():
            assert val == m.values[u, v]
        for u, val in entry.incoming.items():
            assert val == m.values[v, u]


def test_two_column_net_is_antisymmetric(henon):
    a = ccc_net(0, henon, SMALL).net
    b = ccc_net(1, henon, SMALL).net
    assert a == -b


def test_determinism(lorenz):
    a = ccc_matrix(lorenz, SMALL).values
    b = ccc_matrix(lorenz, SMALL).values
    assert a.tobytes() == b.tobytes()


def test_matrix_to_dict(henon):
    d = ccc_matrix(henon, SMALL).to_dict()
    assert d["variables"] == ["x", "y"]
    assert d["matrix"]["x"][0] == 0.0 and d["matrix"]["y"][1] == 0.0
    assert set(d["net"]) == {"x", "y"}

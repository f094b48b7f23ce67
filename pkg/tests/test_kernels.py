import numpy as np
import pytest

import homsample as hs
from homsample import _kernels

from util import random_graph

pytestmark = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba unavailable")


def test_backend_resolution(monkeypatch):
    monkeypatch.delenv(_kernels.BACKEND_ENV_VAR, raising=False)
    assert _kernels.resolve_backend(None) == "numba"
    monkeypatch.setenv(_kernels.BACKEND_ENV_VAR, "numpy")
    assert _kernels.resolve_backend(None) == "numpy"
    assert _kernels.resolve_backend("numba") == "numba"  # explicit overrides env
    with pytest.raises(ValueError):
        _kernels.resolve_backend("fortran")


def test_edge_distance_sum_backends_agree():
    rng = np.random.default_rng(0)
    for _ in range(10):
        n = int(rng.integers(2, 80))
        g = random_graph(rng, n, rng.uniform(0.0, 0.4))
        x = rng.standard_normal((n, int(rng.integers(1, 12))))
        a = _kernels.edge_distance_sum(g.indptr, g.indices, x, backend="numba")
        b = _kernels.edge_distance_sum(g.indptr, g.indices, x, backend="numpy")
        assert a == pytest.approx(b, rel=1e-9, abs=1e-12)


def test_edge_distance_sum_numpy_chunked_path():
    rng = np.random.default_rng(1)
    g = random_graph(rng, 400, 0.5)  # ~40k undirected edges > chunk size
    assert g.m > _kernels._CHUNK
    x = rng.standard_normal((400, 3))
    a = _kernels.edge_distance_sum(g.indptr, g.indices, x, backend="numba")
    b = _kernels.edge_distance_sum(g.indptr, g.indices, x, backend="numpy")
    assert a == pytest.approx(b, rel=1e-9)


def test_component_labels_backends_identical():
    rng = np.random.default_rng(2)
    for _ in range(10):
        n = int(rng.integers(1, 100))
        g = random_graph(rng, n, rng.uniform(0.0, 0.08))
        ca, la = _kernels.component_labels(g.indptr, g.indices, backend="numba")
        cb, lb = _kernels.component_labels(g.indptr, g.indices, backend="numpy")
        assert ca == cb
        assert np.array_equal(la, lb)


def test_greedy_order_backends_identical():
    rng = np.random.default_rng(3)
    for _ in range(10):
        n = int(rng.integers(3, 60))
        g = random_graph(rng, n, rng.uniform(0.05, 0.4))
        k = int(rng.integers(1, n))
        a = _kernels.greedy_min_degree_order(g.indptr, g.indices, k, backend="numba")
        b = _kernels.greedy_min_degree_order(g.indptr, g.indices, k, backend="numpy")
        assert np.array_equal(a, b)


def test_env_flag_flows_through_public_api(monkeypatch):
    rng = np.random.default_rng(4)
    g = random_graph(rng, 50, 0.2)
    xh = hs.normalize_features(rng.standard_normal((50, 4)))
    monkeypatch.setenv(_kernels.BACKEND_ENV_VAR, "numpy")
    h_np = hs.feature_homophily(g, xh)
    monkeypatch.setenv(_kernels.BACKEND_ENV_VAR, "numba")
    h_nb = hs.feature_homophily(g, xh)
    assert h_np == pytest.approx(h_nb, rel=1e-9)


def test_warmup_both_backends():
    _kernels.warmup("numba")
    _kernels.warmup("numpy")

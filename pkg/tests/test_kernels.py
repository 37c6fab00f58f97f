"""Backend parity: the compiled kernels must match the numpy fallback
bit for bit on identical inputs."""

import numpy as np
import pytest

from trawl.kernels import (
    K_DEEPWALK,
    K_KHOP,
    K_MULTIRW,
    K_NODE2VEC,
    K_PPR,
    _pykernels,
)
from trawl.synth import powerlaw_graph

try:
    from trawl.kernels import _ckernels
except ImportError:
    _ckernels = None

needs_compiled = pytest.mark.skipif(_ckernels is None,
                                    reason="compiled kernels not built")


@pytest.fixture(scope="module")
def graph():
    return powerlaw_graph(400, weighted=True, seed=8)


def random_items(graph, n, rng, with_prev=False):
    transits = rng.integers(0, graph.n_vertices, n).astype(np.int64)
    if with_prev:
        # previous vertex: a random neighbor of each transit where one
        # exists, else -1
        t_prev = np.full(n, -1, dtype=np.int64)
        for i, v in enumerate(transits):
            nbrs = graph.neighbors(int(v))
            if len(nbrs) and rng.random() < 0.9:
                t_prev[i] = int(nbrs.vertices[rng.integers(0, len(nbrs))])
    else:
        t_prev = np.full(n, -1, dtype=np.int64)
    return (transits, t_prev,
            rng.integers(0, 10_000, n).astype(np.int64),   # sample ids
            rng.integers(0, 30, n).astype(np.int64),        # transit idxs
            rng.integers(0, 30, n).astype(np.int64))        # slots


PARAMS = {
    K_DEEPWALK: np.zeros(0),
    K_PPR: np.asarray([0.05]),
    K_NODE2VEC: np.asarray([2.0, 0.5, 0.0]),
    K_KHOP: np.zeros(0),
    K_MULTIRW: np.zeros(0),
}


@needs_compiled
@pytest.mark.parametrize("code", sorted(PARAMS))
def test_backend_parity(code, graph):
    rng = np.random.default_rng(code)
    transits, t_prev, sids, tidx, slots = random_items(
        graph, 5000, rng, with_prev=(code == K_NODE2VEC))
    outs = {}
    for name, backend in [("py", _pykernels), ("c", _ckernels)]:
        out = np.empty(len(transits), dtype=np.int64)
        backend.individual_batch(code, PARAMS[code],
                                 graph.row_offsets, graph.col_indices,
                                 graph.weights, graph.per_vertex_weight_prefix,
                                 graph.per_vertex_max_weight,
                                 transits, t_prev, sids, tidx, slots,
                                 123, 2, out)
        outs[name] = out
    assert np.array_equal(outs["py"], outs["c"])


@needs_compiled
def test_segmented_prefix_parity(graph):
    py = _pykernels.segmented_prefix_sum(graph.weights, graph.row_offsets)
    c = _ckernels.segmented_prefix_sum(graph.weights, graph.row_offsets)
    assert np.array_equal(py, c)


@needs_compiled
def test_segment_max_parity(graph):
    py = _pykernels.segment_max(graph.weights, graph.row_offsets)
    c = _ckernels.segment_max(graph.weights, graph.row_offsets)
    assert np.array_equal(py, c)


def test_searchsorted_segments_matches_numpy(graph):
    rng = np.random.default_rng(4)
    n = 2000
    v = rng.integers(0, graph.n_vertices, n).astype(np.int64)
    lo = graph.row_offsets[v]
    hi = graph.row_offsets[v + 1]
    x = rng.random(n) * 10
    got = _pykernels.searchsorted_right_segments(
        graph.per_vertex_weight_prefix, lo, hi, x)
    for i in range(n):
        seg = graph.per_vertex_weight_prefix[lo[i]:hi[i]]
        assert got[i] - lo[i] == np.searchsorted(seg, x[i], side="right")


def test_segment_contains_oracle(graph):
    rng = np.random.default_rng(9)
    n = 3000
    v = rng.integers(0, graph.n_vertices, n).astype(np.int64)
    lo = graph.row_offsets[v]
    hi = graph.row_offsets[v + 1]
    targets = rng.integers(0, graph.n_vertices, n).astype(np.int64)
    got = _pykernels.segment_contains(graph.col_indices, lo, hi, targets)
    for i in range(n):
        seg = graph.col_indices[lo[i]:hi[i]]
        assert bool(got[i]) == (int(targets[i]) in seg.tolist())


def test_segmented_prefix_oracle(graph):
    prefix = _pykernels.segmented_prefix_sum(graph.weights, graph.row_offsets)
    for vtx in range(0, graph.n_vertices, 37):
        lo, hi = int(graph.row_offsets[vtx]), int(graph.row_offsets[vtx + 1])
        if hi > lo:
            assert np.array_equal(prefix[lo:hi], np.cumsum(graph.weights[lo:hi]))


def test_pure_python_env_override(monkeypatch):
    # the env knob forces the fallback backend at import time
    import subprocess
    import sys

    code = ("import trawl.kernels as k; "
            "print(k.BACKEND_NAME)")
    out = subprocess.run([sys.executable, "-c", code],
                         env={"TRAWL_PURE_PYTHON": "1", "PATH": "/usr/bin:/bin"},
                         capture_output=True, text=True)
    assert out.stdout.strip() == "python"

import numpy as np
import pytest

from trawl.apps import make_app
from trawl.core import NULL_VERTEX, Sample
from trawl.engine import EngineConfig, make_samples, tp_run
from trawl.engine.collective import build_combined
from trawl.engine.driver import RunStats
from trawl.graph import from_edges


@pytest.fixture
def two_transit_graph():
    """a=0 with neighbors {3,4}; b=1 with neighbors {3,5,6}; 2 isolated."""
    src = [0, 0, 1, 1, 1]
    dst = [3, 4, 3, 5, 6]
    w = [1.0, 2.0, 3.0, 4.0, 5.0]
    return from_edges(src, dst, w, n_vertices=7)


def layer_sample(graph, roots, transits):
    app = make_app("layer")
    s = Sample(0, np.asarray(roots, dtype=np.int64), graph)
    s.step_vertices.append(np.asarray(transits, dtype=np.int64))
    return app, s


def test_concatenation_order(two_transit_graph):
    app, s = layer_sample(two_transit_graph, [0], [0, 1])
    nbs = build_combined(app, two_transit_graph, [s], 1, 0, "sp")
    nb = nbs[0]
    assert len(nb) == 5  # deg(a)=2 then deg(b)=3
    assert nb.src_transits.tolist() == [0, 0, 1, 1, 1]
    assert nb.neighbors.tolist() == [3, 4, 3, 5, 6]
    assert nb.weights.tolist() == [1.0, 2.0, 3.0, 4.0, 5.0]


def test_entry_count_identity(two_transit_graph):
    app, s = layer_sample(two_transit_graph, [0], [1, 1, 0])
    nbs = build_combined(app, two_transit_graph, [s], 1, 0, "tp")
    degs = [two_transit_graph.degree(int(t)) for t in s.vertices_at(0)]
    assert len(nbs[0]) == sum(degs)


def test_shared_transit_single_fetch(two_transit_graph):
    app = make_app("layer")
    samples = []
    for i in range(2):
        s = Sample(i, np.asarray([0]), two_transit_graph)
        s.step_vertices.append(np.asarray([0], dtype=np.int64))
        samples.append(s)
    stats = RunStats(paradigm="tp", n_samples=2)
    nbs = build_combined(app, two_transit_graph, samples, 1, 0, "tp", stats)
    assert stats.adjacency_fetches == 1  # one distinct transit
    assert nbs[0].neighbors.tolist() == nbs[1].neighbors.tolist() == [3, 4]

    stats_sp = RunStats(paradigm="sp", n_samples=2)
    build_combined(app, two_transit_graph, samples, 1, 0, "sp", stats_sp)
    assert stats_sp.adjacency_fetches == 2


def test_zero_degree_transits_empty(two_transit_graph):
    app, s = layer_sample(two_transit_graph, [2], [2])
    nbs = build_combined(app, two_transit_graph, [s], 1, 0, "tp")
    assert len(nbs[0]) == 0


def test_sp_tp_identical_entries(small_powerlaw):
    app = make_app("layer")
    for engine in ("sp", "tp"):
        samples = make_samples(app, small_powerlaw, 5, seed=3)
        for s in samples:
            s.step_vertices.append(s.roots.copy())
        results = build_combined(app, small_powerlaw, samples, 1, 0, engine)
        if engine == "sp":
            sp_entries = [(nb.src_transits.tolist(), nb.neighbors.tolist(),
                           nb.weights.tolist()) for nb in results]
        else:
            tp_entries = [(nb.src_transits.tolist(), nb.neighbors.tolist(),
                           nb.weights.tolist()) for nb in results]
    assert sp_entries == tp_entries


def test_layer_gains_bounded(small_powerlaw):
    app = make_app("layer", max_size=50, step_size=2)
    samples = make_samples(app, small_powerlaw, 6, seed=9)
    out = tp_run(app, small_powerlaw, samples, EngineConfig(seed=9))
    for s in out.samples:
        for sv in s.step_vertices:
            assert len(sv) == 2  # m slots per step
        assert s.size() <= 50


def test_layer_empty_neighborhood_dies(two_transit_graph):
    app = make_app("layer", max_size=100, step_size=3)
    app.init_roots = lambda g, sid, seed: np.asarray([2], dtype=np.int64)
    samples = make_samples(app, two_transit_graph, 1, seed=0)
    out = tp_run(app, two_transit_graph, samples, EngineConfig(seed=0))
    s = out.samples[0]
    assert len(s.step_vertices) == 1
    assert s.step_vertices[0].tolist() == [NULL_VERTEX] * 3
    assert out.n_steps == 1

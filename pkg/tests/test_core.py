import numpy as np

from trawl.apps import make_app
from trawl.core import (
    NULL_VERTEX,
    Sample,
    is_alive,
    step_transits,
    transit_count,
)
from trawl.engine import EngineConfig, make_samples, sp_run


def walk_sample(vertices, roots=(0,)):
    s = Sample(0, np.asarray(roots, dtype=np.int64))
    for v in vertices:
        s.step_vertices.append(np.asarray([v], dtype=np.int64))
    return s


def test_transit_count_single_chain():
    app = make_app("deepwalk")
    s = walk_sample([3, 4, 5])
    for step in range(4):
        assert transit_count(app, s, step) == 1


def test_transit_count_khop_fanout():
    app = make_app("khop")
    s = Sample(0, np.asarray([0]))
    s.step_vertices.append(np.arange(1, 26, dtype=np.int64))  # 25 non-NULL
    assert transit_count(app, s, 1) == 25


def test_transit_count_all_null_step():
    app = make_app("deepwalk")
    s = walk_sample([3, NULL_VERTEX])
    assert transit_count(app, s, 2) == 0
    assert not is_alive(app, s, 2)


def test_is_alive_examples():
    ppr = make_app("ppr")
    s = walk_sample(list(range(1, 8)) + [NULL_VERTEX])  # NULL at step 7
    assert not is_alive(ppr, s, 8)

    deepwalk = make_app("deepwalk")  # fixed k=100
    long_walk = walk_sample(list(range(1, 101)))
    assert not is_alive(deepwalk, long_walk, 100)
    assert is_alive(deepwalk, long_walk, 99)

    fresh = Sample(0, np.asarray([5]))
    assert is_alive(deepwalk, fresh, 0)


def test_step_cap_bounds_aliveness():
    ppr = make_app("ppr")
    s = walk_sample([1, 2, 3])
    assert not is_alive(ppr, s, 2, step_cap=2)


def test_step_transits_pure():
    app = make_app("multirw", roots_per_sample=4)
    s = Sample(3, np.asarray([10, 11, 12, 13]))
    a = step_transits(app, s, 0, seed=9)
    b = step_transits(app, s, 0, seed=9)
    assert np.array_equal(a, b)
    assert a[0] in s.roots


def test_prev_vertex_accessors(two_neighbor_graph):
    s = walk_sample([4, 7], roots=(2,))
    s.graph = two_neighbor_graph
    s.step = 2
    assert s.prev_vertex(1, 0) == 7
    assert s.prev_vertex(2, 0) == 4
    s.step = 1
    assert s.prev_vertex(2, 0) == 2  # roots behave as step -1


def test_chain_storage_equivalent():
    s = Sample(0, np.asarray([9]))
    s.set_chain(np.asarray([3, 4, NULL_VERTEX], dtype=np.int64))
    assert s.total_sampled() == 2
    assert s.size() == 3
    assert s.final_vertices().tolist() == [9, 3, 4]
    assert s.vertices_at(2).tolist() == []
    assert [sv.tolist() for sv in s.step_vertices] == [[3], [4], [NULL_VERTEX]]


def test_growth_bound(small_powerlaw):
    app = make_app("khop")
    samples = make_samples(app, small_powerlaw, 5, seed=1)
    out = sp_run(app, small_powerlaw, samples, EngineConfig(seed=1))
    for s in out.samples:
        sizes = [len(sv) for sv in s.step_vertices]
        assert sizes[0] <= 1 * 25
        if len(sizes) > 1:
            n_transits = len(s.vertices_at(0))
            assert sizes[1] <= n_transits * 10

import numpy as np
import pytest

from trawl.apps import APP_NAMES, make_app
from trawl.core import Sample, SamplingApp
from trawl.engine import EngineConfig, make_samples, sp_run, tp_run
from trawl.errors import ContractViolationError
from trawl.output import render_text
from trawl.synth import cycle_graph, powerlaw_graph, star_graph


def text_of(out):
    return render_text(out, "final")


def counting_app(base, calls):
    """Wrap an app's next so every invocation is recorded."""

    def next_fn(sample, transits, src_edges, step, rng):
        calls.append((sample.id, rng.transit_idx, rng.slot, step))
        return base.next_fn(sample, transits, src_edges, step, rng)

    wrapped = SamplingApp(**{**base.__dict__, "next_fn": next_fn,
                             "kernel_code": None, "chain_walk": False})
    return wrapped


def test_next_call_count_three_samples(two_neighbor_graph):
    # 3 samples x 1 transit x m=2 slots -> exactly 6 next calls
    calls = []
    app = counting_app(make_app("khop", fanouts=[2]), calls)
    samples = [Sample(i, np.asarray([0])) for i in range(3)]
    sp_run(app, two_neighbor_graph, samples, EngineConfig(seed=1))
    assert len(calls) == 6


def test_two_hop_slot_layout(small_powerlaw):
    # second step of a 2-hop, 2-per-step app: 2 transits x 2 slots each
    app = make_app("khop", fanouts=[2, 2])
    samples = make_samples(app, small_powerlaw, 4, seed=5)
    out = sp_run(app, small_powerlaw, samples, EngineConfig(seed=5))
    for s in out.samples:
        assert len(s.step_vertices[0]) == 2
        if len(s.step_vertices) > 1 and len(s.vertices_at(0)) == 2:
            assert len(s.step_vertices[1]) == 4


@pytest.mark.parametrize("engine", [sp_run, tp_run])
def test_slot_coverage_exactly_once(engine, small_powerlaw):
    calls = []
    app = counting_app(make_app("khop", fanouts=[3, 2]), calls)
    samples = make_samples(app, small_powerlaw, 6, seed=2)
    engine(app, small_powerlaw, samples, EngineConfig(seed=2))

    step0 = [c for c in calls if c[3] == 0]
    assert sorted(step0) == sorted((s.id, 0, slot, 0)
                                   for s in samples for slot in range(3))
    step1 = [c for c in calls if c[3] == 1]
    expected = []
    for s in samples:
        for ti in range(len(s.vertices_at(0))):
            for slot in range(2):
                expected.append((s.id, ti, slot, 1))
    assert sorted(step1) == sorted(expected)


def test_finished_samples_get_no_calls(triangle_graph):
    calls = []
    app = counting_app(make_app("deepwalk", walk_length=10), calls)
    samples = [Sample(0, np.asarray([2]))]  # vertex 2 is a sink
    out = sp_run(app, triangle_graph, samples, EngineConfig(seed=0))
    assert len(calls) == 1  # step 0 returns NULL, then the sample is dead
    assert out.samples[0].total_sampled() == 0
    assert out.samples[0].vertices_at(0).tolist() == []


@pytest.mark.parametrize("app_name", APP_NAMES)
@pytest.mark.parametrize("graph_fn,n", [(cycle_graph, 300),
                                        (powerlaw_graph, 300)])
def test_cross_engine_object_mode(app_name, graph_fn, n):
    g = graph_fn(n, weighted=True, seed=4)
    texts = {}
    for engine, label in [(sp_run, "sp"), (tp_run, "tp")]:
        app = make_app(app_name)
        samples = make_samples(app, g, 6, seed=13)
        out = engine(app, g, samples, EngineConfig(seed=13, use_kernels=False))
        texts[label] = text_of(out)
    assert texts["sp"] == texts["tp"]


@pytest.mark.parametrize("app_name", ["deepwalk", "ppr", "node2vec",
                                      "multirw", "khop", "layer"])
def test_kernel_equals_object_mode(app_name, small_powerlaw):
    # batch execution (compiled kernels / vectorized selection) against
    # the per-slot Python callback path
    texts = {}
    for kern in (True, False):
        app = make_app(app_name)
        samples = make_samples(app, small_powerlaw, 6, seed=21)
        out = tp_run(app, small_powerlaw, samples,
                     EngineConfig(seed=21, use_kernels=kern))
        texts[kern] = text_of(out)
    assert texts[True] == texts[False]


def test_deepwalk_full_length_on_ring():
    g = cycle_graph(500, weighted=True, seed=1)
    app = make_app("deepwalk")
    samples = make_samples(app, g, 20, seed=3)
    out = tp_run(app, g, samples, EngineConfig(seed=3))
    for s in out.samples:
        assert s.total_sampled() == 100


def test_khop_counts_on_dead_end_free_graph():
    g = powerlaw_graph(1000, weighted=False, seed=6)  # symmetrized: no sinks
    app = make_app("khop")
    samples = make_samples(app, g, 10, seed=4)
    out = tp_run(app, g, samples, EngineConfig(seed=4))
    for s in out.samples:
        assert len(s.vertices_at(0)) == 25
        assert len(s.vertices_at(1)) == 250


def test_empty_sample_set(small_powerlaw):
    app = make_app("deepwalk")
    out = tp_run(app, small_powerlaw, [], EngineConfig(seed=0))
    assert out.samples == []
    assert text_of(out) == "# layout=final\n"


@pytest.mark.parametrize("engine", [sp_run, tp_run])
@pytest.mark.parametrize("app_name", ["khop", "layer", "deepwalk"])
def test_worker_count_invariance(engine, app_name, small_powerlaw):
    texts = set()
    for workers in (1, 2, 8):
        app = make_app(app_name)
        samples = make_samples(app, small_powerlaw, 12, seed=8)
        out = engine(app, small_powerlaw, samples,
                     EngineConfig(seed=8, n_workers=workers))
        texts.add(text_of(out))
    assert len(texts) == 1


def test_rerun_is_deterministic(small_powerlaw):
    texts = set()
    for _ in range(2):
        app = make_app("node2vec")
        samples = make_samples(app, small_powerlaw, 8, seed=77)
        out = tp_run(app, small_powerlaw, samples, EngineConfig(seed=77))
        texts.add(text_of(out))
    assert len(texts) == 1


def test_tp_fetches_at_most_groups(small_powerlaw):
    app = make_app("khop")
    samples = make_samples(app, small_powerlaw, 40, seed=10)
    out = tp_run(app, small_powerlaw, samples, EngineConfig(seed=10))
    small, medium, large = out.stats.group_totals()
    assert out.stats.adjacency_fetches == small + medium + large


def test_tp_fewer_fetches_than_sp(small_powerlaw):
    fetches = {}
    for engine, label in [(sp_run, "sp"), (tp_run, "tp")]:
        app = make_app("khop")
        samples = make_samples(app, small_powerlaw, 40, seed=10)
        out = engine(app, small_powerlaw, samples, EngineConfig(seed=10))
        fetches[label] = out.stats.adjacency_fetches
    assert fetches["tp"] < fetches["sp"]


def test_unbounded_app_step_cap_warns(ring_1000):
    app = make_app("ppr", termination_probability=0.0001)  # walks outlive cap
    samples = make_samples(app, ring_1000, 4, seed=1)
    with pytest.warns(RuntimeWarning, match="step cap"):
        out = tp_run(app, ring_1000, samples, EngineConfig(seed=1, step_cap=50))
    assert out.n_steps == 50


def test_step_transit_contract_violation(small_powerlaw):
    app = make_app("khop", fanouts=[2])

    def bad_transits(app_, sample, step, seed):
        return np.asarray([sample.roots[0] + 1])  # not in the sample

    app.step_transits_fn = bad_transits
    app.kernel_code = None
    samples = [Sample(0, np.asarray([3]))]
    with pytest.raises(ContractViolationError):
        sp_run(app, small_powerlaw, samples, EngineConfig(seed=0))


def test_unique_fallback_routing():
    # a unique step that leaves fewer distinct vertices than the next
    # step size flags samples for sample-parallel processing; outputs
    # stay identical across engines either way
    g = cycle_graph(40, weighted=True, seed=2)  # degree 1: dedup leaves 1

    def build():
        app = make_app("khop", fanouts=[12, 4])
        app.unique = lambda step: step == 0
        app.kernel_code = None
        return app

    texts = {}
    for engine, label in [(sp_run, "sp"), (tp_run, "tp")]:
        app = build()
        samples = make_samples(app, g, 10, seed=14)
        out = engine(app, g, samples, EngineConfig(seed=14))
        # every sample was deduped to a single vertex, below the next
        # step size, so the tp engine routed them sample-parallel
        assert all(len(s.vertices_at(0)) == 1 for s in out.samples)
        assert all(len(s.vertices_at(1)) == 4 for s in out.samples)
        texts[label] = text_of(out)
    assert texts["sp"] == texts["tp"]


def test_star_graph_single_giant_group():
    g = star_graph(200)
    app = make_app("khop", fanouts=[2, 2])
    # force every sample to root at the hub
    app.init_roots = lambda graph, sid, seed: np.asarray([0], dtype=np.int64)
    samples = make_samples(app, g, 30, seed=1)
    out = tp_run(app, g, samples, EngineConfig(seed=1))
    t0 = out.stats.timings[0]
    assert (t0.groups_small + t0.groups_medium + t0.groups_large) == 1
    assert out.stats.timings[0].groups_medium == 1  # 30 samples * m=2 -> work 60

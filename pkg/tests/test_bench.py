import numpy as np
import pytest

from trawl.bench import (
    RunConfig,
    compare_paradigms,
    multi_worker_run,
    run,
    run_single,
    split_ranges,
    validate_distributions,
)
from trawl.output import LAYOUT_FINAL, render_text
from trawl.synth import make_synthetic, path_graph, powerlaw_graph, star_graph


def test_split_ranges_sizes():
    assert [hi - lo for lo, hi in split_ranges(10, 4)] == [3, 3, 2, 2]
    assert split_ranges(10, 4) == [(0, 3), (3, 6), (6, 8), (8, 10)]
    assert split_ranges(3, 8) == [(0, 1), (1, 2), (2, 3)]
    assert split_ranges(0, 4) == [(0, 0)]
    for n, w in [(17, 4), (100, 7), (5, 5)]:
        ranges = split_ranges(n, w)
        sizes = [hi - lo for lo, hi in ranges]
        assert sum(sizes) == n
        assert max(sizes) - min(sizes) <= 1


@pytest.mark.parametrize("workers", [1, 2, 4, 8])
def test_multi_worker_union_equals_single(workers, small_powerlaw):
    base = RunConfig(app="khop", paradigm="tp", num_samples=10, seed=6)
    single = run_single(base, small_powerlaw)
    cfg = RunConfig(**{**base.__dict__, "workers": workers})
    multi = multi_worker_run(cfg, small_powerlaw)
    assert render_text(multi, LAYOUT_FINAL) == render_text(single, LAYOUT_FINAL)


def test_compare_paradigms_verifies_equality(small_powerlaw):
    cfg = RunConfig(app="khop", paradigm="tp", num_samples=20, seed=4)
    report = compare_paradigms(cfg, small_powerlaw)
    assert report.outputs_equal
    assert report.throughput_ratio_tp_over_sp > 0
    assert report.tp_report.stats.adjacency_fetches < \
        report.sp_report.stats.adjacency_fetches
    lines = "\n".join(report.lines())
    assert "fetch_ratio_sp_over_tp=" in lines
    assert "tp_build_index_share=" in lines


def test_report_arithmetic(small_powerlaw):
    cfg = RunConfig(app="deepwalk", paradigm="tp", num_samples=30, seed=2)
    output, report = run(cfg, small_powerlaw)
    s = output.stats
    assert s.build_s + s.sample_s <= s.total_s + 1e-6
    assert abs(sum(t.build_s for t in s.timings) - s.build_s) < 1e-9
    text = "\n".join(report.lines())
    assert f"steps={s.n_steps}" in text
    assert "throughput_samples_per_s=" in text


def test_run_deterministic(small_powerlaw):
    cfg = RunConfig(app="node2vec", paradigm="tp", num_samples=12, seed=9)
    a, _ = run(cfg, small_powerlaw)
    b, _ = run(cfg, small_powerlaw)
    assert render_text(a, LAYOUT_FINAL) == render_text(b, LAYOUT_FINAL)


def test_validation_rows_pass(two_neighbor_graph, five_vertex_graph):
    rows = validate_distributions("deepwalk", two_neighbor_graph, draws=200_000)
    assert all(r.passed for r in rows)
    rows = validate_distributions("node2vec", five_vertex_graph, draws=200_000)
    assert all(r.passed for r in rows)
    rows = validate_distributions("khop", five_vertex_graph, draws=200_000)
    assert all(r.passed for r in rows)


def test_synthetic_generators():
    g = path_graph(10)
    assert g.degree(9) == 0 and g.degree(0) == 1
    g = star_graph(10)
    assert g.degree(0) == 9
    g = powerlaw_graph(200, attach=3, seed=1)
    assert (g.degrees() > 0).all()  # symmetrized: no dead ends
    degs = np.sort(g.degrees())[::-1]
    assert degs[0] > 3 * np.median(degs)  # heavy tail
    g = make_synthetic("cycle:50")
    assert g.n_vertices == 50 and (g.degrees() == 1).all()
    with pytest.raises(ValueError):
        make_synthetic("nosuch:5")


def test_synthetic_deterministic():
    a = powerlaw_graph(300, weighted=True, seed=12)
    b = powerlaw_graph(300, weighted=True, seed=12)
    assert np.array_equal(a.col_indices, b.col_indices)
    assert np.array_equal(a.weights, b.weights)

"""Run orchestration: configs, reports, multi-worker partitioning, the
paradigm comparison, and the statistical validation harness.

Throughput excludes graph loading; a run's report breaks each step into
schedule-build time and sampling time and carries the per-class group
counts plus instrumented adjacency-fetch counters.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats as scipy_stats

from .apps import make_app
from .core import DEFAULT_STEP_CAP
from .engine import EngineConfig, make_samples, sp_run, tp_run
from .errors import OutputMismatchError
from .graph import Graph, load_edge_list
from .output import LAYOUT_FINAL, SampleSetOutput, render_text
from .synth import make_synthetic


@dataclass
class RunConfig:
    app: str = "deepwalk"
    app_params: dict = field(default_factory=dict)
    paradigm: str = "tp"
    graph_path: Optional[str] = None
    synth: Optional[str] = None        # e.g. "powerlaw:10000"
    weighted: bool = False
    undirected: bool = False
    seed: int = 0
    num_samples: int = 1000
    workers: int = 1
    layout: str = LAYOUT_FINAL
    output_path: Optional[str] = None
    report_path: Optional[str] = None
    step_cap: int = DEFAULT_STEP_CAP
    use_kernels: bool = True

    def load_graph(self) -> Graph:
        if self.graph_path:
            return load_edge_list(self.graph_path, weighted=self.weighted,
                                  undirected=self.undirected, seed=self.seed)
        return make_synthetic(self.synth or "powerlaw:1000",
                              weighted=self.weighted, seed=self.seed)


@dataclass
class RunReport:
    """Flattened, machine-readable summary of one run."""

    config: RunConfig
    stats: object
    wall_s: float

    def lines(self) -> list[str]:
        s = self.stats
        small, medium, large = s.group_totals()
        out = [
            f"app={self.config.app}",
            f"paradigm={s.paradigm}",
            f"samples={s.n_samples}",
            f"seed={self.config.seed}",
            f"workers={self.config.workers}",
            f"steps={s.n_steps}",
            f"total_s={s.total_s:.6f}",
            f"build_s={s.build_s:.6f}",
            f"sample_s={s.sample_s:.6f}",
            f"build_share={s.build_s / s.total_s if s.total_s > 0 else 0.0:.4f}",
            f"throughput_samples_per_s={s.throughput():.2f}",
            f"adjacency_fetches={s.adjacency_fetches}",
            f"groups.small={small}",
            f"groups.medium={medium}",
            f"groups.large={large}",
        ]
        for t in s.timings:
            out.append(f"step.{t.step}.build_s={t.build_s:.6f}")
            out.append(f"step.{t.step}.sample_s={t.sample_s:.6f}")
        return out

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(self.lines()) + "\n")


def _engine_for(paradigm: str):
    if paradigm == "sp":
        return sp_run
    if paradigm == "tp":
        return tp_run
    raise ValueError(f"unknown paradigm {paradigm!r}")


def run_single(config: RunConfig, graph: Graph) -> SampleSetOutput:
    """One engine run over the full sample range."""
    app = make_app(config.app, **config.app_params)
    samples = make_samples(app, graph, config.num_samples, config.seed)
    engine_config = EngineConfig(seed=config.seed, n_workers=1,
                                 step_cap=config.step_cap,
                                 use_kernels=config.use_kernels)
    return _engine_for(config.paradigm)(app, graph, samples, engine_config)


def split_ranges(n: int, workers: int) -> list[tuple[int, int]]:
    """Contiguous sample ranges with sizes differing by at most one."""
    from .engine.driver import worker_ranges

    return worker_ranges(n, workers)


def _make_sample_range(app, graph, lo: int, hi: int, seed: int):
    from .core import Sample

    init = app.init_roots
    return [Sample(i, init(graph, i, seed), graph) for i in range(lo, hi)]


def multi_worker_run(config: RunConfig, graph: Graph) -> SampleSetOutput:
    """Split samples into contiguous per-worker ranges, run each range
    as an independent engine instance, and concatenate the outputs in
    sample-id order. Sample ids stay global, so per-range results match
    the single-worker run exactly."""
    if config.workers <= 1:
        return run_single(config, graph)
    engine = _engine_for(config.paradigm)
    engine_config = EngineConfig(seed=config.seed, n_workers=1,
                                 step_cap=config.step_cap,
                                 use_kernels=config.use_kernels)
    outputs = []
    for lo, hi in split_ranges(config.num_samples, config.workers):
        app = make_app(config.app, **config.app_params)
        samples = _make_sample_range(app, graph, lo, hi, config.seed)
        outputs.append(engine(app, graph, samples, engine_config))

    from .engine.driver import RunStats

    stats = RunStats(paradigm=config.paradigm, n_samples=config.num_samples)
    for out in outputs:
        stats.timings.extend(out.stats.timings)
        stats.adjacency_fetches += out.stats.adjacency_fetches
        stats.total_s += out.stats.total_s
    merged = SampleSetOutput(
        samples=[s for out in outputs for s in out.samples],
        remap=graph.remap,
        n_steps=max((out.n_steps for out in outputs), default=0),
        stats=stats)
    merged.samples.sort(key=lambda s: s.id)
    return merged


def run(config: RunConfig, graph: Graph | None = None) -> tuple[SampleSetOutput, RunReport]:
    """Load (or take) a graph, run the configured engine, and build the
    report. Graph loading stays outside the timed window."""
    if graph is None:
        graph = config.load_graph()
    t0 = time.perf_counter()
    output = multi_worker_run(config, graph)
    wall = time.perf_counter() - t0
    report = RunReport(config=config, stats=output.stats, wall_s=wall)
    return output, report


@dataclass
class ComparisonReport:
    sp_report: RunReport
    tp_report: RunReport
    outputs_equal: bool

    @property
    def throughput_ratio_tp_over_sp(self) -> float:
        return (self.tp_report.stats.throughput()
                / self.sp_report.stats.throughput())

    @property
    def fetch_ratio_sp_over_tp(self) -> float:
        tp = self.tp_report.stats.adjacency_fetches
        return self.sp_report.stats.adjacency_fetches / tp if tp else float("inf")

    def lines(self) -> list[str]:
        tp_stats = self.tp_report.stats
        build_share = (tp_stats.build_s / tp_stats.total_s
                       if tp_stats.total_s > 0 else 0.0)
        return [
            f"outputs_equal={self.outputs_equal}",
            f"throughput_sp={self.sp_report.stats.throughput():.2f}",
            f"throughput_tp={tp_stats.throughput():.2f}",
            f"throughput_ratio_tp_over_sp={self.throughput_ratio_tp_over_sp:.4f}",
            f"fetches_sp={self.sp_report.stats.adjacency_fetches}",
            f"fetches_tp={tp_stats.adjacency_fetches}",
            f"fetch_ratio_sp_over_tp={self.fetch_ratio_sp_over_tp:.4f}",
            f"tp_build_index_share={build_share:.4f}",
        ]


def compare_paradigms(config: RunConfig, graph: Graph | None = None) -> ComparisonReport:
    """Run both engines on an identical config; outputs must match byte
    for byte before any ratio is reported."""
    if graph is None:
        graph = config.load_graph()
    reports = {}
    texts = {}
    for paradigm in ("sp", "tp"):
        cfg = RunConfig(**{**config.__dict__, "paradigm": paradigm})
        output, report = run(cfg, graph)
        reports[paradigm] = report
        texts[paradigm] = render_text(output, config.layout)
    equal = texts["sp"] == texts["tp"]
    if not equal:
        raise OutputMismatchError(
            f"sp and tp outputs differ for app={config.app} seed={config.seed}")
    return ComparisonReport(sp_report=reports["sp"], tp_report=reports["tp"],
                            outputs_equal=True)


# ---------------------------------------------------------------------------
# statistical validation harness


@dataclass
class ValidationRow:
    app: str
    check: str
    statistic: float
    threshold: float
    passed: bool

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return (f"{status}  {self.app:<10} {self.check:<28} "
                f"value={self.statistic:.6f} threshold={self.threshold:g}")


def _empirical_counts(values: np.ndarray, support: np.ndarray) -> np.ndarray:
    """Occurrences of each support value; support must be sorted and
    cover every drawn value."""
    idx = np.searchsorted(support, values)
    return np.bincount(idx, minlength=len(support))


def _draw_next_batch(app, graph, transit: int, n_draws: int, t_prev: int = -1,
                     step: int = 0) -> np.ndarray:
    """Invoke one app's kernel over n_draws independent keyed streams
    (distinct sample ids), all on the same transit."""
    from .kernels import individual_batch

    transits = np.full(n_draws, transit, dtype=np.int64)
    t_prev_arr = np.full(n_draws, t_prev, dtype=np.int64)
    sample_ids = np.arange(n_draws, dtype=np.int64)
    zeros = np.zeros(n_draws, dtype=np.int64)
    out = np.empty(n_draws, dtype=np.int64)
    individual_batch(app.kernel_code, app.kernel_params,
                     graph.row_offsets, graph.col_indices, graph.weights,
                     graph.per_vertex_weight_prefix, graph.per_vertex_max_weight,
                     transits, t_prev_arr, sample_ids, zeros, zeros,
                     0, step, out)
    return out


def node2vec_exact_distribution(graph, v: int, t: int, p: float, q: float,
                                convention: str = "reciprocal") -> dict:
    """Brute-force normalized pick distribution over v's neighbors."""
    from .apps import Node2vecParams, node2vec_factors

    f_ret, f_adj, f_far = node2vec_factors(
        Node2vecParams(p=p, q=q, factor_convention=convention))
    nbrs = graph.neighbors(v)
    mass = {}
    for u, w in zip(nbrs.vertices, nbrs.weights):
        u = int(u)
        if u == t:
            f = f_ret
        elif graph.has_edge(t, u):
            f = f_adj
        else:
            f = f_far
        mass[u] = mass.get(u, 0.0) + float(w) * f
    total = sum(mass.values())
    return {u: m / total for u, m in mass.items()}


def validate_distributions(app_name: str, graph: Graph, draws: int = 1_000_000,
                           seed: int = 0) -> list[ValidationRow]:
    """Per-app brute-force distribution checks on a small graph."""
    rows = []
    if app_name == "deepwalk":
        app = make_app("deepwalk")
        v = 0
        nbrs = graph.neighbors(v)
        support, inv = np.unique(nbrs.vertices, return_inverse=True)
        exact = np.bincount(inv, weights=nbrs.weights)
        exact = exact / exact.sum()
        picks = _draw_next_batch(app, graph, v, draws)
        counts = _empirical_counts(picks, support)
        err = np.abs(counts / draws - exact).max()
        rows.append(ValidationRow("deepwalk", "weighted-pick max |err|",
                                  float(err), 0.005, err < 0.005))
    elif app_name == "node2vec":
        params = {"p": 2.0, "q": 0.5}
        app = make_app("node2vec", **params)
        v, t = 0, 1
        exact = node2vec_exact_distribution(graph, v, t, **params)
        picks = _draw_next_batch(app, graph, v, draws, t_prev=t, step=1)
        support = np.asarray(sorted(exact), dtype=np.int64)
        counts = _empirical_counts(picks, support)
        l1 = float(np.abs(counts / draws
                          - np.asarray([exact[int(u)] for u in support])).sum())
        rows.append(ValidationRow("node2vec", "factor-oracle L1",
                                  l1, 0.01, l1 < 0.01))
    elif app_name == "khop":
        app = make_app("khop")
        v = 0
        nbrs = graph.neighbors(v)
        support, inv = np.unique(nbrs.vertices, return_inverse=True)
        expect = np.bincount(inv) / len(nbrs)
        picks = _draw_next_batch(app, graph, v, draws)
        counts = _empirical_counts(picks, support)
        err = np.abs(counts / draws - expect).max()
        rows.append(ValidationRow("khop", "uniform-pick max |err|",
                                  float(err), 0.005, err < 0.005))
    elif app_name == "ppr":
        rows.extend(validate_ppr_lengths(graph, n_walks=min(draws, 100_000),
                                         seed=seed))
    else:
        rows.append(ValidationRow(app_name, "no distribution oracle",
                                  0.0, 0.0, True))
    return rows


def validate_ppr_lengths(graph: Graph, n_walks: int = 100_000,
                         termination: float = 0.01,
                         seed: int = 0) -> list[ValidationRow]:
    """Walk-length law: empirical mean near 1/termination and a
    geometric goodness of fit."""
    config = RunConfig(app="ppr",
                       app_params={"termination_probability": termination},
                       paradigm="tp", num_samples=n_walks, seed=seed)
    output = run_single(config, graph)
    lengths = np.asarray([s.total_sampled() for s in output.samples])
    mean = float(lengths.mean())
    rows = [ValidationRow("ppr", "mean walk length", mean, 100.0,
                          97.0 <= mean <= 103.0)]

    # chi-square against the geometric law P(L=k) = (1-p)^k p
    p = termination
    max_bucket = int(np.quantile(lengths, 0.99))
    edges = list(range(0, max_bucket, max(1, max_bucket // 40)))
    observed, expected = [], []
    for i, lo in enumerate(edges):
        hi = edges[i + 1] if i + 1 < len(edges) else None
        if hi is None:
            observed.append(int((lengths >= lo).sum()))
            expected.append(n_walks * (1 - p) ** lo)
        else:
            observed.append(int(((lengths >= lo) & (lengths < hi)).sum()))
            expected.append(n_walks * ((1 - p) ** lo - (1 - p) ** hi))
    chi2, pvalue = scipy_stats.chisquare(observed, expected)
    rows.append(ValidationRow("ppr", "geometric fit p-value",
                              float(pvalue), 0.001, pvalue > 0.001))
    return rows

"""Shared engine machinery: the step loop, work-item construction, and
timing/instrumentation common to both paradigms.

A paradigm supplies one step executor. Everything observable (slot
values, recorded edges, root mutations) is a pure function of the keyed
RNG, so the two executors and any worker count yield identical samples.
"""

from __future__ import annotations

import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..core import (
    DEFAULT_STEP_CAP,
    INF_STEPS,
    NULL_VERTEX,
    Sample,
    SamplingApp,
    is_alive,
    step_transits,
)
from ..errors import ContractViolationError
from ..output import SampleSetOutput, dedup_step, fallback_check

_EMPTY = np.empty(0, dtype=np.int64)


@dataclass
class EngineConfig:
    seed: int = 0
    n_workers: int = 1
    step_cap: int = DEFAULT_STEP_CAP
    use_kernels: bool = True  # batch fast path for apps that carry one


@dataclass
class StepTiming:
    step: int
    build_s: float = 0.0
    sample_s: float = 0.0
    groups_small: int = 0
    groups_medium: int = 0
    groups_large: int = 0


@dataclass
class RunStats:
    paradigm: str
    n_samples: int
    timings: list[StepTiming] = field(default_factory=list)
    adjacency_fetches: int = 0
    total_s: float = 0.0

    @property
    def build_s(self) -> float:
        return sum(t.build_s for t in self.timings)

    @property
    def sample_s(self) -> float:
        return sum(t.sample_s for t in self.timings)

    @property
    def n_steps(self) -> int:
        return len(self.timings)

    def group_totals(self) -> tuple[int, int, int]:
        return (sum(t.groups_small for t in self.timings),
                sum(t.groups_medium for t in self.timings),
                sum(t.groups_large for t in self.timings))

    def throughput(self) -> float:
        return self.n_samples / self.total_s if self.total_s > 0 else float("inf")


class StepPlan:
    """Flat description of one step's individual work.

    One pair per (sample, transit_idx); each pair expands into
    sample_size slots located at flat_base[pair] .. flat_base[pair]+m-1
    of the step-flat output array. Pairs are ordered sample-major, so
    pair arrays double as the sample-parallel iteration order.
    """

    __slots__ = ("samples", "m", "out", "pair_transit", "pair_sample_id",
                 "pair_transit_idx", "pair_sample_pos", "pair_flat_base",
                 "pair_t_prev", "per_sample_transits", "sample_pair_base")

    def __init__(self, app: SamplingApp, alive: list[Sample], step: int,
                 seed: int):
        self.samples = alive
        m = app.sample_size(step)
        self.m = m
        per_sample = [step_transits(app, s, step, seed) for s in alive]
        self.per_sample_transits = per_sample
        if app.step_transits_fn is not None:
            _validate_transits(alive, per_sample)
        counts = np.asarray([len(t) for t in per_sample], dtype=np.int64)
        total_pairs = int(counts.sum())
        ids = np.asarray([s.id for s in alive], dtype=np.int64)
        self.pair_transit = (np.concatenate(per_sample) if total_pairs
                             else _EMPTY)
        self.pair_sample_id = np.repeat(ids, counts)
        self.pair_sample_pos = np.repeat(np.arange(len(alive)), counts)
        self.pair_transit_idx = (np.concatenate([np.arange(c) for c in counts])
                                 if total_pairs else _EMPTY)
        self.pair_flat_base = np.arange(total_pairs, dtype=np.int64) * m
        self.sample_pair_base = np.zeros(len(alive) + 1, dtype=np.int64)
        np.cumsum(counts, out=self.sample_pair_base[1:])
        if app.needs_prev2:
            tp = np.asarray(
                [s.prev_vertex(2, 0) if step >= 1 else NULL_VERTEX
                 for s in alive], dtype=np.int64)
            self.pair_t_prev = np.repeat(tp, counts)
        else:
            self.pair_t_prev = np.full(total_pairs, NULL_VERTEX, dtype=np.int64)

        # step-flat slot storage; per-sample views attached up front
        self.out = np.full(total_pairs * m, NULL_VERTEX, dtype=np.int64)
        offset = 0
        for s, c in zip(alive, counts):
            s.step_vertices.append(self.out[offset:offset + int(c) * m])
            offset += int(c) * m

    @property
    def n_pairs(self) -> int:
        return len(self.pair_transit)

    def item_arrays(self, pair_order: np.ndarray):
        """Expand pairs (in the given order) into per-slot arrays."""
        m = self.m
        idx = (self.pair_flat_base[pair_order][:, None]
               + np.arange(m, dtype=np.int64)).ravel()
        rep = np.repeat
        return (idx,
                rep(self.pair_transit[pair_order], m),
                rep(self.pair_t_prev[pair_order], m),
                rep(self.pair_sample_id[pair_order], m),
                rep(self.pair_transit_idx[pair_order], m),
                np.tile(np.arange(m, dtype=np.int64), len(pair_order)))


def _validate_transits(alive, per_sample) -> None:
    for s, transits in zip(alive, per_sample):
        if len(transits) == 0:
            continue
        ok = np.isin(transits, s.final_vertices())
        if not ok.all():
            bad = int(transits[np.nonzero(~ok)[0][0]])
            raise ContractViolationError(
                f"step_transits returned vertex {bad} absent from sample {s.id}")


def apply_post_step(app: SamplingApp, plan: StepPlan, step: int) -> None:
    if app.post_step is None:
        return
    for s, transits in zip(plan.samples, plan.per_sample_transits):
        app.post_step(s, step, transits, s.step_vertices[step])


def finish_step(app: SamplingApp, alive: list[Sample], step: int) -> None:
    """Dedup plus the sample-parallel fallback hint for unique steps."""
    if not app.unique(step):
        return
    m_i = app.sample_size(step)
    for s in alive:
        dedup_step(s, step)
        s._sp_fallback = fallback_check(s, step, m_i)


def worker_ranges(n: int, workers: int) -> list[tuple[int, int]]:
    """Split [0, n) into up to `workers` contiguous ranges with sizes
    differing by at most one (larger ranges first)."""
    workers = max(1, min(workers, n)) if n else 1
    base, extra = divmod(n, workers)
    ranges = []
    start = 0
    for w in range(workers):
        size = base + (1 if w < extra else 0)
        ranges.append((start, start + size))
        start += size
    return ranges


def run_chunks(tasks, n_workers: int) -> None:
    """Run callables, threaded when more than one worker is configured.
    Tasks write to disjoint output slices, so ordering is irrelevant."""
    tasks = list(tasks)
    if n_workers <= 1 or len(tasks) <= 1:
        for t in tasks:
            t()
        return
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        futures = [pool.submit(t) for t in tasks]
        for f in futures:
            f.result()  # propagate exceptions


def run_loop(app: SamplingApp, graph, samples: list[Sample],
             config: EngineConfig, step_executor, paradigm: str) -> SampleSetOutput:
    """Drive steps until every sample is finished or the budget is hit."""
    stats = RunStats(paradigm=paradigm, n_samples=len(samples))
    for s in samples:
        s.graph = graph
        s._sp_fallback = False
    t_run = time.perf_counter()
    step = 0
    alive = samples  # samples never come back to life: filter incrementally
    while True:
        if app.steps != INF_STEPS and step >= app.steps:
            break
        if step >= config.step_cap:
            if app.steps == INF_STEPS:
                warnings.warn(
                    f"unbounded app {app.name!r} hit the {config.step_cap}-step cap",
                    RuntimeWarning, stacklevel=2)
            break
        alive = [s for s in alive
                 if is_alive(app, s, step, config.seed, config.step_cap)]
        if not alive:
            break
        for s in alive:
            s.step = step
        timing = StepTiming(step=step)
        step_executor(app, graph, alive, step, config, stats, timing)
        finish_step(app, alive, step)
        stats.timings.append(timing)
        step += 1
    stats.total_s = time.perf_counter() - t_run
    return SampleSetOutput(samples=samples, remap=graph.remap, n_steps=step,
                           stats=stats)


def make_samples(app: SamplingApp, graph, n_samples: int, seed: int) -> list[Sample]:
    """Seed the initial sample set via the app's root initializer (one
    uniformly random root per sample when the app has none)."""
    init = app.init_roots
    if init is None:
        from ..apps import _uniform_roots

        init = _uniform_roots(1)
    samples = []
    for i in range(n_samples):
        roots = init(graph, i, seed)
        samples.append(Sample(i, roots, graph))
    return samples

"""Sample-parallel engine: work is iterated sample-major, one
(sample, transit, slot) triple at a time, with each transit's adjacency
fetched per (sample, transit) pair. This is the measured baseline the
transit-parallel engine is compared against.
"""

from __future__ import annotations

import time

import numpy as np

from ..core import Sample, SamplingApp, step_transits
from ..kernels import individual_batch
from ..rng import RngStream
from .collective import build_combined, collective_select
from .driver import (
    EngineConfig,
    StepPlan,
    apply_post_step,
    run_chunks,
    run_loop,
    worker_ranges,
)


def _object_exec(app, graph, plan: StepPlan, step: int, seed: int,
                 lo: int, hi: int) -> None:
    """Reference path: per-slot Python calls over pairs [lo, hi)."""
    m = plan.m
    for p in range(lo, hi):
        s = plan.samples[plan.pair_sample_pos[p]]
        t = int(plan.pair_transit[p])
        ti = int(plan.pair_transit_idx[p])
        edges = graph.neighbors(t)  # one fetch per (sample, transit) pair
        transit_arr = plan.pair_transit[p:p + 1]
        base = plan.pair_flat_base[p]
        for slot in range(m):
            rng = RngStream(seed, s.id, step, ti, slot)
            plan.out[base + slot] = app.next_fn(s, transit_arr, edges, step, rng)


def _kernel_exec(app, graph, plan: StepPlan, seed: int, step: int,
                 lo: int, hi: int) -> None:
    order = np.arange(lo, hi, dtype=np.int64)
    idx, transits, t_prev, sample_ids, transit_idxs, slots = plan.item_arrays(order)
    out = np.empty(len(idx), dtype=np.int64)
    individual_batch(app.kernel_code, app.kernel_params,
                     graph.row_offsets, graph.col_indices, graph.weights,
                     graph.per_vertex_weight_prefix, graph.per_vertex_max_weight,
                     transits, t_prev, sample_ids, transit_idxs, slots,
                     seed, step, out)
    plan.out[idx] = out


def sp_step(app: SamplingApp, graph, alive: list[Sample], step: int,
            config: EngineConfig, stats, timing) -> None:
    """Execute one step for every alive sample, sample-major."""
    t0 = time.perf_counter()
    if not app.is_individual():
        per_sample = [step_transits(app, s, step, config.seed) for s in alive]
        timing.build_s = time.perf_counter() - t0
        t1 = time.perf_counter()
        neighborhoods = build_combined(app, graph, alive, step, config.seed,
                                       "sp", stats)
        collective_select(app, alive, neighborhoods, per_sample, step,
                          config.seed, use_batch=config.use_kernels)
        apply_post_step(app, _CollectivePlanView(alive, per_sample), step)
        timing.sample_s = time.perf_counter() - t1
        return

    plan = StepPlan(app, alive, step, config.seed)
    timing.build_s = time.perf_counter() - t0
    t1 = time.perf_counter()
    stats.adjacency_fetches += plan.n_pairs
    use_kernel = config.use_kernels and app.kernel_code is not None
    # one contiguous chunk of samples per worker
    base = plan.sample_pair_base
    ranges = [(int(base[slo]), int(base[shi]))
              for slo, shi in worker_ranges(len(alive), config.n_workers)]
    if use_kernel:
        tasks = [lambda lo=lo, hi=hi: _kernel_exec(app, graph, plan, config.seed,
                                                   step, lo, hi)
                 for lo, hi in ranges]
    else:
        tasks = [lambda lo=lo, hi=hi: _object_exec(app, graph, plan, step,
                                                   config.seed, lo, hi)
                 for lo, hi in ranges]
    run_chunks(tasks, config.n_workers)
    apply_post_step(app, plan, step)
    timing.sample_s = time.perf_counter() - t1


class _CollectivePlanView:
    """Adapter giving apply_post_step the fields it needs."""

    def __init__(self, samples, per_sample_transits):
        self.samples = samples
        self.per_sample_transits = per_sample_transits


def sp_run(app: SamplingApp, graph, samples: list[Sample],
           config: EngineConfig | None = None):
    """Grow every sample to completion under sample-parallel execution."""
    config = config or EngineConfig()
    from .chain import chain_eligible, run_chain

    if chain_eligible(app, config, samples):
        return run_chain(app, graph, samples, config, "sp")
    return run_loop(app, graph, samples, config, sp_step, "sp")

"""Transit-parallel engine.

Each step: group (transit, sample) pairs by transit vertex, partition
the groups into three load-balance classes by how many vertices they
must sample, then execute class by class with each transit's adjacency
fetched once and reused for every member. Group construction is a
stable sort keyed on the transit id, so member order is (sample id,
transit index) ascending and the whole schedule is reproducible.

Work classes, keyed on work = members * sample_size:
    small   work < 32        processed in sub-group batches
    medium  32 <= work <= 1024  one group per worker task
    large   work > 1024      members split across workers
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

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
from .sample_parallel import _CollectivePlanView

SMALL_MAX_WORK = 32     # exclusive upper bound for the small class
LARGE_MIN_WORK = 1024   # exclusive lower bound for the large class
SUBGROUP_THREADS = 32   # contiguous-write batch budget


def subgroup_size(m_i: int) -> int:
    """Members of one group processed as one contiguous unit."""
    return max(1, SUBGROUP_THREADS // m_i)


@dataclass
class TransitGroup:
    """All (sample, transit_idx) pairs sharing one transit vertex."""

    transit: int
    members: np.ndarray  # pair indices into the step plan, sample-major order
    work: int = 0


@dataclass
class TransitSchedule:
    step: int
    small: list[TransitGroup] = field(default_factory=list)
    medium: list[TransitGroup] = field(default_factory=list)
    large: list[TransitGroup] = field(default_factory=list)
    scheduling_index: dict = field(default_factory=dict)  # transit -> rank in class

    def all_groups(self):
        return self.small + self.medium + self.large

    def class_counts(self) -> tuple[int, int, int]:
        return len(self.small), len(self.medium), len(self.large)


def build_transit_map(plan: StepPlan) -> list[TransitGroup]:
    """Group the step's pairs by transit vertex (stable sort by key), in
    ascending transit order; member order inside a group stays
    sample-major."""
    if plan.n_pairs == 0:
        return []
    order = np.argsort(plan.pair_transit, kind="stable")
    sorted_transits = plan.pair_transit[order]
    boundaries = np.flatnonzero(np.diff(sorted_transits)) + 1
    starts = np.concatenate([[0], boundaries])
    ends = np.concatenate([boundaries, [len(order)]])
    return [TransitGroup(transit=int(sorted_transits[s]), members=order[s:e])
            for s, e in zip(starts, ends)]


def partition_work_classes(groups: list[TransitGroup], m_i: int,
                           step: int = 0) -> TransitSchedule:
    """Place each group in its class by work = members * m_i and assign
    dense per-class scheduling indices (stable by transit id)."""
    sched = TransitSchedule(step=step)
    for g in groups:
        g.work = len(g.members) * m_i
        if g.work < SMALL_MAX_WORK:
            cls = sched.small
        elif g.work <= LARGE_MIN_WORK:
            cls = sched.medium
        else:
            cls = sched.large
        sched.scheduling_index[g.transit] = len(cls)
        cls.append(g)
    return sched


def _exec_pairs(app, graph, plan, config, step, pair_order) -> None:
    if config.use_kernels and app.kernel_code is not None:
        _kernel_pairs(app, graph, plan, config.seed, step, pair_order)
    else:
        _object_group(app, graph, plan, config.seed, step, pair_order)


def _kernel_pairs(app, graph, plan, seed, step, pair_order) -> None:
    idx, transits, t_prev, sample_ids, transit_idxs, slots = \
        plan.item_arrays(np.asarray(pair_order, dtype=np.int64))
    out = np.empty(len(idx), dtype=np.int64)
    individual_batch(app.kernel_code, app.kernel_params,
                     graph.row_offsets, graph.col_indices, graph.weights,
                     graph.per_vertex_weight_prefix, graph.per_vertex_max_weight,
                     transits, t_prev, sample_ids, transit_idxs, slots,
                     seed, step, out)
    plan.out[idx] = out


def _object_group(app, graph, plan, seed, step, pair_order) -> None:
    """Object path over one group's members: the adjacency view is
    materialized once and shared by every member, in sub-group batches."""
    if len(pair_order) == 0:
        return
    m = plan.m
    t = int(plan.pair_transit[pair_order[0]])
    edges = graph.neighbors(t)  # hoisted out of the member loop
    batch = subgroup_size(m)
    transit_arr = np.asarray([t], dtype=np.int64)
    for start in range(0, len(pair_order), batch):
        for p in pair_order[start:start + batch]:
            s = plan.samples[plan.pair_sample_pos[p]]
            ti = int(plan.pair_transit_idx[p])
            base = plan.pair_flat_base[p]
            for slot in range(m):
                rng = RngStream(seed, s.id, step, ti, slot)
                plan.out[base + slot] = app.next_fn(s, transit_arr, edges,
                                                    step, rng)


def tp_execute_class(app: SamplingApp, graph, groups: list[TransitGroup],
                     plan: StepPlan, step: int, config: EngineConfig,
                     split_members: bool = False) -> None:
    """Execute one class of groups; large-class groups may have their
    member ranges split across workers, all sharing the transit's
    adjacency."""
    if not groups:
        return
    workers = config.n_workers
    kernel_mode = config.use_kernels and app.kernel_code is not None
    tasks = []
    if split_members and workers > 1:
        for g in groups:
            for lo, hi in worker_ranges(len(g.members), workers):
                members = g.members[lo:hi]
                tasks.append(lambda m=members: _exec_pairs(app, graph, plan,
                                                           config, step, m))
    elif workers > 1:
        # whole groups distributed across workers
        for lo, hi in worker_ranges(len(groups), workers):
            chunk = groups[lo:hi]
            if kernel_mode:
                members = np.concatenate([g.members for g in chunk])
                tasks.append(lambda m=members: _exec_pairs(app, graph, plan,
                                                           config, step, m))
            else:
                tasks.append(lambda c=chunk: [
                    _exec_pairs(app, graph, plan, config, step, g.members)
                    for g in c])
    elif kernel_mode:
        # one batch over the whole class, pairs ordered group-major so
        # each transit's CSR segment stays hot across its members
        members = np.concatenate([g.members for g in groups])
        tasks = [lambda m=members: _exec_pairs(app, graph, plan, config,
                                               step, m)]
    else:
        tasks = [lambda g=g: _exec_pairs(app, graph, plan, config, step,
                                         g.members) for g in groups]
    run_chunks(tasks, workers)


def tp_step(app: SamplingApp, graph, alive: list[Sample], step: int,
            config: EngineConfig, stats, timing) -> None:
    if not app.is_individual():
        t0 = time.perf_counter()
        per_sample = [step_transits(app, s, step, config.seed) for s in alive]
        timing.build_s = time.perf_counter() - t0
        t1 = time.perf_counter()
        neighborhoods = build_combined(app, graph, alive, step, config.seed,
                                       "tp", stats, timing)
        collective_select(app, alive, neighborhoods, per_sample, step,
                          config.seed, use_batch=config.use_kernels)
        apply_post_step(app, _CollectivePlanView(alive, per_sample), step)
        timing.sample_s = time.perf_counter() - t1
        return

    # samples flagged after a unique step run sample-parallel this step
    flagged = [s for s in alive if s._sp_fallback]
    grouped = [s for s in alive if not s._sp_fallback]

    t0 = time.perf_counter()
    plan = StepPlan(app, alive, step, config.seed)
    pair_is_grouped = np.asarray([not plan.samples[pos]._sp_fallback
                                  for pos in plan.pair_sample_pos], dtype=bool) \
        if flagged else None
    groups = (build_transit_map_subset(plan, pair_is_grouped)
              if flagged else build_transit_map(plan))
    sched = partition_work_classes(groups, plan.m, step)
    timing.build_s = time.perf_counter() - t0
    timing.groups_small, timing.groups_medium, timing.groups_large = \
        sched.class_counts()

    t1 = time.perf_counter()
    stats.adjacency_fetches += len(groups)
    tp_execute_class(app, graph, sched.small, plan, step, config)
    tp_execute_class(app, graph, sched.medium, plan, step, config)
    tp_execute_class(app, graph, sched.large, plan, step, config,
                     split_members=True)
    if flagged:
        fallback_pairs = np.flatnonzero(~pair_is_grouped)
        stats.adjacency_fetches += len(fallback_pairs)
        for p in fallback_pairs:
            _exec_pairs(app, graph, plan, config, step, np.asarray([p]))
    apply_post_step(app, plan, step)
    timing.sample_s = time.perf_counter() - t1
    for s in flagged:
        s._sp_fallback = False


def build_transit_map_subset(plan: StepPlan, keep_mask: np.ndarray):
    """Transit map over the subset of pairs marked in keep_mask."""
    if plan.n_pairs == 0:
        return []
    kept = np.flatnonzero(keep_mask)
    if len(kept) == 0:
        return []
    order = kept[np.argsort(plan.pair_transit[kept], kind="stable")]
    sorted_transits = plan.pair_transit[order]
    boundaries = np.flatnonzero(np.diff(sorted_transits)) + 1
    starts = np.concatenate([[0], boundaries])
    ends = np.concatenate([boundaries, [len(order)]])
    return [TransitGroup(transit=int(sorted_transits[s]), members=order[s:e])
            for s, e in zip(starts, ends)]


def tp_run(app: SamplingApp, graph, samples: list[Sample],
           config: EngineConfig | None = None):
    """Grow every sample to completion under transit-parallel execution."""
    config = config or EngineConfig()
    from .chain import chain_eligible, run_chain

    if chain_eligible(app, config, samples):
        return run_chain(app, graph, samples, config, "tp")
    return run_loop(app, graph, samples, config, tp_step, "tp")

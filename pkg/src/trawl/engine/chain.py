"""Vectorized executor for chain walks (every step adds one slot).

Random-walk apps dominate step counts (hundreds of steps over up to
millions of walks), so the per-step work here is a fixed number of
array operations with no per-sample Python in the loop. Results are bit
identical to the generic executors: the same keyed streams feed the
same batch kernels, only the bookkeeping changes. Samples are
materialized once at the end.

Eligible apps declare chain_walk=True (individual, one slot per step,
no dedup) and carry a batch kernel.
"""

from __future__ import annotations

import time
import warnings

import numpy as np

from ..core import INF_STEPS, NULL_VERTEX, Sample, SamplingApp, TRANSITS_ROOT_PICK
from ..kernels import individual_batch, keyed_u64
from ..output import SampleSetOutput
from ..rng import DOMAIN_STEP_TRANSITS
from .driver import EngineConfig, RunStats, StepTiming, worker_ranges, run_chunks
from .transit_parallel import LARGE_MIN_WORK, SMALL_MAX_WORK

_EMPTY = np.empty(0, dtype=np.int64)


def chain_eligible(app: SamplingApp, config: EngineConfig,
                   samples: list[Sample] | None = None) -> bool:
    if not (app.chain_walk and app.kernel_code is not None and config.use_kernels):
        return False
    if samples and app.transit_source == TRANSITS_ROOT_PICK:
        # the root matrix needs one row size; ragged root sets take the
        # generic executor instead
        first = len(samples[0].roots)
        return all(len(s.roots) == first for s in samples)
    return True


def _batch(app, graph, transits, t_prev, sample_ids, seed, step, n_workers):
    n = len(transits)
    out = np.empty(n, dtype=np.int64)
    zeros = np.zeros(n, dtype=np.int64)

    def task(lo, hi):
        individual_batch(app.kernel_code, app.kernel_params,
                         graph.row_offsets, graph.col_indices, graph.weights,
                         graph.per_vertex_weight_prefix,
                         graph.per_vertex_max_weight,
                         transits[lo:hi], t_prev[lo:hi], sample_ids[lo:hi],
                         zeros[lo:hi], zeros[lo:hi], seed, step, out[lo:hi])

    if n_workers > 1 and n > 1:
        run_chunks([lambda lo=lo, hi=hi: task(lo, hi)
                    for lo, hi in worker_ranges(n, n_workers)], n_workers)
    else:
        task(0, n)
    return out


def run_chain(app: SamplingApp, graph, samples: list[Sample],
              config: EngineConfig, paradigm: str) -> SampleSetOutput:
    stats = RunStats(paradigm=paradigm, n_samples=len(samples))
    t_run = time.perf_counter()
    n = len(samples)
    ids = np.asarray([s.id for s in samples], dtype=np.int64)
    for s in samples:
        s.graph = graph

    root_pick = app.transit_source == TRANSITS_ROOT_PICK
    if root_pick:
        # constant-size root set per sample (replace keeps the size)
        roots_mat = np.stack([s.roots for s in samples]) if n else \
            np.empty((0, 0), dtype=np.int64)
        n_roots = roots_mat.shape[1] if n else 0
        cur = None
        alive_pos = np.arange(n, dtype=np.int64)
    else:
        cur = np.asarray([s.roots[0] for s in samples], dtype=np.int64) if n \
            else _EMPTY
        alive_pos = np.arange(n, dtype=np.int64)
    prev = np.full(n, NULL_VERTEX, dtype=np.int64)  # two-steps-back vertex

    step_pos: list[np.ndarray] = []
    step_out: list[np.ndarray] = []

    step = 0
    while len(alive_pos):
        if app.steps != INF_STEPS and step >= app.steps:
            break
        if step >= config.step_cap:
            if app.steps == INF_STEPS:
                warnings.warn(
                    f"unbounded app {app.name!r} hit the {config.step_cap}-step cap",
                    RuntimeWarning, stacklevel=2)
            break
        timing = StepTiming(step=step)
        t0 = time.perf_counter()
        if root_pick:
            pick = (keyed_u64(config.seed, ids[alive_pos], step,
                              np.zeros(len(alive_pos), dtype=np.int64),
                              np.zeros(len(alive_pos), dtype=np.int64),
                              domain=DOMAIN_STEP_TRANSITS)
                    % np.uint64(n_roots)).astype(np.int64)
            transits = roots_mat[alive_pos, pick]
        else:
            transits = cur[alive_pos]

        if paradigm == "tp":
            order = np.argsort(transits, kind="stable")
            sorted_transits = transits[order]
            group_starts = np.concatenate(
                [[0], np.flatnonzero(np.diff(sorted_transits)) + 1]) \
                if len(order) else _EMPTY
            group_sizes = np.diff(np.concatenate(
                [group_starts, [len(order)]])) if len(order) else _EMPTY
            work = group_sizes  # sample_size is 1 for chain walks
            timing.groups_small = int((work < SMALL_MAX_WORK).sum())
            timing.groups_large = int((work > LARGE_MIN_WORK).sum())
            timing.groups_medium = len(work) - timing.groups_small \
                - timing.groups_large
            stats.adjacency_fetches += len(work)
            exec_order = order
        else:
            stats.adjacency_fetches += len(transits)
            exec_order = np.arange(len(transits), dtype=np.int64)
        timing.build_s = time.perf_counter() - t0

        t1 = time.perf_counter()
        run_pos = alive_pos[exec_order]
        out_perm = _batch(app, graph, transits[exec_order], prev[run_pos],
                          ids[run_pos], config.seed, step, config.n_workers)
        out = np.empty(len(alive_pos), dtype=np.int64)
        out[exec_order] = out_perm
        timing.sample_s = time.perf_counter() - t1
        stats.timings.append(timing)

        step_pos.append(alive_pos)
        step_out.append(out)

        if root_pick:
            # replace the first occurrence of each chosen root value
            moved = out != NULL_VERTEX
            if moved.any():
                rows = alive_pos[moved]
                cols = (roots_mat[rows] == transits[moved][:, None]).argmax(axis=1)
                roots_mat[rows, cols] = out[moved]
            # root-pick walks stay alive for the full step budget
        else:
            prev[alive_pos] = transits
            cur[alive_pos] = out
            alive_pos = alive_pos[out != NULL_VERTEX]
        step += 1

    _materialize(samples, step_pos, step_out, n)
    if root_pick and n:
        for i, s in enumerate(samples):
            s.roots = roots_mat[i]
    stats.total_s = time.perf_counter() - t_run
    return SampleSetOutput(samples=samples, remap=graph.remap, n_steps=step,
                           stats=stats)


def _materialize(samples, step_pos, step_out, n: int) -> None:
    """Scatter the per-step results back into per-sample chains."""
    if not step_pos:
        return
    all_pos = np.concatenate(step_pos)
    all_out = np.concatenate(step_out)
    order = np.argsort(all_pos, kind="stable")  # step order kept within sample
    sorted_out = all_out[order]
    counts = np.bincount(all_pos, minlength=n)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    for i, s in enumerate(samples):
        s.set_chain(sorted_out[offsets[i]:offsets[i + 1]])

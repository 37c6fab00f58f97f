"""Collective sampling: combined-neighborhood construction plus the
per-sample selection phase.

Phase one concatenates the adjacency lists of all of a sample's
transits, in transit order, into one buffer per sample. The
transit-parallel builder reads each distinct transit's adjacency once
and copies it to every sample sharing it; the sample-parallel builder
reads once per (sample, transit) pair. Both produce identical entry
sequences. Phase two then selects vertices per sample and is shared by
the two engines.
"""

from __future__ import annotations

import numpy as np

from ..core import Sample, SamplingApp, step_transits
from ..rng import RngStream

_EMPTY = np.empty(0, dtype=np.int64)
_EMPTY_F = np.empty(0, dtype=np.float64)


class CombinedNeighborhood:
    """Concatenation of the adjacency lists of one sample's transits."""

    __slots__ = ("sample_id", "src_transits", "neighbors", "weights")

    def __init__(self, sample_id: int, src_transits, neighbors, weights):
        self.sample_id = sample_id
        self.src_transits = src_transits
        self.neighbors = neighbors
        self.weights = weights

    def __len__(self) -> int:
        return len(self.neighbors)


def build_combined(app: SamplingApp, graph, alive: list[Sample], step: int,
                   seed: int, engine: str, stats=None,
                   timing=None) -> list[CombinedNeighborhood]:
    """Build each alive sample's combined neighborhood.

    engine="tp" groups (sample, transit) pairs by transit and fetches
    each distinct transit's adjacency once; engine="sp" fetches per
    pair. Entry order is transit order within each sample either way.
    The tp build is scheduled like a one-step individual app: its groups
    are classed by total copy work (members times transit degree).
    """
    per_sample = [step_transits(app, s, step, seed) for s in alive]
    row = graph.row_offsets
    neighborhoods = []
    bases = []  # per sample: entry offset of each transit's block
    for s, transits in zip(alive, per_sample):
        degs = row[transits + 1] - row[transits]
        offs = np.zeros(len(transits) + 1, dtype=np.int64)
        np.cumsum(degs, out=offs[1:])
        total = int(offs[-1])
        nb = CombinedNeighborhood(
            s.id,
            np.empty(total, dtype=np.int64),
            np.empty(total, dtype=np.int64),
            np.empty(total, dtype=np.float64))
        neighborhoods.append(nb)
        bases.append(offs)

    if engine == "sp":
        fetches = 0
        for nb, transits, offs in zip(neighborhoods, per_sample, bases):
            for ti, t in enumerate(transits):
                lo, hi = int(row[t]), int(row[t + 1])
                dst = slice(int(offs[ti]), int(offs[ti + 1]))
                nb.src_transits[dst] = t
                nb.neighbors[dst] = graph.col_indices[lo:hi]
                nb.weights[dst] = graph.weights[lo:hi]
                fetches += 1
        if stats is not None:
            stats.adjacency_fetches += fetches
    elif engine == "tp":
        # flatten pairs, group by transit, copy each adjacency once
        pair_transit = (np.concatenate(per_sample) if per_sample else _EMPTY)
        pair_sample_pos = np.repeat(np.arange(len(alive)),
                                    [len(t) for t in per_sample])
        pair_transit_idx = (np.concatenate(
            [np.arange(len(t)) for t in per_sample]) if per_sample else _EMPTY)
        order = np.argsort(pair_transit, kind="stable")
        fetches = 0
        i = 0
        n = len(order)
        while i < n:
            t = int(pair_transit[order[i]])
            j = i
            lo, hi = int(row[t]), int(row[t + 1])
            seg_nbrs = graph.col_indices[lo:hi]
            seg_wts = graph.weights[lo:hi]
            fetches += 1
            while j < n and pair_transit[order[j]] == t:
                p = order[j]
                nb = neighborhoods[pair_sample_pos[p]]
                offs = bases[pair_sample_pos[p]]
                ti = int(pair_transit_idx[p])
                dst = slice(int(offs[ti]), int(offs[ti + 1]))
                nb.src_transits[dst] = t
                nb.neighbors[dst] = seg_nbrs
                nb.weights[dst] = seg_wts
                j += 1
            if timing is not None:
                work = (j - i) * (hi - lo)
                if work < 32:
                    timing.groups_small += 1
                elif work <= 1024:
                    timing.groups_medium += 1
                else:
                    timing.groups_large += 1
            i = j
        if stats is not None:
            stats.adjacency_fetches += fetches
    else:
        raise ValueError(f"unknown engine {engine!r}")
    return neighborhoods


def collective_select(app: SamplingApp, alive: list[Sample],
                      neighborhoods: list[CombinedNeighborhood],
                      per_sample_transits: list[np.ndarray], step: int,
                      seed: int, use_batch: bool = True) -> None:
    """Phase two: invoke next sample_size times per sample against its
    combined neighborhood. Sequential per sample so stateful size caps
    see intra-step additions; identical in both paradigms. Apps that
    carry a vectorized select_batch twin take it instead of the slot
    loop (same draws, same results)."""
    m = app.sample_size(step)
    for s, nb, transits in zip(alive, neighborhoods, per_sample_transits):
        out = np.full(m, -1, dtype=np.int64)
        s.step_vertices.append(out)
        if use_batch and app.select_batch is not None:
            app.select_batch(s, transits, nb, step, seed, out)
            continue
        for slot in range(m):
            rng = RngStream(seed, s.id, step, 0, slot)
            out[slot] = app.next_fn(s, transits, nb, step, rng)

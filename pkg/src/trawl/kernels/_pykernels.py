"""Numpy implementations of the per-slot sampling kernels.

This is the fallback backend: the compiled extension in ``_ckernels``
mirrors these functions instruction for instruction and must produce
bit-identical results. Keep the two in sync.

The batch entry point receives one flat work item per (sample, transit,
slot) triple. Each item draws from its own keyed stream, so results do
not depend on batch composition or ordering.
"""

from __future__ import annotations

import numpy as np

from ..errors import SamplerStallError
from ..rng import (
    C_DOMAIN,
    C_DRAW,
    C_SAMPLE,
    C_SLOT,
    C_STEP,
    C_TRANSIT,
    DOMAIN_NEXT,
    INV_2_53,
    MASK64,
    MIX_A,
    MIX_B,
)

# App codes understood by individual_batch.
K_DEEPWALK = 0
K_PPR = 1
K_NODE2VEC = 2
K_KHOP = 3
K_MULTIRW = 4

NULL_VERTEX = -1

NODE2VEC_MAX_TRIES = 1_000_000

_U = np.uint64
_C_SAMPLE = _U(C_SAMPLE)
_C_TRANSIT = _U(C_TRANSIT)
_C_SLOT = _U(C_SLOT)
_MIX_A = _U(MIX_A)
_MIX_B = _U(MIX_B)
_ONE = _U(1)


def _mix64(x: np.ndarray) -> np.ndarray:
    x = x.copy()
    x ^= x >> _U(30)
    x *= _MIX_A
    x ^= x >> _U(27)
    x *= _MIX_B
    x ^= x >> _U(31)
    return x


def keyed_u64(seed, sample_ids, step, transit_idxs, slots, domain=DOMAIN_NEXT, draw=0):
    """Vectorized counterpart of rng.key_u64 over parallel id arrays."""
    base = (seed + C_STEP * (step + 1) + C_DOMAIN * (domain + 1)
            + C_DRAW * (draw + 1)) & MASK64
    k = _U(base) + _C_SAMPLE * (np.asarray(sample_ids, dtype=np.uint64) + _ONE)
    k += _C_TRANSIT * (np.asarray(transit_idxs, dtype=np.uint64) + _ONE)
    k += _C_SLOT * (np.asarray(slots, dtype=np.uint64) + _ONE)
    return _mix64(_mix64(k))


def keyed_uniform(seed, sample_ids, step, transit_idxs, slots, domain=DOMAIN_NEXT, draw=0):
    u = keyed_u64(seed, sample_ids, step, transit_idxs, slots, domain, draw)
    return (u >> _U(11)).astype(np.float64) * INV_2_53


def segmented_prefix_sum(values: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Inclusive prefix sum restarted at every segment boundary.

    Sequential accumulation per segment; no global-cumsum shortcut, so
    the result is bit-identical to a plain running-sum loop.
    """
    out = np.empty_like(values, dtype=np.float64)
    for v in range(len(offsets) - 1):
        lo, hi = offsets[v], offsets[v + 1]
        if hi > lo:
            np.cumsum(values[lo:hi], out=out[lo:hi])
    return out


def segment_max(values: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Per-segment maximum; 0.0 for empty segments."""
    starts = np.asarray(offsets[:-1], dtype=np.int64)
    ends = np.asarray(offsets[1:], dtype=np.int64)
    out = np.zeros(len(starts), dtype=np.float64)
    nonempty = ends > starts
    if nonempty.any():
        # reduceat misbehaves on empty segments, so restrict to non-empty ones
        red = np.maximum.reduceat(values, starts[nonempty])
        out[nonempty] = red
    return out


def searchsorted_right_segments(values, lo, hi, x):
    """Vectorized upper_bound over ragged float64 segments.

    For each i, returns the first index in [lo[i], hi[i]) whose value is
    greater than x[i] (hi[i] if none is). Matches np.searchsorted
    side='right' on each segment.
    """
    lo = lo.astype(np.int64).copy()
    hi = hi.astype(np.int64).copy()
    while True:
        open_ = lo < hi
        if not open_.any():
            return lo
        mid = (lo + hi) >> 1
        probe = values[np.where(open_, mid, 0)]
        go_right = open_ & (probe <= x)
        lo = np.where(go_right, mid + 1, lo)
        hi = np.where(open_ & ~go_right, mid, hi)


def segment_contains(values, lo, hi, targets):
    """Membership test in sorted int64 segments (binary search per item)."""
    lo = lo.astype(np.int64).copy()
    hi0 = hi.astype(np.int64)
    hi = hi0.copy()
    while True:
        open_ = lo < hi
        if not open_.any():
            break
        mid = (lo + hi) >> 1
        probe = values[np.where(open_, mid, 0)]
        go_right = open_ & (probe < targets)
        lo = np.where(go_right, mid + 1, lo)
        hi = np.where(open_ & ~go_right, mid, hi)
    in_range = lo < hi0
    hit = values[np.where(in_range, lo, 0)] == targets
    return in_range & hit


def weighted_pick_batch(row_offsets, col_indices, weight_prefix, transits, r):
    """Pick a neighbor of each transit with probability proportional to
    edge weight; callers guarantee degree > 0."""
    base = row_offsets[transits]
    end = row_offsets[transits + 1]
    total = weight_prefix[end - 1]
    x = r * total
    idx = searchsorted_right_segments(weight_prefix, base, end, x)
    idx = np.minimum(idx, end - 1)  # r*total can round up to total
    return col_indices[idx]


def individual_batch(app_code, params,
                     row_offsets, col_indices, weights, weight_prefix, max_weight,
                     transits, t_prev, sample_ids, transit_idxs, slots,
                     seed, step, out):
    """Run one app's next-function over a flat batch of work items.

    out[i] receives the sampled vertex for item i, or NULL_VERTEX.
    Draw-index protocol per item (must match the object-mode apps):
      deepwalk            draw 0 = weighted pick
      ppr                 draw 0 = termination test, draw 1 = weighted pick
      khop / multirw      draw 0 = uniform index
      node2vec            draws (2j, 2j+1) = pick / accept for try j;
                          items with t_prev < 0 use draw 0 = weighted pick
    """
    n = len(transits)
    if n == 0:
        return
    base = row_offsets[transits]
    deg = row_offsets[transits + 1] - base
    out[:] = NULL_VERTEX
    live = deg > 0
    if not live.any():
        return
    idx = np.nonzero(live)[0]

    if app_code == K_DEEPWALK:
        r = keyed_uniform(seed, sample_ids[idx], step, transit_idxs[idx], slots[idx])
        out[idx] = weighted_pick_batch(row_offsets, col_indices, weight_prefix,
                                       transits[idx], r)
    elif app_code == K_PPR:
        term = params[0]
        r0 = keyed_uniform(seed, sample_ids[idx], step, transit_idxs[idx], slots[idx],
                           draw=0)
        keep = r0 >= term
        idx = idx[keep]
        if len(idx):
            r1 = keyed_uniform(seed, sample_ids[idx], step, transit_idxs[idx],
                               slots[idx], draw=1)
            out[idx] = weighted_pick_batch(row_offsets, col_indices, weight_prefix,
                                           transits[idx], r1)
    elif app_code in (K_KHOP, K_MULTIRW):
        u = keyed_u64(seed, sample_ids[idx], step, transit_idxs[idx], slots[idx])
        pick = (u % deg[idx].astype(np.uint64)).astype(np.int64)
        out[idx] = col_indices[base[idx] + pick]
    elif app_code == K_NODE2VEC:
        _node2vec_batch(params, row_offsets, col_indices, weights, weight_prefix,
                        max_weight, transits, t_prev, sample_ids, transit_idxs,
                        slots, seed, step, out, idx)
    else:
        raise ValueError(f"unknown app code {app_code}")


def _node2vec_factors(params):
    p, q, mode = params[0], params[1], params[2]
    if mode == 0.0:  # reciprocal convention
        return 1.0 / p, 1.0, 1.0 / q
    return p, 1.0 / q, 1.0  # direct convention


def _node2vec_batch(params, row_offsets, col_indices, weights, weight_prefix,
                    max_weight, transits, t_prev, sample_ids, transit_idxs,
                    slots, seed, step, out, idx):
    f_ret, f_adj, f_far = _node2vec_factors(params)
    f_max = max(f_ret, f_adj, f_far)

    first = idx[t_prev[idx] < 0]
    if len(first):
        r = keyed_uniform(seed, sample_ids[first], step, transit_idxs[first],
                          slots[first])
        out[first] = weighted_pick_batch(row_offsets, col_indices, weight_prefix,
                                         transits[first], r)

    act = idx[t_prev[idx] >= 0]
    if not len(act):
        return
    v = transits[act]
    base = row_offsets[v]
    deg = (row_offsets[v + 1] - base).astype(np.uint64)
    t = t_prev[act]
    t_lo = row_offsets[t]
    t_hi = row_offsets[t + 1]
    env = max_weight[v] * f_max
    sid, tix, slo = sample_ids[act], transit_idxs[act], slots[act]

    for j in range(NODE2VEC_MAX_TRIES):
        u = keyed_u64(seed, sid, step, tix, slo, draw=2 * j)
        cand = base + (u % deg).astype(np.int64)
        nbr = col_indices[cand]
        w = weights[cand]
        factor = np.where(nbr == t, f_ret,
                          np.where(segment_contains(col_indices, t_lo, t_hi, nbr),
                                   f_adj, f_far))
        r = keyed_uniform(seed, sid, step, tix, slo, draw=2 * j + 1)
        accept = (env <= 0) | (r * env < w * factor)
        out[act[accept]] = nbr[accept]
        rem = ~accept
        if not rem.any():
            return
        act, v, base, deg, t, t_lo, t_hi, env = (
            act[rem], v[rem], base[rem], deg[rem], t[rem],
            t_lo[rem], t_hi[rem], env[rem])
        sid, tix, slo = sid[rem], tix[rem], slo[rem]
    raise SamplerStallError(
        f"rejection sampler exceeded {NODE2VEC_MAX_TRIES} tries for {len(act)} items")

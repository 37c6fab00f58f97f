# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of the numpy kernels in _pykernels.

Every arithmetic step mirrors the numpy code exactly so the two
backends are interchangeable bit for bit. The hot loops run without the
GIL so engine workers can overlap.
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t

from ..errors import SamplerStallError

cnp.import_array()

# Keep in sync with trawl.rng / _pykernels.
cdef uint64_t C_SAMPLE = 0x9E3779B97F4A7C15u
cdef uint64_t C_STEP = 0xC2B2AE3D27D4EB4Fu
cdef uint64_t C_TRANSIT = 0x165667B19E3779F9u
cdef uint64_t C_SLOT = 0x27D4EB2F165667C5u
cdef uint64_t C_DOMAIN = 0x85EBCA77C2B2AE63u
cdef uint64_t C_DRAW = 0xD6E8FEB86659FD93u
cdef uint64_t MIX_A = 0xBF58476D1CE4E5B9u
cdef uint64_t MIX_B = 0x94D049BB133111EBu
cdef double INV_2_53 = 1.0 / 9007199254740992.0

cdef int K_DEEPWALK = 0
cdef int K_PPR = 1
cdef int K_NODE2VEC = 2
cdef int K_KHOP = 3
cdef int K_MULTIRW = 4

cdef long NODE2VEC_MAX_TRIES = 1000000


cdef inline uint64_t _mix64(uint64_t x) nogil:
    x ^= x >> 30
    x *= MIX_A
    x ^= x >> 27
    x *= MIX_B
    x ^= x >> 31
    return x


cdef inline uint64_t _key(uint64_t base, uint64_t sample_id, uint64_t transit_idx,
                          uint64_t slot) nogil:
    cdef uint64_t k = base
    k += C_SAMPLE * (sample_id + 1)
    k += C_TRANSIT * (transit_idx + 1)
    k += C_SLOT * (slot + 1)
    return _mix64(_mix64(k))


cdef inline uint64_t _base_for(uint64_t seed, uint64_t step, uint64_t domain,
                               uint64_t draw) nogil:
    return seed + C_STEP * (step + 1) + C_DOMAIN * (domain + 1) + C_DRAW * (draw + 1)


cdef inline double _to_unit(uint64_t u) nogil:
    return <double>(u >> 11) * INV_2_53


cdef inline int64_t _upper_bound(const double[::1] a, int64_t lo, int64_t hi,
                                 double x) nogil:
    cdef int64_t mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] <= x:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline bint _contains(const int64_t[::1] a, int64_t lo, int64_t hi,
                           int64_t target) nogil:
    cdef int64_t mid
    cdef int64_t end = hi
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] < target:
            lo = mid + 1
        else:
            hi = mid
    return lo < end and a[lo] == target


cdef inline int64_t _weighted_pick(const int64_t[::1] row_offsets,
                                   const int64_t[::1] col_indices,
                                   const double[::1] weight_prefix,
                                   int64_t v, double r) nogil:
    cdef int64_t base = row_offsets[v]
    cdef int64_t end = row_offsets[v + 1]
    cdef double total = weight_prefix[end - 1]
    cdef int64_t idx = _upper_bound(weight_prefix, base, end, r * total)
    if idx > end - 1:
        idx = end - 1
    return col_indices[idx]


def segmented_prefix_sum(cnp.ndarray values_arr, cnp.ndarray offsets_arr):
    cdef const double[::1] values = np.ascontiguousarray(values_arr, dtype=np.float64)
    cdef const int64_t[::1] offsets = np.ascontiguousarray(offsets_arr, dtype=np.int64)
    out_arr = np.empty(values.shape[0], dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef int64_t v, i
    cdef double acc
    with nogil:
        for v in range(offsets.shape[0] - 1):
            acc = 0.0
            for i in range(offsets[v], offsets[v + 1]):
                acc += values[i]
                out[i] = acc
    return out_arr


def segment_max(cnp.ndarray values_arr, cnp.ndarray offsets_arr):
    cdef const double[::1] values = np.ascontiguousarray(values_arr, dtype=np.float64)
    cdef const int64_t[::1] offsets = np.ascontiguousarray(offsets_arr, dtype=np.int64)
    out_arr = np.zeros(offsets.shape[0] - 1, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef int64_t v, i
    cdef double m
    with nogil:
        for v in range(offsets.shape[0] - 1):
            m = 0.0
            for i in range(offsets[v], offsets[v + 1]):
                if values[i] > m or i == offsets[v]:
                    m = values[i]
            out[v] = m
    return out_arr


def individual_batch(int app_code, cnp.ndarray params_arr,
                     cnp.ndarray row_offsets_arr, cnp.ndarray col_indices_arr,
                     cnp.ndarray weights_arr, cnp.ndarray weight_prefix_arr,
                     cnp.ndarray max_weight_arr,
                     cnp.ndarray transits_arr, cnp.ndarray t_prev_arr,
                     cnp.ndarray sample_ids_arr, cnp.ndarray transit_idxs_arr,
                     cnp.ndarray slots_arr,
                     object seed, object step, cnp.ndarray out_arr):
    cdef const double[::1] params = np.ascontiguousarray(params_arr, dtype=np.float64)
    cdef const int64_t[::1] row_offsets = row_offsets_arr
    cdef const int64_t[::1] col_indices = col_indices_arr
    cdef const double[::1] weights = weights_arr
    cdef const double[::1] weight_prefix = weight_prefix_arr
    cdef const double[::1] max_weight = max_weight_arr
    cdef const int64_t[::1] transits = transits_arr
    cdef const int64_t[::1] t_prev = t_prev_arr
    cdef const int64_t[::1] sample_ids = sample_ids_arr
    cdef const int64_t[::1] transit_idxs = transit_idxs_arr
    cdef const int64_t[::1] slots = slots_arr
    cdef int64_t[::1] out = out_arr

    cdef uint64_t useed = <uint64_t>(<object>seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t ustep = <uint64_t>(<long long>step)
    cdef int64_t n = transits.shape[0]
    cdef int64_t i, v, base, deg, pick, t, t_lo, t_hi, nbr
    cdef uint64_t b0, b1, u
    cdef double r, term, w, factor, env
    cdef double f_ret = 0.0, f_adj = 0.0, f_far = 0.0, f_max = 0.0
    cdef double p, q
    cdef long tries
    cdef bint stalled = False

    if n == 0:
        return

    if app_code == K_NODE2VEC:
        p = params[0]
        q = params[1]
        if params[2] == 0.0:
            f_ret = 1.0 / p; f_adj = 1.0; f_far = 1.0 / q
        else:
            f_ret = p; f_adj = 1.0 / q; f_far = 1.0
        f_max = f_ret
        if f_adj > f_max:
            f_max = f_adj
        if f_far > f_max:
            f_max = f_far

    with nogil:
        if app_code == K_DEEPWALK:
            b0 = _base_for(useed, ustep, 0, 0)
            for i in range(n):
                v = transits[i]
                if row_offsets[v + 1] - row_offsets[v] <= 0:
                    out[i] = -1
                    continue
                r = _to_unit(_key(b0, <uint64_t>sample_ids[i],
                                  <uint64_t>transit_idxs[i], <uint64_t>slots[i]))
                out[i] = _weighted_pick(row_offsets, col_indices, weight_prefix, v, r)
        elif app_code == K_PPR:
            term = params[0]
            b0 = _base_for(useed, ustep, 0, 0)
            b1 = _base_for(useed, ustep, 0, 1)
            for i in range(n):
                v = transits[i]
                if row_offsets[v + 1] - row_offsets[v] <= 0:
                    out[i] = -1
                    continue
                r = _to_unit(_key(b0, <uint64_t>sample_ids[i],
                                  <uint64_t>transit_idxs[i], <uint64_t>slots[i]))
                if r < term:
                    out[i] = -1
                    continue
                r = _to_unit(_key(b1, <uint64_t>sample_ids[i],
                                  <uint64_t>transit_idxs[i], <uint64_t>slots[i]))
                out[i] = _weighted_pick(row_offsets, col_indices, weight_prefix, v, r)
        elif app_code == K_KHOP or app_code == K_MULTIRW:
            b0 = _base_for(useed, ustep, 0, 0)
            for i in range(n):
                v = transits[i]
                base = row_offsets[v]
                deg = row_offsets[v + 1] - base
                if deg <= 0:
                    out[i] = -1
                    continue
                u = _key(b0, <uint64_t>sample_ids[i], <uint64_t>transit_idxs[i],
                         <uint64_t>slots[i])
                out[i] = col_indices[base + <int64_t>(u % <uint64_t>deg)]
        elif app_code == K_NODE2VEC:
            for i in range(n):
                v = transits[i]
                base = row_offsets[v]
                deg = row_offsets[v + 1] - base
                if deg <= 0:
                    out[i] = -1
                    continue
                t = t_prev[i]
                if t < 0:
                    b0 = _base_for(useed, ustep, 0, 0)
                    r = _to_unit(_key(b0, <uint64_t>sample_ids[i],
                                      <uint64_t>transit_idxs[i], <uint64_t>slots[i]))
                    out[i] = _weighted_pick(row_offsets, col_indices, weight_prefix,
                                            v, r)
                    continue
                t_lo = row_offsets[t]
                t_hi = row_offsets[t + 1]
                env = max_weight[v] * f_max
                out[i] = -1
                for tries in range(NODE2VEC_MAX_TRIES):
                    b0 = _base_for(useed, ustep, 0, <uint64_t>(2 * tries))
                    u = _key(b0, <uint64_t>sample_ids[i], <uint64_t>transit_idxs[i],
                             <uint64_t>slots[i])
                    pick = base + <int64_t>(u % <uint64_t>deg)
                    nbr = col_indices[pick]
                    w = weights[pick]
                    if nbr == t:
                        factor = f_ret
                    elif _contains(col_indices, t_lo, t_hi, nbr):
                        factor = f_adj
                    else:
                        factor = f_far
                    b1 = _base_for(useed, ustep, 0, <uint64_t>(2 * tries + 1))
                    r = _to_unit(_key(b1, <uint64_t>sample_ids[i],
                                      <uint64_t>transit_idxs[i], <uint64_t>slots[i]))
                    if env <= 0 or r * env < w * factor:
                        out[i] = nbr
                        break
                if out[i] == -1:
                    stalled = True
                    break

    if stalled:
        raise SamplerStallError(
            f"rejection sampler exceeded {NODE2VEC_MAX_TRIES} tries")
    if app_code not in (K_DEEPWALK, K_PPR, K_KHOP, K_MULTIRW, K_NODE2VEC):
        raise ValueError(f"unknown app code {app_code}")

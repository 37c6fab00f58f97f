"""Immutable CSR graph with the per-vertex utilities the samplers need.

Graphs are built from whitespace-separated edge-list text ("src dst"
or "src dst weight", '#' comments) or from a small binary cache format.
Adjacency lists are kept sorted by destination so membership tests are
binary searches; per-vertex weight prefix sums and maxima are
precomputed for weighted picks and rejection envelopes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import EmptyGraphError, GraphParseError, NoNeighborsError
from .kernels import segment_max, segmented_prefix_sum
from .rng import DOMAIN_EDGE_WEIGHT, key_uniform

CACHE_MAGIC = b"NDGR"
CACHE_VERSION = 1


class AdjacencyView(NamedTuple):
    """Zero-copy view of one vertex's outgoing edges."""

    vertices: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class Graph:
    """Weighted directed graph in CSR form. Immutable after construction,
    safe for unrestricted shared reads."""

    n_vertices: int
    row_offsets: np.ndarray      # int64, len n_vertices+1
    col_indices: np.ndarray      # int64, len n_edges, sorted per segment
    weights: np.ndarray          # float64, len n_edges
    remap: np.ndarray            # int64, dense id -> original id
    per_vertex_max_weight: np.ndarray = field(default=None)
    per_vertex_weight_prefix: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.per_vertex_weight_prefix is None:
            object.__setattr__(self, "per_vertex_weight_prefix",
                               segmented_prefix_sum(self.weights, self.row_offsets))
        if self.per_vertex_max_weight is None:
            object.__setattr__(self, "per_vertex_max_weight",
                               segment_max(self.weights, self.row_offsets))

    @property
    def n_edges(self) -> int:
        return len(self.col_indices)

    def degree(self, v: int) -> int:
        return int(self.row_offsets[v + 1] - self.row_offsets[v])

    def degrees(self) -> np.ndarray:
        return self.row_offsets[1:] - self.row_offsets[:-1]

    def neighbors(self, v: int) -> AdjacencyView:
        lo, hi = self.row_offsets[v], self.row_offsets[v + 1]
        return AdjacencyView(self.col_indices[lo:hi], self.weights[lo:hi])

    def max_edge_weight(self, v: int) -> float:
        return float(self.per_vertex_max_weight[v])

    def total_weight(self, v: int) -> float:
        lo, hi = self.row_offsets[v], self.row_offsets[v + 1]
        return float(self.per_vertex_weight_prefix[hi - 1]) if hi > lo else 0.0

    def has_edge(self, v: int, u: int) -> bool:
        lo, hi = self.row_offsets[v], self.row_offsets[v + 1]
        i = lo + np.searchsorted(self.col_indices[lo:hi], u, side="left")
        return i < hi and self.col_indices[i] == u

    def weighted_pick(self, v: int, r: float) -> int:
        """Neighbor of v chosen with probability w(v,u)/total weight.

        r is a uniform draw in [0,1); the pick inverts the inclusive
        prefix-sum segment with an upper-bound binary search.
        """
        lo, hi = int(self.row_offsets[v]), int(self.row_offsets[v + 1])
        if hi <= lo:
            raise NoNeighborsError(f"vertex {v} has no outgoing edges")
        total = self.per_vertex_weight_prefix[hi - 1]
        idx = lo + int(np.searchsorted(
            self.per_vertex_weight_prefix[lo:hi], r * total, side="right"))
        if idx > hi - 1:  # r*total can round up onto the last prefix entry
            idx = hi - 1
        return int(self.col_indices[idx])

    def edges(self):
        """Iterate (src, dst, weight) over all edges, dense ids."""
        for v in range(self.n_vertices):
            lo, hi = self.row_offsets[v], self.row_offsets[v + 1]
            for i in range(lo, hi):
                yield v, int(self.col_indices[i]), float(self.weights[i])


def from_edges(src, dst, weights=None, n_vertices=None, remap=None) -> Graph:
    """Build a CSR graph from parallel edge arrays with dense vertex ids."""
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    if n_vertices is None:
        n_vertices = int(max(src.max(initial=-1), dst.max(initial=-1)) + 1)
    if weights is None:
        weights = np.ones(len(src), dtype=np.float64)
    else:
        weights = np.asarray(weights, dtype=np.float64)
        if (weights < 0).any():
            raise ValueError("edge weights must be non-negative")
    order = np.lexsort((dst, src))
    src, dst, weights = src[order], dst[order], weights[order]
    row_offsets = np.zeros(n_vertices + 1, dtype=np.int64)
    np.add.at(row_offsets, src + 1, 1)
    np.cumsum(row_offsets, out=row_offsets)
    if remap is None:
        remap = np.arange(n_vertices, dtype=np.int64)
    return Graph(n_vertices=n_vertices, row_offsets=row_offsets,
                 col_indices=np.ascontiguousarray(dst),
                 weights=np.ascontiguousarray(weights),
                 remap=np.asarray(remap, dtype=np.int64))


def load_edge_list(path, weighted: bool = False, default_weight_range=(1.0, 5.0),
                   undirected: bool = False, seed: int = 0) -> Graph:
    """Parse an edge-list file into a CSR graph.

    Vertex ids may be sparse; they are compacted onto [0, n) and the
    original ids kept in graph.remap. With weighted=True, lines missing
    a weight get one drawn uniformly from default_weight_range, keyed on
    (seed, line number) so reloads reproduce the same graph.
    """
    srcs: list[int] = []
    dsts: list[int] = []
    wts: list[float] = []
    lo_w, hi_w = float(default_weight_range[0]), float(default_weight_range[1])
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise GraphParseError(line_no, f"expected 2 or 3 fields, got {len(parts)}")
            try:
                s, d = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise GraphParseError(line_no, f"bad vertex id: {exc}") from None
            if s < 0 or d < 0:
                raise GraphParseError(line_no, "vertex ids must be non-negative")
            if weighted:
                if len(parts) == 3:
                    try:
                        w = float(parts[2])
                    except ValueError as exc:
                        raise GraphParseError(line_no, f"bad weight: {exc}") from None
                    if w < 0:
                        raise GraphParseError(line_no, "weight must be non-negative")
                else:
                    u = key_uniform(seed, sample_id=line_no, domain=DOMAIN_EDGE_WEIGHT)
                    w = lo_w + (hi_w - lo_w) * u
            else:
                w = 1.0
            srcs.append(s)
            dsts.append(d)
            wts.append(w)
            if undirected:
                srcs.append(d)
                dsts.append(s)
                wts.append(w)
    if not srcs:
        raise EmptyGraphError(f"{path}: no edges found")

    src = np.asarray(srcs, dtype=np.int64)
    dst = np.asarray(dsts, dtype=np.int64)
    original = np.unique(np.concatenate([src, dst]))  # sorted original ids
    src = np.searchsorted(original, src)
    dst = np.searchsorted(original, dst)
    return from_edges(src, dst, np.asarray(wts), n_vertices=len(original),
                      remap=original)


def save_cache(graph: Graph, path) -> None:
    """Write the binary cache: magic, version, counts, little-endian arrays."""
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<I", CACHE_VERSION))
        fh.write(struct.pack("<QQ", graph.n_vertices, graph.n_edges))
        fh.write(graph.row_offsets.astype("<i8").tobytes())
        fh.write(graph.col_indices.astype("<i8").tobytes())
        fh.write(graph.weights.astype("<f8").tobytes())
        fh.write(graph.remap.astype("<i8").tobytes())


def load_cache(path) -> Graph:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != CACHE_MAGIC:
            raise GraphParseError(1, f"bad magic {magic!r}, expected {CACHE_MAGIC!r}")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != CACHE_VERSION:
            raise GraphParseError(1, f"unsupported cache version {version}")
        n, m = struct.unpack("<QQ", fh.read(16))
        row_offsets = np.frombuffer(fh.read(8 * (n + 1)), dtype="<i8").astype(np.int64)
        col_indices = np.frombuffer(fh.read(8 * m), dtype="<i8").astype(np.int64)
        weights = np.frombuffer(fh.read(8 * m), dtype="<f8").astype(np.float64)
        remap = np.frombuffer(fh.read(8 * n), dtype="<i8").astype(np.int64)
    return Graph(n_vertices=int(n), row_offsets=row_offsets, col_indices=col_indices,
                 weights=weights, remap=remap)

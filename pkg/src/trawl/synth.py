"""Synthetic graph generators for tests and benchmarks.

Desk-scale stand-ins for the big public graphs: a directed path, a hub
star, a preferential-attachment power law, and a uniform random graph.
All are deterministic given their seed.
"""

from __future__ import annotations

import numpy as np

from .graph import Graph, from_edges


def _weights(n_edges: int, weighted: bool, rng: np.random.Generator) -> np.ndarray | None:
    if not weighted:
        return None
    return rng.uniform(1.0, 5.0, size=n_edges)


def path_graph(n: int, weighted: bool = False, seed: int = 0) -> Graph:
    """0 -> 1 -> ... -> n-1; the last vertex is a dead end."""
    rng = np.random.default_rng(seed)
    src = np.arange(n - 1, dtype=np.int64)
    return from_edges(src, src + 1, _weights(n - 1, weighted, rng), n_vertices=n)


def cycle_graph(n: int, weighted: bool = False, seed: int = 0) -> Graph:
    """Directed ring; every vertex has out-degree 1."""
    rng = np.random.default_rng(seed)
    src = np.arange(n, dtype=np.int64)
    return from_edges(src, (src + 1) % n, _weights(n, weighted, rng), n_vertices=n)


def star_graph(n: int, weighted: bool = False, seed: int = 0) -> Graph:
    """Hub 0 with edges to every spoke; spokes are dead ends. Stresses
    the transit grouping with one giant group."""
    rng = np.random.default_rng(seed)
    dst = np.arange(1, n, dtype=np.int64)
    src = np.zeros(n - 1, dtype=np.int64)
    return from_edges(src, dst, _weights(n - 1, weighted, rng), n_vertices=n)


def powerlaw_graph(n: int, attach: int = 4, weighted: bool = False,
                   seed: int = 0) -> Graph:
    """Preferential attachment, symmetrized so there are no dead ends.

    Each new vertex attaches `attach` edges to targets drawn from the
    repeated-endpoint pool (the usual scale-free construction); both
    directions of every undirected edge are emitted.
    """
    if n <= attach:
        raise ValueError("need n > attach")
    rng = np.random.default_rng(seed)
    targets: list[int] = []
    pool: list[int] = []
    srcs: list[int] = []
    dsts: list[int] = []
    # seed vertices in a ring so the pool starts non-degenerate
    for v in range(attach):
        srcs.append(v)
        dsts.append((v + 1) % attach)
        pool.extend((v, (v + 1) % attach))
    for v in range(attach, n):
        picks = rng.integers(0, len(pool), size=attach)
        targets = [pool[i] for i in picks]
        for t in targets:
            srcs.append(v)
            dsts.append(t)
            pool.extend((v, t))
    src = np.asarray(srcs, dtype=np.int64)
    dst = np.asarray(dsts, dtype=np.int64)
    both_src = np.concatenate([src, dst])
    both_dst = np.concatenate([dst, src])
    w = _weights(len(src), weighted, rng)
    return from_edges(both_src, both_dst,
                      np.concatenate([w, w]) if w is not None else None,
                      n_vertices=n)


def uniform_random_graph(n: int, m: int, weighted: bool = False, seed: int = 0,
                         min_out_degree: int = 0) -> Graph:
    """m uniformly random directed edges; optionally patch every vertex
    up to a minimum out-degree with ring edges (dead-end-free graphs)."""
    rng = np.random.default_rng(seed)
    src = rng.integers(0, n, size=m).astype(np.int64)
    dst = rng.integers(0, n, size=m).astype(np.int64)
    if min_out_degree > 0:
        deg = np.bincount(src, minlength=n)
        lacking = np.nonzero(deg < min_out_degree)[0]
        extra_src = np.repeat(lacking, min_out_degree - deg[lacking])
        extra_dst = (extra_src + 1 + np.arange(len(extra_src))) % n
        src = np.concatenate([src, extra_src])
        dst = np.concatenate([dst, extra_dst])
    return from_edges(src, dst, _weights(len(src), weighted, rng), n_vertices=n)


GENERATORS = {
    "path": path_graph,
    "cycle": cycle_graph,
    "star": star_graph,
    "powerlaw": powerlaw_graph,
}


def make_synthetic(spec: str, weighted: bool = False, seed: int = 0) -> Graph:
    """Build a generator graph from a compact spec like "powerlaw:10000"."""
    name, _, arg = spec.partition(":")
    if name not in GENERATORS:
        raise ValueError(f"unknown synthetic graph {name!r}; "
                         f"choose from {sorted(GENERATORS)}")
    n = int(arg) if arg else 1000
    return GENERATORS[name](n, weighted=weighted, seed=seed)

"""The bundled sampling applications.

Every app is expressed purely through the SamplingApp bundle; the
engines never special-case an application. The next functions here are
the reference semantics; apps that also carry a kernel_code have a
compiled/vectorized twin in trawl.kernels which must stay draw-for-draw
identical (protocols documented on each next function).

Default hyperparameters: random-walk length 100; ppr termination 1/100;
node2vec p=2.0 q=0.5; k-hop fanouts [25, 10]; layer cap 2000 with step
size 1000; 100 roots per multi-root walk; batch apps use batch and step
size 64; cluster samples take 20 clusters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    COLLECTIVE,
    INDIVIDUAL,
    INF_STEPS,
    NULL_VERTEX,
    TRANSITS_ROOT_PICK,
    Sample,
    SamplingApp,
)
from .errors import SamplerStallError
from .kernels import K_DEEPWALK, K_KHOP, K_MULTIRW, K_NODE2VEC, K_PPR
from .rng import DOMAIN_CLUSTER_ASSIGN, DOMAIN_CLUSTER_PICK, DOMAIN_ROOT_INIT, key_u64

NODE2VEC_MAX_TRIES = 1_000_000


@dataclass
class Node2vecParams:
    p: float = 2.0
    q: float = 0.5
    walk_length: int = 100
    # "reciprocal": return edge weighted 1/p, previous-neighbor 1, rest 1/q.
    # "direct": return edge weighted p, previous-neighbor 1/q, rest 1.
    factor_convention: str = "reciprocal"


@dataclass
class PprParams:
    termination_probability: float = 0.01


@dataclass
class LayerParams:
    max_size: int = 2000
    step_size: int = 1000


@dataclass
class KhopParams:
    fanouts: list = field(default_factory=lambda: [25, 10])


@dataclass
class MultiRwParams:
    roots_per_sample: int = 100
    walk_length: int = 100


@dataclass
class BatchParams:
    batch_size: int = 64
    step_size: int = 64
    steps: int = 5
    distribution: str = "uniform"  # or "degree_sq"


@dataclass
class ClusterParams:
    clusters_per_sample: int = 20
    num_clusters: int = 100


def _uniform_roots(count: int):
    """Root initializer drawing `count` distinct vertices when the graph
    is large enough (otherwise duplicates are allowed)."""

    def init(graph, sample_id: int, seed: int) -> np.ndarray:
        roots: list[int] = []
        seen: set[int] = set()
        distinct = graph.n_vertices >= count
        draw = 0
        while len(roots) < count:
            v = key_u64(seed, sample_id, domain=DOMAIN_ROOT_INIT, draw=draw) \
                % graph.n_vertices
            draw += 1
            if distinct:
                if v in seen:
                    continue
                seen.add(v)
            roots.append(v)
        return np.asarray(roots, dtype=np.int64)

    return init


def _weighted_step(sample: Sample, transits, src_edges, rng, draw: int):
    if len(src_edges) == 0:
        return NULL_VERTEX
    return sample.graph.weighted_pick(int(transits[0]), rng.uniform(draw))


def deepwalk_next(sample, transits, src_edges, step, rng):
    """Biased walk step: neighbor picked proportionally to edge weight.
    Draws: 0 = weighted pick."""
    return _weighted_step(sample, transits, src_edges, rng, 0)


def make_deepwalk(walk_length: int = 100) -> SamplingApp:
    return SamplingApp(
        name="deepwalk", sampling_type=INDIVIDUAL, steps=walk_length,
        sample_size=lambda step: 1, next_fn=deepwalk_next,
        init_roots=_uniform_roots(1), chain_walk=True, kernel_code=K_DEEPWALK,
        params={"walk_length": walk_length})


def make_ppr(params: PprParams | None = None) -> SamplingApp:
    params = params or PprParams()
    term = params.termination_probability

    def ppr_next(sample, transits, src_edges, step, rng):
        """Walk that stops with the configured probability each step.
        Draws: 0 = termination test, 1 = weighted pick."""
        if len(src_edges) == 0:
            return NULL_VERTEX
        if rng.uniform(0) < term:
            return NULL_VERTEX
        return sample.graph.weighted_pick(int(transits[0]), rng.uniform(1))

    return SamplingApp(
        name="ppr", sampling_type=INDIVIDUAL, steps=INF_STEPS,
        sample_size=lambda step: 1, next_fn=ppr_next,
        init_roots=_uniform_roots(1), chain_walk=True, kernel_code=K_PPR,
        kernel_params=np.asarray([term], dtype=np.float64),
        params={"termination_probability": term})


def node2vec_factors(params: Node2vecParams):
    if params.factor_convention == "reciprocal":
        return 1.0 / params.p, 1.0, 1.0 / params.q
    if params.factor_convention == "direct":
        return params.p, 1.0 / params.q, 1.0
    raise ValueError(f"unknown factor convention {params.factor_convention!r}")


def make_node2vec(params: Node2vecParams | None = None) -> SamplingApp:
    params = params or Node2vecParams()
    f_ret, f_adj, f_far = node2vec_factors(params)
    f_max = max(f_ret, f_adj, f_far)

    def node2vec_next(sample, transits, src_edges, step, rng):
        """Second-order walk step via rejection sampling.

        The candidate edge (v,u) is accepted with probability
        w(v,u)*factor(u) / (maxWeight(v)*maxFactor), where factor
        depends on whether u is the previous vertex t, a neighbor of t,
        or neither. Draws: pairs (2j, 2j+1) = pick/accept for try j;
        step 0 falls back to a weighted pick on draw 0.
        """
        if len(src_edges) == 0:
            return NULL_VERTEX
        if step == 0:
            return _weighted_step(sample, transits, src_edges, rng, 0)
        g = sample.graph
        v = int(transits[0])
        t = sample.prev_vertex(2, 0)
        env = g.max_edge_weight(v) * f_max
        deg = len(src_edges)
        for j in range(NODE2VEC_MAX_TRIES):
            pick = rng.u64(2 * j) % deg
            u = int(src_edges.vertices[pick])
            w = float(src_edges.weights[pick])
            if u == t:
                factor = f_ret
            elif g.has_edge(t, u):
                factor = f_adj
            else:
                factor = f_far
            if env <= 0 or rng.uniform(2 * j + 1) * env < w * factor:
                return u
        raise SamplerStallError(
            f"rejection sampler exceeded {NODE2VEC_MAX_TRIES} tries "
            f"(sample {sample.id}, step {step})")

    mode = 0.0 if params.factor_convention == "reciprocal" else 1.0
    return SamplingApp(
        name="node2vec", sampling_type=INDIVIDUAL, steps=params.walk_length,
        sample_size=lambda step: 1, next_fn=node2vec_next,
        init_roots=_uniform_roots(1), needs_prev2=True, chain_walk=True,
        kernel_code=K_NODE2VEC,
        kernel_params=np.asarray([params.p, params.q, mode], dtype=np.float64),
        params={"p": params.p, "q": params.q,
                "factor_convention": params.factor_convention,
                "walk_length": params.walk_length})


def khop_next(sample, transits, src_edges, step, rng):
    """Uniform neighbor pick. Draws: 0 = index."""
    deg = len(src_edges)
    if deg == 0:
        return NULL_VERTEX
    return int(src_edges.vertices[rng.u64(0) % deg])


def make_khop(params: KhopParams | None = None) -> SamplingApp:
    params = params or KhopParams()
    fanouts = list(params.fanouts)

    return SamplingApp(
        name="khop", sampling_type=INDIVIDUAL, steps=len(fanouts),
        sample_size=lambda step: fanouts[step], next_fn=khop_next,
        init_roots=_uniform_roots(1), kernel_code=K_KHOP,
        params={"fanouts": fanouts})


def make_multirw(params: MultiRwParams | None = None) -> SamplingApp:
    params = params or MultiRwParams()

    def multirw_post_step(sample, step, transits, results):
        # The sampled vertex takes the chosen root's place in the root set
        # (first occurrence; the multiset size never changes).
        v = int(results[0])
        if v == NULL_VERTEX:
            return
        pos = np.nonzero(sample.roots == int(transits[0]))[0]
        sample.roots[pos[0]] = v

    return SamplingApp(
        name="multirw", sampling_type=INDIVIDUAL, steps=params.walk_length,
        sample_size=lambda step: 1, next_fn=khop_next,
        transit_source=TRANSITS_ROOT_PICK, post_step=multirw_post_step,
        init_roots=_uniform_roots(params.roots_per_sample), chain_walk=True,
        kernel_code=K_MULTIRW,
        params={"roots_per_sample": params.roots_per_sample,
                "walk_length": params.walk_length})


def make_layer(params: LayerParams | None = None) -> SamplingApp:
    params = params or LayerParams()
    max_size = params.max_size

    def layer_next(sample, transits, combined, step, rng):
        """Uniform pick from the combined neighborhood while the sample
        is below its size cap. Draws: 0 = index."""
        if sample.size() >= max_size:
            return NULL_VERTEX
        n = len(combined)
        if n == 0:
            return NULL_VERTEX
        return int(combined.neighbors[rng.u64(0) % n])

    def layer_select_batch(sample, transits, combined, step, seed, out):
        # vectorized twin of the slot loop: with non-empty entries every
        # pick below the cap succeeds, so exactly the first
        # (max_size - current size) slots draw
        from .kernels import keyed_u64

        n = len(combined)
        if n == 0:
            return
        take = min(len(out), max(0, max_size - sample.size()))
        if take == 0:
            return
        slots = np.arange(take, dtype=np.int64)
        zeros = np.zeros(take, dtype=np.int64)
        u = keyed_u64(seed, np.full(take, sample.id, dtype=np.int64), step,
                      zeros, slots)
        out[:take] = combined.neighbors[(u % np.uint64(n)).astype(np.int64)]

    return SamplingApp(
        name="layer", sampling_type=COLLECTIVE, steps=INF_STEPS,
        sample_size=lambda step: params.step_size, next_fn=layer_next,
        select_batch=layer_select_batch, init_roots=_uniform_roots(1),
        params={"max_size": max_size, "step_size": params.step_size})


def _graph_distribution_pick(graph, distribution: str, rng):
    if distribution == "uniform":
        return rng.u64(0) % graph.n_vertices
    # degree-squared-proportional, inverted through its prefix sum
    deg = (graph.row_offsets[1:] - graph.row_offsets[:-1]).astype(np.float64)
    cum = np.cumsum(deg * deg)
    total = cum[-1]
    idx = int(np.searchsorted(cum, rng.uniform(0) * total, side="right"))
    return min(idx, graph.n_vertices - 1)


def make_importance(name: str, params: BatchParams | None = None) -> SamplingApp:
    """Whole-graph importance sampling with per-step edge recording
    (the fastgcn and ladies app ids share this structure)."""
    params = params or BatchParams()
    distribution = params.distribution

    def importance_next(sample, transits, combined, step, rng):
        """Draw a vertex of the whole graph, record an edge to every
        transit adjacent to it, return it. Draws: 0 = vertex pick."""
        g = sample.graph
        v = int(_graph_distribution_pick(g, distribution, rng))
        hit = [int(t) for t in transits if g.has_edge(int(t), v)]
        if hit:
            sample.record_edges(step, np.asarray(hit, dtype=np.int64),
                                np.full(len(hit), v, dtype=np.int64))
        return v

    return SamplingApp(
        name=name, sampling_type=COLLECTIVE, steps=params.steps,
        sample_size=lambda step: params.step_size, next_fn=importance_next,
        init_roots=_uniform_roots(params.batch_size), records_edges=True,
        params={"batch_size": params.batch_size, "step_size": params.step_size,
                "steps": params.steps, "distribution": distribution})


def make_mvs(params: BatchParams | None = None) -> SamplingApp:
    """One-hop sampling over the combined neighborhood of the initial
    vertices, recording the traversed edge."""
    params = params or BatchParams()

    def mvs_next(sample, transits, combined, step, rng):
        """Uniform pick of a combined-neighborhood entry; the entry's
        (source transit, neighbor) edge is recorded. Draws: 0 = index."""
        n = len(combined)
        if n == 0:
            return NULL_VERTEX
        i = rng.u64(0) % n
        t = int(combined.src_transits[i])
        v = int(combined.neighbors[i])
        sample.record_edges(step, np.asarray([t], dtype=np.int64),
                            np.asarray([v], dtype=np.int64))
        return v

    return SamplingApp(
        name="mvs", sampling_type=COLLECTIVE, steps=1,
        sample_size=lambda step: params.step_size, next_fn=mvs_next,
        init_roots=_uniform_roots(params.batch_size), records_edges=True,
        params={"batch_size": params.batch_size, "step_size": params.step_size})


def cluster_assignment(graph, seed: int, num_clusters: int) -> np.ndarray:
    """Random vertex -> cluster id map, a pure function of (seed, vertex)."""
    from .kernels import keyed_u64

    ids = np.arange(graph.n_vertices, dtype=np.int64)
    u = keyed_u64(seed, ids, 0, np.zeros_like(ids), np.zeros_like(ids),
                  domain=DOMAIN_CLUSTER_ASSIGN)
    return (u % np.uint64(num_clusters)).astype(np.int64)


def make_clustergcn(params: ClusterParams | None = None) -> SamplingApp:
    params = params or ClusterParams()

    def init(graph, sample_id: int, seed: int) -> np.ndarray:
        assign = cluster_assignment(graph, seed, params.num_clusters)
        want = min(params.clusters_per_sample, params.num_clusters)
        chosen: set[int] = set()
        draw = 0
        while len(chosen) < want:
            c = key_u64(seed, sample_id, domain=DOMAIN_CLUSTER_PICK, draw=draw) \
                % params.num_clusters
            draw += 1
            chosen.add(c)
        return np.nonzero(np.isin(assign, sorted(chosen)))[0].astype(np.int64)

    def clustergcn_next(sample, transits, combined, step, rng):
        """Record every edge with both endpoints inside the sample's
        vertex set; adds no vertices. No draws."""
        inside = np.isin(combined.neighbors, sample.roots)
        if inside.any():
            sample.record_edges(step, combined.src_transits[inside],
                                combined.neighbors[inside])
        return NULL_VERTEX

    return SamplingApp(
        name="clustergcn", sampling_type=COLLECTIVE, steps=1,
        sample_size=lambda step: 1, next_fn=clustergcn_next,
        init_roots=init, records_edges=True,
        params={"clusters_per_sample": params.clusters_per_sample,
                "num_clusters": params.num_clusters})


def make_app(name: str, **kwargs) -> SamplingApp:
    """Build a bundled app by id with keyword parameter overrides."""
    if name == "deepwalk":
        return make_deepwalk(**kwargs)
    if name == "ppr":
        return make_ppr(PprParams(**kwargs) if kwargs else None)
    if name == "node2vec":
        return make_node2vec(Node2vecParams(**kwargs) if kwargs else None)
    if name == "khop":
        return make_khop(KhopParams(**kwargs) if kwargs else None)
    if name == "multirw":
        return make_multirw(MultiRwParams(**kwargs) if kwargs else None)
    if name == "layer":
        return make_layer(LayerParams(**kwargs) if kwargs else None)
    if name in ("fastgcn", "ladies"):
        return make_importance(name, BatchParams(**kwargs) if kwargs else None)
    if name == "mvs":
        return make_mvs(BatchParams(**kwargs) if kwargs else None)
    if name == "clustergcn":
        return make_clustergcn(ClusterParams(**kwargs) if kwargs else None)
    raise ValueError(f"unknown app {name!r}")


APP_NAMES = ["deepwalk", "ppr", "node2vec", "multirw", "khop", "layer",
             "fastgcn", "ladies", "clustergcn", "mvs"]

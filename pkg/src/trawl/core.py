"""The user-facing sampling abstraction.

A sampling application is a bundle of callbacks (next, step_transits,
sample_size, unique, ...) plus declarative fields describing how it
runs. Samples are the growing output units; each step appends one slot
array per sample. The engines own all iteration; apps only decide what
vertex (if any) each slot receives.

Two sampling granularities exist:

  individual  next runs once per (sample, transit, slot) with that
              transit's adjacency;
  collective  next runs per sample over the combined adjacency of all
              its transits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .rng import DOMAIN_STEP_TRANSITS, RngStream, key_u64

NULL_VERTEX = -1  # "add nothing" sentinel; never a valid vertex id
INF_STEPS = math.inf

INDIVIDUAL = "individual"
COLLECTIVE = "collective"

# How transits are derived each step.
TRANSITS_PREV_STEP = "prev_step"  # vertices added at the previous step
TRANSITS_ROOT_PICK = "root_pick"  # one root chosen at random per step

DEFAULT_STEP_CAP = 10_000  # hard bound for INF-step apps

_EMPTY = np.empty(0, dtype=np.int64)


class Sample:
    """One unit of sampling output.

    roots are the initial vertices; step_vertices[i] holds the slots
    written at step i (NULL_VERTEX marks empty slots). Apps that record
    adjacency keep per-step (transit, vertex) pair arrays in
    recorded_edges. The engine owning the sample sets .step before
    invoking callbacks so the prev_* accessors can reference it.

    Chain walks (one slot per step) may be stored as one flat array via
    set_chain; per-step views are synthesized on first access.
    """

    __slots__ = ("id", "roots", "recorded_edges", "graph", "step",
                 "_steps", "_chain", "_transit_cache", "_sp_fallback")

    def __init__(self, sample_id: int, roots, graph=None):
        self.id = sample_id
        self.roots = np.asarray(roots, dtype=np.int64)
        self._steps: list[np.ndarray] | None = []
        self._chain: np.ndarray | None = None
        self.recorded_edges: list[tuple[np.ndarray, np.ndarray]] = []
        self.graph = graph
        self.step = 0
        self._transit_cache: tuple[int, np.ndarray] | None = None
        self._sp_fallback = False

    def set_chain(self, chain: np.ndarray) -> None:
        self._chain = chain
        self._steps = None

    @property
    def step_vertices(self) -> list[np.ndarray]:
        if self._steps is None:
            self._steps = [self._chain[i:i + 1] for i in range(len(self._chain))]
        return self._steps

    def n_steps_run(self) -> int:
        if self._steps is None:
            return len(self._chain)
        return len(self._steps)

    def vertices_at(self, step: int) -> np.ndarray:
        """Non-NULL vertices written at a step; roots for step -1;
        empty for steps the sample never reached."""
        if step == -1:
            return self.roots
        if self._steps is None:
            if step >= len(self._chain):
                return _EMPTY
            sv = self._chain[step:step + 1]
        else:
            if step >= len(self._steps):
                return _EMPTY
            sv = self._steps[step]
        return sv[sv != NULL_VERTEX]

    def prev_vertex(self, back: int, pos: int) -> int:
        """Vertex at position pos of the step `back` steps before the
        current one (roots count as step -1)."""
        return int(self.vertices_at(self.step - back)[pos])

    def prev_edges(self, back: int, pos: int):
        return self.graph.neighbors(self.prev_vertex(back, pos))

    def size(self) -> int:
        """Roots plus everything sampled so far."""
        return len(self.roots) + self.total_sampled()

    def total_sampled(self) -> int:
        if self._steps is None:
            return int((self._chain != NULL_VERTEX).sum())
        return sum(int((sv != NULL_VERTEX).sum()) for sv in self._steps)

    def final_vertices(self) -> np.ndarray:
        """Roots followed by all sampled vertices in step order."""
        if self._steps is None:
            return np.concatenate([self.roots,
                                   self._chain[self._chain != NULL_VERTEX]])
        parts = [self.roots] + [self.vertices_at(i)
                                for i in range(len(self._steps))]
        return np.concatenate(parts)

    def record_edges(self, step: int, transits: np.ndarray, vertices: np.ndarray):
        while len(self.recorded_edges) <= step:
            self.recorded_edges.append((_EMPTY, _EMPTY))
        old_t, old_v = self.recorded_edges[step]
        self.recorded_edges[step] = (
            np.concatenate([old_t, np.asarray(transits, dtype=np.int64)]),
            np.concatenate([old_v, np.asarray(vertices, dtype=np.int64)]))


@dataclass
class SamplingApp:
    """Bundle of user-defined functions defining one application.

    next_fn(sample, transits, src_edges, step, rng) returns a vertex id
    or NULL_VERTEX. For individual apps transits is a length-1 array and
    src_edges that transit's AdjacencyView; for collective apps transits
    is the full transit array and src_edges the CombinedNeighborhood.
    """

    name: str
    sampling_type: str
    steps: float  # int or INF_STEPS
    sample_size: Callable[[int], int]
    next_fn: Callable
    unique: Callable[[int], bool] = lambda step: False
    transit_source: str = TRANSITS_PREV_STEP
    step_transits_fn: Optional[Callable] = None  # custom override
    init_roots: Optional[Callable] = None        # (graph, sample_id, seed) -> ids
    post_step: Optional[Callable] = None         # (sample, step, transits, results)
    needs_prev2: bool = False                    # next reads two steps back
    records_edges: bool = False
    chain_walk: bool = False                     # one slot per step, no dedup
    kernel_code: Optional[int] = None            # fast-path id, if any
    select_batch: Optional[Callable] = None      # vectorized collective phase 2,
    # signature (sample, transits, combined, step, seed, out); must match
    # the per-slot next loop draw for draw
    kernel_params: np.ndarray = field(default_factory=lambda: np.zeros(0))
    params: dict = field(default_factory=dict)

    def is_individual(self) -> bool:
        return self.sampling_type == INDIVIDUAL


def step_transits(app: SamplingApp, sample: Sample, step: int,
                  seed: int = 0) -> np.ndarray:
    """Transit vertices for a sample at a step, computed once and cached
    so repeated calls are pure."""
    if sample._transit_cache is not None and sample._transit_cache[0] == step:
        return sample._transit_cache[1]
    if app.step_transits_fn is not None:
        transits = app.step_transits_fn(app, sample, step, seed)
    elif app.transit_source == TRANSITS_ROOT_PICK:
        pick = key_u64(seed, sample.id, step, domain=DOMAIN_STEP_TRANSITS) \
            % len(sample.roots)
        transits = sample.roots[pick:pick + 1]
    else:
        transits = sample.vertices_at(step - 1)
    transits = np.asarray(transits, dtype=np.int64)
    sample._transit_cache = (step, transits)
    return transits


def transit_count(app: SamplingApp, sample: Sample, step: int, seed: int = 0) -> int:
    """Number of transit vertices for the sample at this step; 0 once
    the sample has stopped producing new transits."""
    if app.transit_source == TRANSITS_ROOT_PICK:
        return 1 if len(sample.roots) else 0
    return len(step_transits(app, sample, step, seed))


def is_alive(app: SamplingApp, sample: Sample, step: int, seed: int = 0,
             step_cap: int = DEFAULT_STEP_CAP) -> bool:
    """A sample keeps running while it still has transit vertices and
    the app's step budget (or the INF hard cap) is not exhausted."""
    if app.steps != INF_STEPS and step >= app.steps:
        return False
    if step >= step_cap:
        return False
    return transit_count(app, sample, step, seed) > 0


def make_rng(seed: int, sample_id: int, step: int, transit_idx: int = 0,
             slot: int = 0) -> RngStream:
    return RngStream(seed, sample_id, step, transit_idx, slot)

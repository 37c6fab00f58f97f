"""trawl: a graph sampling engine.

Grows sets of samples over a CSR graph under two execution paradigms —
sample-parallel and transit-parallel with load-balanced work classes —
with a keyed RNG that makes the two produce identical output. Ships
random-walk, neighborhood, and subgraph sampling applications plus a
benchmark CLI.
"""

from .apps import APP_NAMES, make_app
from .bench import RunConfig, compare_paradigms, multi_worker_run, run
from .core import (
    COLLECTIVE,
    INDIVIDUAL,
    INF_STEPS,
    NULL_VERTEX,
    Sample,
    SamplingApp,
    is_alive,
    step_transits,
    transit_count,
)
from .engine import EngineConfig, make_samples, sp_run, tp_run
from .graph import Graph, load_cache, load_edge_list, save_cache
from .kernels import BACKEND_NAME, HAVE_COMPILED
from .output import LAYOUT_FINAL, LAYOUT_PER_STEP, SampleSetOutput, emit
from .rng import RngStream

__version__ = "0.1.0"

__all__ = [
    "APP_NAMES", "make_app", "RunConfig", "compare_paradigms",
    "multi_worker_run", "run", "COLLECTIVE", "INDIVIDUAL", "INF_STEPS",
    "NULL_VERTEX", "Sample", "SamplingApp", "is_alive", "step_transits",
    "transit_count", "EngineConfig", "make_samples", "sp_run", "tp_run",
    "Graph", "load_cache", "load_edge_list", "save_cache", "BACKEND_NAME",
    "HAVE_COMPILED", "LAYOUT_FINAL", "LAYOUT_PER_STEP", "SampleSetOutput",
    "emit", "RngStream", "__version__",
]

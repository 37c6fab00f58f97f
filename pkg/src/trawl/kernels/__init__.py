"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; the numpy
implementation is the fallback. Set TRAWL_PURE_PYTHON=1 to force the
fallback (used by the kernel benchmark to compare both).

Both backends implement the same batch API bit-identically; the numpy
module is also the home of shared vectorized helpers that only exist in
one flavor.
"""

import os

from . import _pykernels
from ._pykernels import (  # noqa: F401  (shared helpers, numpy-only)
    K_DEEPWALK,
    K_KHOP,
    K_MULTIRW,
    K_NODE2VEC,
    K_PPR,
    NODE2VEC_MAX_TRIES,
    keyed_u64,
    keyed_uniform,
    searchsorted_right_segments,
    segment_contains,
    weighted_pick_batch,
)

if os.environ.get("TRAWL_PURE_PYTHON") == "1":
    _backend = _pykernels
    HAVE_COMPILED = False
else:
    try:
        from . import _ckernels as _backend
        HAVE_COMPILED = True
    except ImportError:
        _backend = _pykernels
        HAVE_COMPILED = False

BACKEND_NAME = "compiled" if HAVE_COMPILED else "python"

individual_batch = _backend.individual_batch
segmented_prefix_sum = _backend.segmented_prefix_sum
segment_max = _backend.segment_max

"""Stateless counter-based random numbers.

Every random decision in the engines is a pure function of a key
(seed, sample id, step, transit index, slot, domain) and a draw index.
Because no generator state is threaded through the execution, the
sample-parallel and transit-parallel engines consume exactly the same
randomness for each logical slot no matter how work is ordered or how
many workers run, which makes their outputs bit-comparable.

The construction is a multi-field Weyl increment followed by a double
application of the splitmix64 finalizer. Python-int, numpy-vectorized,
and C implementations of the same arithmetic agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

MASK64 = (1 << 64) - 1

# Distinct odd constants, one per key field.
C_SAMPLE = 0x9E3779B97F4A7C15
C_STEP = 0xC2B2AE3D27D4EB4F
C_TRANSIT = 0x165667B19E3779F9
C_SLOT = 0x27D4EB2F165667C5
C_DOMAIN = 0x85EBCA77C2B2AE63
C_DRAW = 0xD6E8FEB86659FD93

MIX_A = 0xBF58476D1CE4E5B9
MIX_B = 0x94D049BB133111EB

INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53

# Key domains keep unrelated draw streams apart.
DOMAIN_NEXT = 0
DOMAIN_STEP_TRANSITS = 1
DOMAIN_ROOT_INIT = 2
DOMAIN_EDGE_WEIGHT = 3
DOMAIN_CLUSTER_ASSIGN = 4
DOMAIN_CLUSTER_PICK = 5


def _mix64(x: int) -> int:
    x ^= x >> 30
    x = (x * MIX_A) & MASK64
    x ^= x >> 27
    x = (x * MIX_B) & MASK64
    x ^= x >> 31
    return x


def key_u64(
    seed: int,
    sample_id: int = 0,
    step: int = 0,
    transit_idx: int = 0,
    slot: int = 0,
    domain: int = DOMAIN_NEXT,
    draw: int = 0,
) -> int:
    """Raw 64-bit output for one keyed draw."""
    k = (
        seed
        + C_SAMPLE * (sample_id + 1)
        + C_STEP * (step + 1)
        + C_TRANSIT * (transit_idx + 1)
        + C_SLOT * (slot + 1)
        + C_DOMAIN * (domain + 1)
        + C_DRAW * (draw + 1)
    ) & MASK64
    return _mix64(_mix64(k))


def key_uniform(seed, sample_id=0, step=0, transit_idx=0, slot=0,
                domain=DOMAIN_NEXT, draw=0) -> float:
    """Uniform float in [0, 1) for one keyed draw."""
    return (key_u64(seed, sample_id, step, transit_idx, slot, domain, draw) >> 11) * INV_2_53


@dataclass(frozen=True)
class RngStream:
    """One logical slot's draw stream, handed to app callbacks.

    Draw indices are managed by the caller; the same (stream, draw)
    always yields the same value.
    """

    seed: int
    sample_id: int
    step: int
    transit_idx: int = 0
    slot: int = 0
    domain: int = DOMAIN_NEXT

    def u64(self, draw: int = 0) -> int:
        return key_u64(self.seed, self.sample_id, self.step,
                       self.transit_idx, self.slot, self.domain, draw)

    def uniform(self, draw: int = 0) -> float:
        return (self.u64(draw) >> 11) * INV_2_53

    def randint(self, n: int, draw: int = 0) -> int:
        """Integer in [0, n). Bias from the modulo is ~n/2**64."""
        if n <= 0:
            raise ValueError("randint needs n >= 1")
        return self.u64(draw) % n

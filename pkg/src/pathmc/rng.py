"""Counter-based random tuples: tuple(t) = G(seed, t).

G hashes (seed, t) with the SplitMix64 finaliser, so any time index, negative
ones included, can be regenerated without stored state. Bits 11..63 give the
uniform used for the site draw, bit 0 the direction and bit 1 the virtual end
step. The same function is compiled into the numba kernels.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .flip import FlipInstruction
from .weights import WeightTable

_MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


@njit(cache=True, inline="always")
def mix64(z):
    z = np.uint64(z)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def stream_key(seed: int) -> np.uint64:
    """Per-seed key; any Python int (negative or > 64 bits) is reduced mod 2^64."""
    return np.uint64(int(mix64(np.uint64(seed & _MASK))) ^ 0x5851F42D4C957F2D)


@njit(cache=True, inline="always")
def raw_draw(key, t):
    # t is int64; two's complement reinterpretation keeps negative times distinct
    return mix64(np.uint64(key) + np.uint64(t) * np.uint64(0x9E3779B97F4A7C15))


@njit(cache=True, inline="always")
def unpack(z):
    u = np.float64(np.int64(z >> np.uint64(11))) * (1.0 / 9007199254740992.0)
    up = (z & np.uint64(1)) == np.uint64(1)
    plus = (z & np.uint64(2)) == np.uint64(2)
    return u, up, plus


@njit(cache=True)
def _draw(key, t):
    # keeps the 64-bit hash inside compiled code; a Python int above 2^63 would
    # not round-trip through numba's int64 argument typing
    return unpack(raw_draw(key, t))


def draw(seed: int, t: int) -> tuple[float, bool, bool]:
    u, up, plus = _draw(stream_key(seed), np.int64(t))
    return float(u), bool(up), bool(plus)


def tuple_at(seed: int, t: int, table: WeightTable) -> FlipInstruction:
    u, up, plus = draw(seed, t)
    i = int(np.searchsorted(table.cdf, u, side="right")) + 1
    return FlipInstruction(i, up, plus)


def tuple_buffer(seed: int, t_start: int, t_stop: int, table: WeightTable) -> list[FlipInstruction]:
    """Materialise tuples for t in [t_start, t_stop); audit mode for replaying a window."""
    return [tuple_at(seed, t, table) for t in range(t_start, t_stop)]

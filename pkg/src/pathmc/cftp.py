"""Monotone coupling from the past, sandwiching every trajectory between the
extremal paths of the family."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .chain import NotCoalesced, kernel_args
from .paths import FamilySpec, InvariantError, LatticePath, d1, extremal_paths
from .rng import stream_key
from .weights import WeightTable

DEFAULT_CAP = 2**30


@dataclass(frozen=True)
class CftpResult:
    path: LatticePath
    tau_final: int
    tuples_consumed: int


def cftp_sample(spec: FamilySpec, table: WeightTable, seed: int, tau0: int = 1,
                cap: int = DEFAULT_CAP, check: bool = False,
                extremes: tuple[LatticePath, LatticePath] | None = None) -> CftpResult:
    """Exact uniform sample from the family.

    The tuple used at time t < 0 is always G(seed, t), so each doubling of the
    horizon reuses the randomness of the previous round. ``cap`` bounds the
    horizon; exceeding it raises NotCoalesced rather than returning a biased
    sample. ``check`` asserts bottom <= top after every coupled step.
    """
    if tau0 < 1:
        raise ValueError("tau0 must be >= 1")
    bottom, top = extremes or extremal_paths(spec)
    key = stream_key(seed)
    args = kernel_args(spec)
    tau, consumed = tau0, 0
    while True:
        if tau > cap:
            raise NotCoalesced(cap)
        lo, hi = bottom.heights.copy(), top.heights.copy()
        bad = K.run_pair(lo, hi, key, np.int64(-tau), np.int64(tau), table.cdf, table.guide, *args, check)
        consumed += tau
        if bad != -tau - 1:
            raise InvariantError(f"sandwich order broken at time {bad}")
        if np.array_equal(lo, hi):
            return CftpResult(LatticePath.from_heights(lo, spec.a, spec.b), tau, consumed)
        tau *= 2


def cftp_samples(spec: FamilySpec, table: WeightTable, seeds, tau0: int = 1,
                 cap: int = DEFAULT_CAP) -> list[CftpResult]:
    ext = extremal_paths(spec)
    return [cftp_sample(spec, table, s, tau0, cap, extremes=ext) for s in seeds]


def longest_chain_bound(spec: FamilySpec) -> int:
    """d1 distance between the extremal paths (height of the order interval)."""
    bottom, top = extremal_paths(spec)
    return d1(bottom, top)

"""Forward sampler, grand coupling, time-average estimator and coupling times."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from . import _kernels as K
from .flip import FlipInstruction, chain_step
from .paths import FamilySpec, LatticePath, culminating_suffix_len, extremal_paths, is_member
from .rng import stream_key, tuple_at
from .weights import WeightTable


def kernel_args(spec: FamilySpec) -> tuple:
    k = culminating_suffix_len(spec.a, spec.b) if spec.is_culminating else 1
    return (np.int64(spec.a), np.int64(spec.b), np.ascontiguousarray(spec.lower),
            spec.is_excursion, spec.is_culminating, np.int64(k))


def _start(spec: FamilySpec, init: LatticePath | None) -> np.ndarray:
    if init is None:
        return extremal_paths(spec)[1].heights.copy()
    if not is_member(init, spec):
        raise ValueError(f"initial path {init.word} is not in the {spec.family} family")
    return init.heights.copy()


def bound_steps(n: int, tv_target: float = 0.01) -> int:
    """Step count making the contraction bound on TV distance at most ``tv_target``.

    From diam·exp(-kappa·T) <= eps with diam <= n(n+1)/2 and kappa0 = 3/(2n^2(n+1)),
    doubled because the certified constant is kappa0/(2Z) rather than kappa0.
    """
    base = (2 / 3) * n * n * (n + 1) * math.log(n * (n + 1) / (2 * tv_target))
    return max(0, math.ceil(base)) * 2


def mcmc_run(spec: FamilySpec, table: WeightTable, T: int, seed: int,
             init: LatticePath | None = None) -> LatticePath:
    """Run T steps from ``init`` (default: the maximal path) and return S(T)."""
    if T < 0:
        raise ValueError("T must be >= 0")
    h = _start(spec, init)
    K.run_forward(h, stream_key(seed), np.int64(1), np.int64(T), table.cdf, table.guide, *kernel_args(spec))
    return LatticePath.from_heights(h, spec.a, spec.b)


def mcmc_many(spec: FamilySpec, table: WeightTable, T: int, seeds,
              init: LatticePath | None = None) -> np.ndarray:
    """Final height profiles of independent runs, one row per seed."""
    h = _start(spec, init)
    keys = np.array([stream_key(s) for s in seeds], dtype=np.uint64)
    return K.run_forward_many(h, keys, np.int64(T), table.cdf, table.guide, *kernel_args(spec))


def trajectory(spec: FamilySpec, table: WeightTable, T: int, seed: int,
               init: LatticePath | None = None, every: int = 1) -> Iterator[dict]:
    """Yield JSONL-ready records {"t", "word", "final", "max"} every ``every`` steps."""
    h = _start(spec, init)
    key = stream_key(seed)
    args = kernel_args(spec)
    t = 0
    while t < T:
        chunk = min(every, T - t)
        K.run_forward(h, key, np.int64(t + 1), np.int64(chunk), table.cdf, table.guide, *args)
        t += chunk
        path = LatticePath.from_heights(h, spec.a, spec.b)
        yield {"t": t, "word": path.word, "final": int(h[-1]), "max": int(h.max())}


def grand_coupling_step(paths: list[LatticePath], f: FlipInstruction,
                        spec: FamilySpec) -> list[LatticePath]:
    return [chain_step(p, f, spec) for p in paths]


# fixed closed set of functionals exposed by name
def _final(p: LatticePath) -> float:
    return float(p.heights[-1])


def _max(p: LatticePath) -> float:
    return float(p.heights.max())


def _area(p: LatticePath) -> float:
    return float(p.heights.sum())


def _peaks(p: LatticePath) -> float:
    return float(p.word.count("UD"))


@dataclass(frozen=True)
class Functional:
    name: str
    evaluator: Callable[[LatticePath], float]
    code: int

    def __call__(self, path: LatticePath) -> float:
        return self.evaluator(path)


FUNCTIONALS = {
    "final_height": Functional("final_height", _final, K.F_FINAL),
    "max_height": Functional("max_height", _max, K.F_MAX),
    "area": Functional("area", _area, K.F_AREA),
    "peak_count": Functional("peak_count", _peaks, K.F_PEAKS),
}


@dataclass
class EstimatorAccumulator:
    T: int = 0
    sum: float = 0.0

    def add(self, value: float) -> None:
        self.T += 1
        self.sum += value

    @property
    def estimate(self) -> float:
        return self.sum / self.T


def estimate_functional(spec: FamilySpec, table: WeightTable, T: int, seed: int,
                        f: Functional | str, init: LatticePath | None = None) -> float:
    """Time average (1/T) sum_{t=1..T} f(S(t)) along one trajectory, without storing it."""
    if T < 1:
        raise ValueError("T must be >= 1")
    if isinstance(f, str):
        f = FUNCTIONALS[f]
    h = _start(spec, init)
    total = K.run_estimate(h, stream_key(seed), np.int64(T), f.code, table.cdf, table.guide, *kernel_args(spec))
    return EstimatorAccumulator(T, total).estimate


class NotCoalesced(RuntimeError):
    def __init__(self, cap: int):
        super().__init__(f"trajectories did not coalesce within {cap} steps")
        self.cap = cap


def coupling_time(spec: FamilySpec, table: WeightTable, seed: int, cap: int = 2**30) -> int:
    """First time the coupled trajectories from the two extremal paths meet.

    Raises NotCoalesced when they have not met after ``cap`` steps.
    """
    bottom, top = extremal_paths(spec)
    t = K.coupling_time(bottom.heights.copy(), top.heights.copy(), stream_key(seed),
                        np.int64(cap), table.cdf, table.guide, *kernel_args(spec))
    if t < 0:
        raise NotCoalesced(cap)
    return int(t)


def coupling_times(spec: FamilySpec, table: WeightTable, seeds, cap: int = 2**30) -> np.ndarray:
    """Coupling times for many seeds; entries are -1 where the cap was hit."""
    bottom, top = extremal_paths(spec)
    keys = np.array([stream_key(s) for s in seeds], dtype=np.uint64)
    return K.coupling_times_many(bottom.heights.copy(), top.heights.copy(), keys,
                                 np.int64(cap), table.cdf, table.guide, *kernel_args(spec))


def replay(spec: FamilySpec, table: WeightTable, path: LatticePath, seed: int,
           t_first: int, T: int) -> LatticePath:
    """Pure-Python replay of a window of the tuple stream (audit path)."""
    for t in range(t_first, t_first + T):
        path = chain_step(path, tuple_at(seed, t, table), spec)
    return path


def worker_count() -> int:
    return max(1, int(os.environ.get("PATHMC_THREADS", os.cpu_count() or 1)))


def dumps(record: dict) -> str:
    return json.dumps(record, separators=(",", ":"))

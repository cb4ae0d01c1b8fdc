"""Site-selection distribution of the chain.

Quadratic mode uses the concave profile p_i = i(2n - i)·kappa0 + alpha with
kappa0 = 3 / (2 n^2 (n+1)) and alpha = 1 / (4 n^3). Those raw values sum to
(4n^2 - n + 1) / (4n^2), not 1, so they are renormalised by their sum Z; the
discrete concavity p_i - p_{i-1}/2 - p_{i+1}/2 then equals kappa0 / Z.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

QUADRATIC = "quadratic"
UNIFORM = "uniform"


@dataclass(frozen=True)
class WeightTable:
    n: int
    mode: str
    kappa0: float
    alpha: float
    raw: np.ndarray = field(repr=False)
    Z: float
    probs: np.ndarray = field(repr=False)
    cdf: np.ndarray = field(repr=False)
    # guide[j] <= smallest i with cdf[i] > j/n: lets inversion start a short scan near the answer
    guide: np.ndarray = field(repr=False)

    def prob(self, i: int) -> float:
        """Normalised weight of site i (1-based); 0 outside 1..n."""
        return float(self.probs[i - 1]) if 1 <= i <= self.n else 0.0


def _quadratic_numerators(n: int) -> list[int]:
    # common denominator 4n^3(n+1): kappa0 = 6n/D, alpha = (n+1)/D
    return [6 * n * i * (2 * n - i) + n + 1 for i in range(1, n + 1)]


def build_weight_table(n: int, mode: str = QUADRATIC) -> WeightTable:
    if n < 1:
        raise ValueError("n must be >= 1")
    if mode == QUADRATIC:
        num = _quadratic_numerators(n)
        denom = 4 * n**3 * (n + 1)
        total = sum(num)
        raw = np.array([x / denom for x in num])
        probs = np.array([x / total for x in num])
        kappa0 = 3 / (2 * n * n * (n + 1))
        alpha = 1 / (4 * n**3)
        Z = total / denom
    elif mode == UNIFORM:
        raw = np.full(n, 1 / n)
        probs = raw.copy()
        kappa0, alpha, Z = 0.0, 0.0, 1.0
    else:
        raise ValueError(f"unknown weight mode {mode!r}")
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    guide = np.searchsorted(cdf, np.arange(n) / n, side="right") - 1
    guide = np.clip(guide, 0, n - 1).astype(np.int64)
    for arr in (raw, probs, cdf, guide):
        arr.setflags(write=False)
    return WeightTable(n, mode, kappa0, alpha, raw, Z, probs, cdf, guide)


def exact_normaliser(n: int) -> Fraction:
    """Z as an exact fraction, (4n^2 - n + 1) / (4n^2)."""
    return Fraction(sum(_quadratic_numerators(n)), 4 * n**3 * (n + 1))


def sample_index(table: WeightTable, u: float) -> int:
    """Inverse-CDF draw: smallest i (1-based) with cdf_i > u, for u in [0, 1)."""
    return int(np.searchsorted(table.cdf, u, side="right")) + 1


def effective_kappa(table: WeightTable) -> float:
    """Guaranteed one-step contraction of the coupled chain for neighbour pairs.

    Interior sites contract by probs_i - probs_{i-1}/2 - probs_{i+1}/2 (with the
    phantom site 0 weighted alpha/Z); a pair differing at the last site only
    coalesces through two of the four (eps, delta) combinations, which gives
    (probs_n - probs_{n-1}) / 2. The minimum is kappa0 / (2Z) for n >= 2.
    """
    if table.mode != QUADRATIC:
        raise ValueError("uniform weights have no positive contraction constant")
    n, p = table.n, table.probs
    if n == 1:
        return 0.5
    ext = np.concatenate(([table.alpha / table.Z], p, [0.0]))
    interior = ext[1:n] - ext[0:n - 1] / 2 - ext[2:n + 1] / 2
    end = (p[n - 1] - p[n - 2]) / 2
    return float(min(interior.min(), end))

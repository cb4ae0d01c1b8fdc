"""Peak/valley flip operator and the constrained (rejection) chain step.

This is the readable reference version, operating on immutable LatticePath
values. The sampling loops use the in-place numba kernels in ``_kernels``,
which are cross-checked against these functions in the test-suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .paths import DOWN, UP, FamilySpec, LatticePath, culminating_suffix_len, is_member_after_flip


@dataclass(frozen=True)
class FlipInstruction:
    """One random tuple of the chain: site i (1-based), direction, virtual end step."""

    i: int
    up: bool
    plus: bool

    def __str__(self):
        return f"({self.i},{'↑' if self.up else '↓'},{'+' if self.plus else '-'})"


def all_instructions(n: int) -> list[FlipInstruction]:
    """The 4n tuples (i, eps, delta), in a fixed order."""
    return [FlipInstruction(i, up, plus) for i in range(1, n + 1)
            for up in (True, False) for plus in (True, False)]


def _flip_target(S: LatticePath, f: FlipInstruction, spec: FamilySpec):
    """Return (position, new word) for the flip, or None when it is the identity."""
    n, w = spec.n, S.word
    i = f.i
    if not 1 <= i <= n:
        raise ValueError(f"flip index {i} outside 1..{n}")
    if i < n:
        pair = (DOWN, UP) if f.up else (UP, DOWN)
        if (w[i - 1], w[i]) != pair:
            return None
        return w[: i - 1] + pair[1] + pair[0] + w[i + 1:]
    if spec.is_culminating:
        k = culminating_suffix_len(spec.a, spec.b)
        suffix = UP * k if f.up else DOWN + UP * (k - 1)
        new = w[: n - k] + suffix
        return None if new == w else new
    # virtual step appended: +a when delta is +, -b otherwise
    if f.up and f.plus and w[-1] == DOWN:
        return w[:-1] + UP
    if not f.up and not f.plus and w[-1] == UP:
        return w[:-1] + DOWN
    return None


def flip_raw(S: LatticePath, f: FlipInstruction, spec: FamilySpec) -> LatticePath:
    new = _flip_target(S, f, spec)
    if new is None:
        return S
    return LatticePath.from_word(new, S.a, S.b)


def chain_step(S: LatticePath, f: FlipInstruction, spec: FamilySpec) -> LatticePath:
    """One step of the chain: the flipped path if it stays in the family, else S."""
    new = _flip_target(S, f, spec)
    if new is None:
        return S
    T = LatticePath.from_word(new, S.a, S.b)
    if spec.is_culminating and f.i == spec.n:
        k = culminating_suffix_len(spec.a, spec.b)
        ok = is_member_after_flip(S, f.i, int(T.heights[-1]), spec, new_suffix=T.heights[spec.n - k:])
    elif f.i == spec.n:
        ok = is_member_after_flip(S, f.i, int(T.heights[-1]), spec)
    else:
        ok = is_member_after_flip(S, f.i, int(T.heights[f.i - 1]), spec)
    return T if ok else S


def changed_positions(S: LatticePath, T: LatticePath) -> np.ndarray:
    """1-based positions where two paths differ."""
    return np.flatnonzero(S.heights != T.heights) + 1

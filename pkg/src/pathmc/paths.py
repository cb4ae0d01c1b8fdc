"""Lattice paths with steps +a / -b, the four constrained families, and the
coordinatewise order used by the monotone coupling."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

UP = "U"
DOWN = "D"

# lower bound used where a position carries no constraint
NO_BOUND = -(2**62)
_HEIGHT_LIMIT = 2**62


class EmptyFamilyError(ValueError):
    """The requested family has no member."""


class InvariantError(RuntimeError):
    """Internal consistency check failed (corrupted heights, biased sampler...)."""


class SizeGuardError(ValueError):
    """Instance too large for an exhaustive computation."""


@dataclass(frozen=True)
class StepParams:
    n: int
    a: int = 1
    b: int = 1

    def __post_init__(self):
        for name in ("n", "a", "b"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if self.n * max(self.a, self.b) >= _HEIGHT_LIMIT:
            raise ValueError("n*max(a,b) does not fit in a signed 64-bit height")


@dataclass(frozen=True)
class Meander:
    name = "meander"


@dataclass(frozen=True)
class Wall:
    """S_i >= h for r <= i <= s (1-based); nothing is imposed outside the window."""

    h: int
    r: int
    s: int
    name = "wall"


@dataclass(frozen=True)
class Excursion:
    name = "excursion"


@dataclass(frozen=True)
class Culminating:
    name = "culminating"


FamilyConstraint = Meander | Wall | Excursion | Culminating

FAMILIES = {"meander": Meander, "wall": Wall, "excursion": Excursion, "culminating": Culminating}


def culminating_suffix_len(a: int, b: int) -> int:
    """Number of final steps rewritten by the culminating end move: ceil(b/a) + 1."""
    return -(-b // a) + 1


@dataclass(frozen=True)
class FamilySpec:
    """Step parameters plus constraint, with the backward feasibility table.

    ``lower[p]`` (0-based position) is the per-position lower bound on heights and
    ``feas_lo[p]``/``feas_hi[p]`` bound the heights from which a valid completion
    exists. For culminating paths the completion test also needs the running
    maximum M: from height h at position i the best reachable final height is
    h + a(n - i) (all up), so completion is feasible iff h >= 0 and that is >= M.
    """

    params: StepParams
    constraint: FamilyConstraint = field(default_factory=Meander)
    lower: np.ndarray = field(init=False, repr=False, compare=False)
    feas_lo: np.ndarray = field(init=False, repr=False, compare=False)
    feas_hi: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n, a, b = self.params.n, self.params.a, self.params.b
        c = self.constraint
        lower = np.full(n, NO_BOUND, dtype=np.int64)
        if isinstance(c, (Meander, Excursion, Culminating)):
            lower[:] = 0
        elif isinstance(c, Wall):
            if c.r <= c.s:
                if not (1 <= c.r and c.s <= n):
                    raise EmptyFamilyError(f"wall window [{c.r},{c.s}] outside 1..{n}")
                if c.h > c.r * a:
                    raise EmptyFamilyError(f"empty family: wall height {c.h} > r*a = {c.r * a}")
                lower[c.r - 1 : c.s] = max(c.h, NO_BOUND)
        else:
            raise TypeError(f"unknown constraint {c!r}")
        if isinstance(c, Excursion) and (n * b) % (a + b):
            raise EmptyFamilyError("empty family: n·b not divisible by a+b")
        if isinstance(c, Culminating) and n <= culminating_suffix_len(a, b):
            raise EmptyFamilyError(
                f"culminating paths need n > ceil(b/a)+1 = {culminating_suffix_len(a, b)}"
            )

        # backward sweep: feasible at p iff h >= lower[p] and h + a >= feas_lo[p+1]
        feas_lo = lower.copy()
        for p in range(n - 2, -1, -1):
            feas_lo[p] = max(lower[p], feas_lo[p + 1] - a)
        feas_hi = np.full(n, -NO_BOUND, dtype=np.int64)
        if isinstance(c, Excursion):
            feas_hi = (n - 1 - np.arange(n, dtype=np.int64)) * b
        for name, val in (("lower", lower), ("feas_lo", feas_lo), ("feas_hi", feas_hi)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def a(self) -> int:
        return self.params.a

    @property
    def b(self) -> int:
        return self.params.b

    @property
    def family(self) -> str:
        return self.constraint.name

    @property
    def is_culminating(self) -> bool:
        return isinstance(self.constraint, Culminating)

    @property
    def is_excursion(self) -> bool:
        return isinstance(self.constraint, Excursion)

    def completion_feasible(self, i: int, h: int, running_max: int = 0) -> bool:
        """Whether some valid completion exists from height h after i steps (1 <= i <= n)."""
        p = i - 1
        if h < self.feas_lo[p] or h > self.feas_hi[p]:
            return False
        if self.is_culminating:
            return h + self.a * (self.n - i) >= max(running_max, h)
        return True

    @classmethod
    def build(cls, family: str, n: int, a: int = 1, b: int = 1, *,
              h: int | None = None, r: int | None = None, s: int | None = None) -> "FamilySpec":
        params = StepParams(n, a, b)
        if family == "wall":
            if h is None or r is None or s is None:
                raise ValueError("wall family needs h, r and s")
            return cls(params, Wall(h, r, s))
        if family == "unconstrained":
            return cls(params, Wall(-n * b, 1, n))
        try:
            return cls(params, FAMILIES[family]())
        except KeyError:
            raise ValueError(f"unknown family {family!r}") from None


def unconstrained(n: int, a: int = 1, b: int = 1) -> FamilySpec:
    """The degenerate wall family equal to all of {U, D}^n."""
    return FamilySpec.build("unconstrained", n, a, b)


def heights(word: Sequence[str] | str, params: StepParams) -> np.ndarray:
    if len(word) != params.n:
        raise ValueError(f"word has length {len(word)}, expected {params.n}")
    steps = np.fromiter((params.a if c == UP else -params.b for c in word), np.int64, len(word))
    if any(c not in (UP, DOWN) for c in word):
        raise ValueError(f"word must be over 'U'/'D': {word!r}")
    return np.cumsum(steps)


@dataclass(frozen=True, eq=False)
class LatticePath:
    """A word over {U, D} with its cached height profile S_1..S_n."""

    word: str
    a: int
    b: int
    heights: np.ndarray = field(repr=False)

    @classmethod
    def from_word(cls, word: Iterable[str] | str, a: int = 1, b: int = 1) -> "LatticePath":
        word = "".join(word)
        h = heights(word, StepParams(len(word), a, b))
        h.setflags(write=False)
        return cls(word, a, b, h)

    @classmethod
    def from_heights(cls, hs: Sequence[int] | np.ndarray, a: int = 1, b: int = 1) -> "LatticePath":
        h = np.array(hs, dtype=np.int64)
        steps = np.diff(h, prepend=0)
        if not np.all((steps == a) | (steps == -b)):
            raise InvariantError(f"height profile is not a +{a}/-{b} path: {h.tolist()}")
        word = "".join(np.where(steps == a, UP, DOWN))
        h.setflags(write=False)
        return cls(word, a, b, h)

    @property
    def n(self) -> int:
        return len(self.word)

    def __len__(self):
        return len(self.word)

    def __eq__(self, other):
        if not isinstance(other, LatticePath):
            return NotImplemented
        return self.word == other.word and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.word, self.a, self.b))

    def __repr__(self):
        return f"LatticePath({self.word!r}, a={self.a}, b={self.b})"

    def check(self) -> None:
        """Raise InvariantError unless the cached heights match the word."""
        if not np.array_equal(self.heights, heights(self.word, StepParams(self.n, self.a, self.b))):
            raise InvariantError(f"stale height cache for {self.word}")

    def to_json(self, spec: FamilySpec) -> str:
        return json.dumps(path_record(self, spec))


def path_record(path: LatticePath, spec: FamilySpec) -> dict:
    rec = {"n": spec.n, "a": spec.a, "b": spec.b, "family": spec.family}
    if isinstance(spec.constraint, Wall):
        c = spec.constraint
        rec["wall"] = {"h": int(c.h), "r": int(c.r), "s": int(c.s)}
    rec["word"] = path.word
    return rec


def spec_from_record(rec: dict) -> FamilySpec:
    family = rec["family"]
    if family == "wall":
        w = rec["wall"]
        return FamilySpec.build("wall", rec["n"], rec["a"], rec["b"], h=w["h"], r=w["r"], s=w["s"])
    return FamilySpec.build(family, rec["n"], rec["a"], rec["b"])


def load_path(text: str | dict) -> tuple[LatticePath, FamilySpec]:
    """Parse a serialized path record; heights are recomputed from the word."""
    rec = json.loads(text) if isinstance(text, str) else text
    spec = spec_from_record(rec)
    path = LatticePath.from_word(rec["word"], spec.a, spec.b)
    if path.n != spec.n:
        raise ValueError(f"word length {path.n} does not match n={spec.n}")
    return path, spec


def is_member(path: LatticePath, spec: FamilySpec) -> bool:
    if path.n != spec.n or path.a != spec.a or path.b != spec.b:
        raise ValueError("path does not match the family's step parameters")
    h = path.heights
    if np.any(h < spec.lower):
        return False
    if spec.is_excursion:
        return bool(h[-1] == 0)
    if spec.is_culminating:
        return bool(h.max() <= h[-1])
    return True


def is_member_after_flip(path: LatticePath, i: int, new_height: int, spec: FamilySpec,
                         new_suffix: Sequence[int] | None = None) -> bool:
    """Membership of ``path`` with S_i replaced by ``new_height``, by local comparison.

    ``path`` must itself be a member. For the culminating end move pass the
    rewritten suffix heights (ending at position n) in ``new_suffix``; that case
    rescans the prefix maximum.
    """
    h = path.heights
    n = spec.n
    if new_suffix is not None:
        suffix = np.asarray(new_suffix, dtype=np.int64)
        start = n - len(suffix)
        if np.any(suffix < spec.lower[start:]):
            return False
        final = suffix[-1]
        if spec.is_excursion:
            return bool(final == 0)
        if spec.is_culminating:
            prefix_max = h[:start].max() if start else 0
            return bool(max(prefix_max, suffix.max()) <= final)
        return True
    if new_height < spec.lower[i - 1]:
        return False
    if i == n:
        if spec.is_excursion:
            return new_height == 0
        if spec.is_culminating:
            return new_height >= (h[:-1].max() if n > 1 else 0)
        return True
    if spec.is_culminating:
        return new_height <= h[-1]
    return True


def d1(S: LatticePath, T: LatticePath) -> int:
    if S.n != T.n or S.a != T.a or S.b != T.b:
        raise ValueError("paths differ in length or step parameters")
    total = int(np.abs(S.heights - T.heights).sum())
    q, rem = divmod(total, S.a + S.b)
    if rem:
        raise InvariantError(f"L1 distance {total} not a multiple of a+b={S.a + S.b}")
    return q


def partial_le(S: LatticePath, T: LatticePath) -> bool:
    return bool(np.all(S.heights <= T.heights))


def pointwise_min(S: LatticePath, T: LatticePath) -> LatticePath:
    return LatticePath.from_heights(np.minimum(S.heights, T.heights), S.a, S.b)


def pointwise_max(S: LatticePath, T: LatticePath) -> LatticePath:
    return LatticePath.from_heights(np.maximum(S.heights, T.heights), S.a, S.b)


def _greedy(spec: FamilySpec, prefer: str) -> LatticePath:
    other = UP if prefer == DOWN else DOWN
    step = {UP: spec.a, DOWN: -spec.b}
    h, running_max, word = 0, 0, []
    for i in range(1, spec.n + 1):
        for c in (prefer, other):
            nh = h + step[c]
            if spec.completion_feasible(i, nh, max(running_max, nh)):
                break
        else:
            raise EmptyFamilyError(f"no valid completion at position {i}")
        word.append(c)
        h = nh
        running_max = max(running_max, h)
    return LatticePath.from_word(word, spec.a, spec.b)


def extremal_paths(spec: FamilySpec) -> tuple[LatticePath, LatticePath]:
    """The minimum and maximum of the family for the coordinatewise order."""
    bottom, top = _greedy(spec, DOWN), _greedy(spec, UP)
    for p in (bottom, top):
        if not is_member(p, spec):
            raise InvariantError(f"greedy extremal path {p.word} is not a member")
    return bottom, top

"""Brute-force ground truth for small instances.

Everything here is built from the reference ``flip.chain_step`` on explicit
member lists, never from the numba kernels, so it can be used to check them.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .flip import FlipInstruction, all_instructions, chain_step, flip_raw
from .paths import (DOWN, UP, FamilySpec, InvariantError, LatticePath, SizeGuardError, d1,
                    is_member)
from .weights import WeightTable

MAX_ENUMERATION = 10**7
MAX_MATRIX = 20_000


@dataclass
class FamilyEnumeration:
    spec: FamilySpec
    members: list[LatticePath]
    index: dict[LatticePath, int]
    H: np.ndarray = field(repr=False)  # heights, one row per member

    def __len__(self):
        return len(self.members)

    def locate(self, heights) -> int:
        """Ordinal of the member with this height profile; -1 if none."""
        try:
            path = LatticePath.from_heights(heights, self.spec.a, self.spec.b)
        except InvariantError:
            return -1
        return self.index.get(path, -1)


def count_family(spec: FamilySpec) -> int:
    """Exact member count by dynamic programming over (height, running max)."""
    states = {(0, 0): 1}
    for i in range(1, spec.n + 1):
        nxt: dict[tuple[int, int], int] = {}
        for (h, m), c in states.items():
            for step in (spec.a, -spec.b):
                nh = h + step
                nm = max(m, nh) if spec.is_culminating else 0
                if spec.completion_feasible(i, nh, nm):
                    nxt[nh, nm] = nxt.get((nh, nm), 0) + c
        states = nxt
    return sum(states.values())


def enumerate_family(spec: FamilySpec, prune: bool = True) -> FamilyEnumeration:
    """All members in lexicographic word order ('D' < 'U').

    With ``prune`` the depth-first search only enters completion-feasible
    prefixes; without it all 2^n words are filtered by ``is_member``.
    """
    if prune:
        if count_family(spec) > MAX_ENUMERATION:
            raise SizeGuardError(f"family too large to enumerate (n={spec.n})")
        words: list[str] = []
        step = {UP: spec.a, DOWN: -spec.b}

        def dfs(prefix: list[str], h: int, m: int) -> None:
            i = len(prefix)
            if i == spec.n:
                words.append("".join(prefix))
                return
            for c in (DOWN, UP):
                nh = h + step[c]
                nm = max(m, nh)
                if spec.completion_feasible(i + 1, nh, nm):
                    prefix.append(c)
                    dfs(prefix, nh, nm)
                    prefix.pop()

        dfs([], 0, 0)
        members = [LatticePath.from_word(w, spec.a, spec.b) for w in words]
    else:
        if 2**spec.n > MAX_ENUMERATION:
            raise SizeGuardError(f"2^{spec.n} words is too many to filter")
        members = []
        for w in itertools.product((DOWN, UP), repeat=spec.n):
            p = LatticePath.from_word(w, spec.a, spec.b)
            if is_member(p, spec):
                members.append(p)
    H = np.array([p.heights for p in members], dtype=np.int64).reshape(len(members), spec.n)
    return FamilyEnumeration(spec, members, {p: k for k, p in enumerate(members)}, H)


def step_images(enum: FamilyEnumeration) -> np.ndarray:
    """images[r, c] = ordinal of chain_step(member r, tuple c), tuples in all_instructions order."""
    spec = enum.spec
    tuples = all_instructions(spec.n)
    out = np.empty((len(enum), len(tuples)), dtype=np.int64)
    for r, p in enumerate(enum.members):
        for c, f in enumerate(tuples):
            q = chain_step(p, f, spec)
            j = enum.index.get(q)
            if j is None:
                raise InvariantError(f"chain_step left the family: {p.word} {f} -> {q.word}")
            out[r, c] = j
    return out


def _tuple_weights(table: WeightTable) -> np.ndarray:
    # probs_i / 4 per tuple, matching the all_instructions order
    return np.repeat(table.probs / 4, 4)


def distance_matrix(enum: FamilyEnumeration) -> np.ndarray:
    spec = enum.spec
    diff = np.abs(enum.H[:, None, :] - enum.H[None, :, :]).sum(axis=2)
    if np.any(diff % (spec.a + spec.b)):
        raise InvariantError("pairwise L1 distance not a multiple of a+b")
    return diff // (spec.a + spec.b)


def order_matrix(enum: FamilyEnumeration) -> np.ndarray:
    """le[r, s] = member r <= member s coordinatewise."""
    return np.all(enum.H[:, None, :] <= enum.H[None, :, :], axis=2)


@dataclass
class TransitionMatrix:
    P: np.ndarray
    enum: FamilyEnumeration

    def __len__(self):
        return self.P.shape[0]


def build_transition_matrix(spec: FamilySpec, table: WeightTable,
                            enum: FamilyEnumeration | None = None) -> TransitionMatrix:
    """P[R, S] = sum over tuples (i, eps, delta) with chain_step(R, tuple) = S of probs_i / 4."""
    enum = enum or enumerate_family(spec)
    m = len(enum)
    if m > MAX_MATRIX:
        raise SizeGuardError(f"{m} states exceeds the dense matrix guard {MAX_MATRIX}")
    images = step_images(enum)
    w = _tuple_weights(table)
    P = np.zeros((m, m))
    rows = np.repeat(np.arange(m), images.shape[1])
    np.add.at(P, (rows, images.ravel()), np.tile(w, m))
    return TransitionMatrix(P, enum)


def exact_tv_decay(P: TransitionMatrix, start: int | LatticePath, t_max: int) -> np.ndarray:
    """TV(P^t delta_start, uniform) for t = 0..t_max."""
    if isinstance(start, LatticePath):
        start = P.enum.index[start]
    m = len(P)
    mu = np.zeros(m)
    mu[start] = 1.0
    out = np.empty(t_max + 1)
    for t in range(t_max + 1):
        out[t] = 0.5 * np.abs(mu - 1 / m).sum()
        mu = mu @ P.P
    return out


def worst_tv_decay(P: TransitionMatrix, t_max: int) -> np.ndarray:
    """max over starting states of TV(P^t delta_v, uniform), t = 0..t_max."""
    m = len(P)
    D = np.eye(m)
    out = np.empty(t_max + 1)
    for t in range(t_max + 1):
        out[t] = 0.5 * np.abs(D - 1 / m).sum(axis=1).max()
        D = D @ P.P
    return out


def exact_tmix(P: TransitionMatrix, cap: int = 10**7) -> int:
    """Smallest t with worst-case TV distance to uniform at most 1/e."""
    m = len(P)
    D = np.eye(m)
    threshold = math.exp(-1)
    for t in range(cap + 1):
        if 0.5 * np.abs(D - 1 / m).sum(axis=1).max() <= threshold:
            return t
        D = D @ P.P
    raise RuntimeError(f"TV still above 1/e after {cap} steps")


def coupled_expected_distance(S: LatticePath, T: LatticePath, spec: FamilySpec,
                              table: WeightTable) -> float:
    """Exact E[d1] after one step of the shared-tuple coupling."""
    total = 0.0
    for f in all_instructions(spec.n):
        total += table.prob(f.i) / 4 * d1(chain_step(S, f, spec), chain_step(T, f, spec))
    return total


@dataclass
class CurvatureReport:
    pairs: list[tuple[int, int]]
    expected: np.ndarray  # E[d1'] per neighbour pair
    min_contraction: float
    witnesses: list[tuple[LatticePath, LatticePath]]

    @property
    def contractions(self) -> np.ndarray:
        return 1.0 - self.expected


def curvature_scan(spec: FamilySpec, table: WeightTable, enum: FamilyEnumeration | None = None,
                   tol: float = 1e-12) -> CurvatureReport:
    """Exact one-step coupled contraction 1 - E[d1'] over every pair at distance 1."""
    enum = enum or enumerate_family(spec)
    D = distance_matrix(enum)
    images = step_images(enum)
    w = _tuple_weights(table)
    r_idx, s_idx = np.nonzero(np.triu(D == 1))
    expected = np.array([(w * D[images[r], images[s]]).sum() for r, s in zip(r_idx, s_idx)])
    if expected.size == 0:
        return CurvatureReport([], expected, math.inf, [])
    contraction = 1.0 - expected
    lo = contraction.min()
    wit = [(enum.members[r], enum.members[s])
           for r, s, c in zip(r_idx, s_idx, contraction) if c <= lo + tol]
    return CurvatureReport(list(zip(r_idx.tolist(), s_idx.tolist())), expected, float(lo), wit)


@dataclass
class GeodesicReport:
    ok: bool
    connected: bool  # over the distance-1 moves only
    irreducible: bool  # over every positive-probability move
    max_graph_distance: float
    counterexample: tuple[LatticePath, LatticePath, float, int] | None = None


def chain_graph_distances(enum: FamilyEnumeration, images: np.ndarray | None = None) -> np.ndarray:
    """All-pairs BFS distances over edges with positive transition probability and d1 = 1."""
    images = step_images(enum) if images is None else images
    m = len(enum)
    rows = np.repeat(np.arange(m), images.shape[1])
    cols = images.ravel()
    keep = rows != cols
    rows, cols = rows[keep], cols[keep]
    D = distance_matrix(enum)
    keep = D[rows, cols] == 1
    A = csr_matrix((np.ones(keep.sum()), (rows[keep], cols[keep])), shape=(m, m))
    return shortest_path(A, directed=True, unweighted=True)


def geodesic_check(spec: FamilySpec, enum: FamilyEnumeration | None = None) -> GeodesicReport:
    enum = enum or enumerate_family(spec)
    images = step_images(enum)
    G = chain_graph_distances(enum, images)
    D = distance_matrix(enum)
    connected = bool(np.all(np.isfinite(G)))
    m = len(enum)
    A = csr_matrix((np.ones(images.size), (np.repeat(np.arange(m), images.shape[1]), images.ravel())),
                   shape=(m, m))
    irreducible = connected_components(A, directed=True, connection="strong")[0] == 1
    bad = np.argwhere(G != D)
    cex = None
    if len(bad):
        r, s = bad[0]
        cex = (enum.members[r], enum.members[s], float(G[r, s]), int(D[r, s]))
    return GeodesicReport(len(bad) == 0, connected, bool(irreducible), float(G.max()), cex)


def _first_peak(word: str, start: int) -> int | None:
    """Leftmost 1-based j >= start with (s_j, s_{j+1}) = (U, D)."""
    j = word.find(UP + DOWN, start - 1)
    return j + 1 if j >= 0 else None


def geodesic_pair_step(S: LatticePath, T: LatticePath,
                       spec: FamilySpec) -> tuple[LatticePath, LatticePath]:
    """Move one of S, T by a single flip towards the other; returns the new pair.

    Follows the constructive argument: at the first differing index i0 the higher
    path is lowered at its leftmost peak j >= i0; when the higher path has no
    such peak its suffix is all up, and the lower path is raised instead, by the
    end flip or else at its rightmost down step.
    """
    if S == T:
        raise ValueError("paths are equal")
    i0 = int(np.flatnonzero(S.heights != T.heights)[0]) + 1
    swapped = S.heights[i0 - 1] > T.heights[i0 - 1]
    low, high = (T, S) if swapped else (S, T)
    j = _first_peak(high.word, i0)
    if j is not None:
        high = flip_raw(high, FlipInstruction(j, False, True), spec)
    else:
        raised = flip_raw(low, FlipInstruction(spec.n, True, True), spec)
        if raised == low:
            j = low.word.rfind(DOWN) + 1
            raised = flip_raw(low, FlipInstruction(j, True, True), spec)
        low = raised
    return (high, low) if swapped else (low, high)


def geodesic_step(S: LatticePath, T: LatticePath, spec: FamilySpec) -> LatticePath:
    """The path produced by one move of ``geodesic_pair_step`` (whichever endpoint moved)."""
    S2, T2 = geodesic_pair_step(S, T, spec)
    return S2 if S2 != S else T2


@dataclass
class SandwichReport:
    ok: bool
    witness: tuple[LatticePath, LatticePath, LatticePath] | None = None


def all_words_heights(spec: FamilySpec) -> np.ndarray:
    if 2**spec.n > MAX_ENUMERATION:
        raise SizeGuardError(f"2^{spec.n} words is too many")
    bits = (np.arange(2**spec.n)[:, None] >> np.arange(spec.n - 1, -1, -1)) & 1
    return np.cumsum(np.where(bits == 1, spec.a, -spec.b), axis=1)


def sandwich_closure_check(spec: FamilySpec, enum: FamilyEnumeration | None = None) -> SandwichReport:
    """Check (R, T members and R <= S <= T) => S member, over all words S."""
    enum = enum or enumerate_family(spec)
    W = all_words_heights(spec)
    member_rows = {row.tobytes() for row in enum.H}
    for row in W:
        if row.tobytes() in member_rows:
            continue
        below = np.flatnonzero(np.all(enum.H <= row, axis=1))
        if not below.size:
            continue
        above = np.flatnonzero(np.all(enum.H >= row, axis=1))
        if above.size:
            S = LatticePath.from_heights(row, spec.a, spec.b)
            return SandwichReport(False, (enum.members[below[0]], S, enum.members[above[0]]))
    return SandwichReport(True)


@dataclass
class MonotoneReport:
    ok: bool
    pairs_checked: int
    witness: tuple[LatticePath, LatticePath, FlipInstruction] | None = None


def monotone_check(spec: FamilySpec, enum: FamilyEnumeration | None = None) -> MonotoneReport:
    """For every ordered pair S <= T and every tuple, chain_step preserves the order."""
    enum = enum or enumerate_family(spec)
    images = step_images(enum)
    le = order_matrix(enum)
    tuples = all_instructions(spec.n)
    for c in range(images.shape[1]):
        img = images[:, c]
        bad = le & ~le[np.ix_(img, img)]
        if bad.any():
            r, s = np.argwhere(bad)[0]
            return MonotoneReport(False, int(le.sum()), (enum.members[r], enum.members[s], tuples[c]))
    return MonotoneReport(True, int(le.sum()) * images.shape[1])


def supnorm_check(spec: FamilySpec, table: WeightTable, steps: int, seed: int,
                  enum: FamilyEnumeration | None = None):
    """Coupled random trajectories from random member pairs; returns the first
    (S, T, tuple) where max_i |S_i - T_i| increases, or None.

    A fresh random pair is drawn whenever the current one has coalesced.
    """
    enum = enum or enumerate_family(spec)
    rng = np.random.default_rng(seed)
    m = len(enum)
    tuples = all_instructions(spec.n)
    weights = _tuple_weights(table)
    S = T = None
    for _ in range(steps):
        if S is None or S == T:
            r, s = rng.integers(m, size=2)
            S, T = enum.members[r], enum.members[s]
        f = tuples[rng.choice(len(tuples), p=weights)]
        before = np.abs(S.heights - T.heights).max()
        S2, T2 = chain_step(S, f, spec), chain_step(T, f, spec)
        if np.abs(S2.heights - T2.heights).max() > before:
            return S, T, f
        S, T = S2, T2
    return None


def empirical_tv(samples, enum: FamilyEnumeration) -> float:
    """TV distance between the empirical law of ``samples`` and the uniform law.

    Samples may be LatticePath objects or height rows; a non-member is a hard error.
    """
    counts = sample_counts(samples, enum)
    return 0.5 * float(np.abs(counts / counts.sum() - 1 / len(enum)).sum())


def sample_counts(samples, enum: FamilyEnumeration) -> np.ndarray:
    lookup = {row.tobytes(): k for k, row in enumerate(enum.H)}
    counts = np.zeros(len(enum), dtype=np.int64)
    for s in samples:
        row = np.ascontiguousarray(s.heights if isinstance(s, LatticePath) else s, dtype=np.int64)
        k = lookup.get(row.tobytes())
        if k is None:
            raise InvariantError(f"sample {row.tolist()} is not a member of the family")
        counts[k] += 1
    return counts

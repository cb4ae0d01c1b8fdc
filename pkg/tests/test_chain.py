import json

import numpy as np
import pytest

from pathmc.chain import (FUNCTIONALS, EstimatorAccumulator, Functional, NotCoalesced,
                          coupling_time, coupling_times, estimate_functional, grand_coupling_step,
                          mcmc_many, mcmc_run, replay, bound_steps, trajectory)
from pathmc.flip import FlipInstruction
from pathmc.oracle import enumerate_family
from pathmc.paths import FamilySpec, LatticePath, extremal_paths, is_member, partial_le
from pathmc.weights import build_weight_table

from grid import instances, ids

P = LatticePath.from_word


def test_zero_steps_returns_initial_path():
    spec = FamilySpec.build("excursion", 6, 1, 2)
    t = build_weight_table(6)
    assert mcmc_run(spec, t, 0, 5) == extremal_paths(spec)[1]
    S = P("UUDUUD", 1, 2)
    assert mcmc_run(spec, t, 0, 5, init=S) == S


def test_non_member_init_rejected():
    spec = FamilySpec.build("meander", 4)
    with pytest.raises(ValueError):
        mcmc_run(spec, build_weight_table(4), 3, 0, init=P("DUUU"))


def test_rejected_peak_flip_at_first_site():
    spec = FamilySpec.build("meander", 2)
    assert grand_coupling_step([P("UU")], FlipInstruction(1, False, True), spec) == [P("UU")]


def test_runs_are_deterministic():
    spec = FamilySpec.build("meander", 30, 1, 2)
    t = build_weight_table(30)
    assert mcmc_run(spec, t, 5000, 42) == mcmc_run(spec, t, 5000, 42)
    assert mcmc_run(spec, t, 5000, 42) != mcmc_run(spec, t, 5000, 43)


CHAIN_GRID = instances(ns=(6, 9))


@pytest.mark.parametrize("label,spec", CHAIN_GRID, ids=ids(CHAIN_GRID))
def test_kernel_agrees_with_python_replay(label, spec):
    t = build_weight_table(spec.n)
    start = extremal_paths(spec)[1]
    for seed in range(3):
        fast = mcmc_run(spec, t, 400, seed)
        slow = replay(spec, t, start, seed, 1, 400)
        assert fast == slow
        assert is_member(fast, spec)


def test_many_matches_single_runs():
    spec = FamilySpec.build("wall", 12, 1, 1, h=3, r=4, s=8)
    t = build_weight_table(12)
    rows = mcmc_many(spec, t, 700, [4, 5, 6])
    for row, seed in zip(rows, [4, 5, 6]):
        np.testing.assert_array_equal(row, mcmc_run(spec, t, 700, seed).heights)


def test_trajectory_records():
    spec = FamilySpec.build("meander", 8)
    t = build_weight_table(8)
    recs = list(trajectory(spec, t, 50, 9, every=10))
    assert [r["t"] for r in recs] == [10, 20, 30, 40, 50]
    assert recs[-1]["word"] == mcmc_run(spec, t, 50, 9).word
    for r in recs:
        json.dumps(r)
        path = P(r["word"])
        assert r["final"] == path.heights[-1] and r["max"] == path.heights.max()


def test_grand_coupling_identical_inputs():
    spec = FamilySpec.build("meander", 6)
    S = P("UDUUDU")
    f = FlipInstruction(3, True, False)
    A, B = grand_coupling_step([S, S], f, spec)
    assert A == B


def test_neighbours_differing_at_site_merge_under_that_site():
    # two meanders differing only at i; any flip at i makes them equal
    spec = FamilySpec.build("meander", 6)
    enum = enumerate_family(spec)
    hits = 0
    for S in enum.members:
        for i in range(1, spec.n):
            if S.word[i - 1:i + 1] == "DU":
                T = P(S.word[:i - 1] + "UD" + S.word[i + 1:])
                if not is_member(T, spec):
                    continue
                hits += 1
                for up in (True, False):
                    for plus in (True, False):
                        A, B = grand_coupling_step([S, T], FlipInstruction(i, up, plus), spec)
                        assert A == B
    assert hits > 0


def test_order_preserved_along_coupled_runs():
    spec = FamilySpec.build("excursion", 12)
    t = build_weight_table(12)
    lo, hi = extremal_paths(spec)
    for seed in range(5):
        a = replay(spec, t, lo, seed, 1, 300)
        b = replay(spec, t, hi, seed, 1, 300)
        assert partial_le(a, b)


def test_excursion_final_height_is_zero():
    spec = FamilySpec.build("excursion", 9, 1, 2)
    assert estimate_functional(spec, build_weight_table(9), 5000, 1, "final_height") == 0.0


def test_constant_functional_via_accumulator():
    acc = EstimatorAccumulator()
    for _ in range(7):
        acc.add(3.5)
    assert acc.estimate == 3.5 and acc.T == 7
    c = Functional("const", lambda p: 3.5, -1)
    assert c(P("UU")) == 3.5


def test_functionals_match_kernel_values():
    spec = FamilySpec.build("meander", 10, 1, 2)
    t = build_weight_table(10)
    for name, f in FUNCTIONALS.items():
        # T=1: the estimate is f(S(1)); compare with the Python evaluator
        S1 = mcmc_run(spec, t, 1, 17)
        assert estimate_functional(spec, t, 1, 17, name) == pytest.approx(f(S1))


def test_dyck_max_height_estimate():
    spec = FamilySpec.build("excursion", 6)
    enum = enumerate_family(spec)
    exact = np.mean([p.heights.max() for p in enum.members])
    assert exact == 2.0
    est = estimate_functional(spec, build_weight_table(6), 2 * 10**6, 1, "max_height")
    assert est == pytest.approx(exact, abs=0.02)


def test_coupling_time_singleton_is_zero():
    spec = FamilySpec.build("culminating", 4, 1, 2)
    assert len(enumerate_family(spec)) == 1
    assert coupling_time(spec, build_weight_table(4), 3) == 0


def test_coupling_time_deterministic_and_capped():
    spec = FamilySpec.build("meander", 10)
    t = build_weight_table(10)
    c = coupling_time(spec, t, 8)
    assert c > 0 and c == coupling_time(spec, t, 8)
    assert coupling_times(spec, t, [8, 9]).tolist() == [c, coupling_time(spec, t, 9)]
    with pytest.raises(NotCoalesced):
        coupling_time(spec, t, 8, cap=c - 1)
    assert coupling_time(spec, t, 8, cap=c) == c


def test_coupling_time_matches_replay():
    spec = FamilySpec.build("meander", 7)
    t = build_weight_table(7)
    c = coupling_time(spec, t, 2)
    lo, hi = extremal_paths(spec)
    assert replay(spec, t, lo, 2, 1, c) == replay(spec, t, hi, 2, 1, c)
    assert replay(spec, t, lo, 2, 1, c - 1) != replay(spec, t, hi, 2, 1, c - 1)


def test_bound_steps_formula():
    n = 6
    base = (2 / 3) * 36 * 7 * np.log(42 / (2 * 0.01))
    assert bound_steps(n) == int(np.ceil(base)) * 2

import itertools
import math

import numpy as np
import pytest

from pathmc.flip import FlipInstruction, chain_step
from pathmc.oracle import (build_transition_matrix, count_family, coupled_expected_distance,
                           curvature_scan, empirical_tv, enumerate_family, exact_tmix,
                           exact_tv_decay, geodesic_check, geodesic_pair_step, geodesic_step,
                           monotone_check, sample_counts, sandwich_closure_check, supnorm_check,
                           worst_tv_decay)
from pathmc.paths import (FamilySpec, InvariantError, LatticePath, SizeGuardError, d1,
                          extremal_paths, is_member, unconstrained)
from pathmc.weights import build_weight_table, effective_kappa

from grid import instances, ids

P = LatticePath.from_word


@pytest.mark.parametrize("family,n,a,b,expected", [
    ("excursion", 6, 1, 1, ["UDUDUD", "UDUUDD", "UUDDUD", "UUDUDD", "UUUDDD"]),
    ("meander", 3, 1, 1, ["UDU", "UUD", "UUU"]),
    ("excursion", 6, 1, 2, ["UUDUUD", "UUUDUD", "UUUUDD"]),
    ("culminating", 3, 1, 1, ["UDU", "UUU"]),
])
def test_enumeration_examples(family, n, a, b, expected):
    enum = enumerate_family(FamilySpec.build(family, n, a, b))
    assert [p.word for p in enum.members] == expected


PRUNE_GRID = instances(ns=(3, 7, 10, 12), pairs=[(1, 1), (1, 2), (2, 3)]) + \
    [("unconstrained-n9", unconstrained(9))]


@pytest.mark.parametrize("label,spec", PRUNE_GRID, ids=ids(PRUNE_GRID))
def test_pruned_equals_unpruned(label, spec):
    pruned = enumerate_family(spec)
    full = enumerate_family(spec, prune=False)
    assert pruned.members == full.members
    assert len(set(pruned.members)) == len(pruned)
    assert count_family(spec) == len(pruned)
    assert all(pruned.index[p] == k for k, p in enumerate(pruned.members))


def test_size_guard():
    with pytest.raises(SizeGuardError):
        enumerate_family(unconstrained(30))


MATRIX_GRID = instances(ns=(6, 8))


@pytest.mark.parametrize("label,spec", MATRIX_GRID, ids=ids(MATRIX_GRID))
@pytest.mark.parametrize("mode", ["quadratic", "uniform"])
def test_matrix_symmetric_stochastic_uniform_stationary(label, spec, mode):
    P_ = build_transition_matrix(spec, build_weight_table(spec.n, mode)).P
    m = P_.shape[0]
    assert np.all(P_ >= 0)
    assert np.abs(P_.sum(axis=1) - 1).max() <= 1e-12
    assert np.abs(P_ - P_.T).max() <= 1e-12
    assert np.abs(np.full(m, 1 / m) @ P_ - 1 / m).max() <= 1e-12


def test_interior_entries_are_half_the_site_weight():
    spec = FamilySpec.build("meander", 7)
    t = build_weight_table(7)
    tm = build_transition_matrix(spec, t)
    enum = tm.enum
    for r, R in enumerate(enum.members):
        for i in range(1, spec.n):
            for up in (True, False):
                S = chain_step(R, FlipInstruction(i, up, True), spec)
                if S != R:
                    assert tm.P[r, enum.index[S]] == pytest.approx(t.prob(i) / 2, abs=1e-15)
        # end moves carry a quarter of p_n
        S = chain_step(R, FlipInstruction(spec.n, True, True), spec)
        if S != R:
            assert tm.P[r, enum.index[S]] == pytest.approx(t.prob(spec.n) / 4, abs=1e-15)


def test_tv_decay_properties():
    spec = FamilySpec.build("meander", 6)
    tm = build_transition_matrix(spec, build_weight_table(6))
    m = len(tm)
    tv = exact_tv_decay(tm, extremal_paths(spec)[1], 300)
    assert tv[0] == pytest.approx(1 - 1 / m, abs=1e-15)
    assert np.all(np.diff(tv) <= 1e-15)
    worst = worst_tv_decay(tm, 300)
    assert np.all(worst >= tv - 1e-15)


def test_tmix_regression_and_singleton():
    dyck = FamilySpec.build("excursion", 6)
    assert exact_tmix(build_transition_matrix(dyck, build_weight_table(6))) == 11
    assert exact_tmix(build_transition_matrix(dyck, build_weight_table(6, "uniform"))) == 11
    single = FamilySpec.build("culminating", 4, 1, 2)
    assert exact_tmix(build_transition_matrix(single, build_weight_table(4))) == 0


def test_tmix_is_first_time_below_threshold():
    spec = FamilySpec.build("meander", 6)
    tm = build_transition_matrix(spec, build_weight_table(6))
    t = exact_tmix(tm)
    w = worst_tv_decay(tm, t)
    assert w[t] <= math.exp(-1) < w[t - 1]


def test_coupled_expected_distance_examples():
    spec = FamilySpec.build("meander", 8)
    t = build_weight_table(8)
    S = P("UUUDUUUU")
    assert coupled_expected_distance(S, S, spec, t) == 0
    # neighbours at interior site 4, far from the floor
    T = P("UUUUDUUU")
    assert d1(S, T) == 1
    assert coupled_expected_distance(S, T, spec, t) == pytest.approx(1 - t.kappa0 / t.Z, abs=1e-12)
    # neighbours at the last site
    S, T = P("UUUUUUUD"), P("UUUUUUUU")
    expected = 1 - (t.prob(8) - t.prob(7)) / 2
    assert coupled_expected_distance(S, T, spec, t) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("label,spec", instances(["meander", "excursion", "wall"], ns=(6, 8)),
                         ids=ids(instances(["meander", "excursion", "wall"], ns=(6, 8))))
def test_curvature_at_least_effective_kappa(label, spec):
    t = build_weight_table(spec.n)
    rep = curvature_scan(spec, t)
    assert rep.min_contraction >= effective_kappa(t) - 1e-12
    assert len(rep.witnesses) >= 1
    assert rep.contractions.min() == rep.min_contraction


def test_curvature_uniform_zero_witness():
    rep = curvature_scan(FamilySpec.build("meander", 6), build_weight_table(6, "uniform"))
    assert rep.min_contraction <= 1e-12
    S, T = rep.witnesses[0]
    assert d1(S, T) == 1


def test_culminating_curvature_report_exists():
    rep = curvature_scan(FamilySpec.build("culminating", 6), build_weight_table(6))
    assert len(rep.pairs) > 0


GEO_GRID = instances(["meander", "excursion", "wall"], ns=(6, 8)) + \
    [("unconstrained-n5", unconstrained(5))]


@pytest.mark.parametrize("label,spec", GEO_GRID, ids=ids(GEO_GRID))
def test_geodesic_on_monotone_families(label, spec):
    rep = geodesic_check(spec)
    assert rep.ok and rep.connected and rep.irreducible


def test_unconstrained_graph_diameter():
    rep = geodesic_check(unconstrained(4))
    assert rep.ok and rep.max_graph_distance == 10


@pytest.mark.parametrize("label,spec", instances(["culminating"], ns=(6, 8)),
                         ids=ids(instances(["culminating"], ns=(6, 8))))
def test_culminating_chain_irreducible(label, spec):
    # the chain reaches every member (the end move may jump more than one unit)
    assert geodesic_check(spec).irreducible


def test_culminating_neighbour_graph_counterexample():
    rep = geodesic_check(FamilySpec.build("culminating", 6))
    assert not rep.ok
    S, T, graph, dist = rep.counterexample
    assert graph != dist


def test_geodesic_step_example():
    spec = unconstrained(2)
    assert geodesic_step(P("UD"), P("DU"), spec) == P("DU")


@pytest.mark.parametrize("label,spec", GEO_GRID, ids=ids(GEO_GRID))
def test_geodesic_step_reduces_distance(label, spec):
    members = enumerate_family(spec).members
    rng = np.random.default_rng(1)
    for _ in range(2000):
        r, s = rng.integers(len(members), size=2)
        S, T = members[r], members[s]
        if S == T:
            continue
        S2, T2 = geodesic_pair_step(S, T, spec)
        assert is_member(S2, spec) and is_member(T2, spec)
        assert d1(S2, T2) == d1(S, T) - 1


def test_geodesic_step_keeps_culminating_membership():
    spec = FamilySpec.build("culminating", 7)
    members = enumerate_family(spec).members
    for S, T in itertools.combinations(members, 2):
        for p in geodesic_pair_step(S, T, spec):
            assert is_member(p, spec)


@pytest.mark.parametrize("label,spec", instances(ns=(6, 8)), ids=ids(instances(ns=(6, 8))))
def test_monotone_coupling(label, spec):
    assert monotone_check(spec).ok


def test_sandwich_closure():
    assert sandwich_closure_check(FamilySpec.build("meander", 7)).ok
    assert sandwich_closure_check(FamilySpec.build("excursion", 8)).ok
    rep = sandwich_closure_check(FamilySpec.build("culminating", 5))
    assert not rep.ok
    R, S, T = rep.witness
    spec = FamilySpec.build("culminating", 5)
    assert is_member(R, spec) and is_member(T, spec) and not is_member(S, spec)
    assert np.all(R.heights <= S.heights) and np.all(S.heights <= T.heights)


def test_culminating_supnorm_non_increasing():
    spec = FamilySpec.build("culminating", 7)
    assert supnorm_check(spec, build_weight_table(7), 10**4, 0) is None


def test_empirical_tv_examples():
    enum = enumerate_family(FamilySpec.build("excursion", 8))
    assert empirical_tv(enum.members, enum) == pytest.approx(0, abs=1e-15)
    assert empirical_tv([enum.members[3]] * 10, enum) == pytest.approx(1 - 1 / 14)
    assert sample_counts(enum.members * 2, enum).tolist() == [2] * 14
    with pytest.raises(InvariantError):
        empirical_tv([P("UUUUUUUU")], enum)

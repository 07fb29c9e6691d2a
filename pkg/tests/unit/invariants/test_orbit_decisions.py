import random
from fractions import Fraction

import pytest

from conjugacy_pit.algebra import Matrix
from conjugacy_pit.errors import DimensionError
from conjugacy_pit.generators import (
    closure_equal_pair,
    conjugate_pair,
    random_invertible,
    random_tuple,
    unipotent_pair,
)
from conjugacy_pit.invariants import (
    MatrixTuple,
    Method,
    OrbitDecision,
    SeparatingWitness,
    conjugate,
    evaluate_f_ell,
    is_conjugator,
    orbit_closure_intersects,
    orbit_closure_intersects_blackbox,
    orbit_member,
    separates,
    separating_family,
    trace_word_oracle,
)
from conjugacy_pit.pit import HittingSet, Provenance, grid_hitting_set, random_hitting_set

DIAG_12 = MatrixTuple.from_rows([[[1, 0], [0, 2]]])
DIAG_13 = MatrixTuple.from_rows([[[1, 0], [0, 3]]])


def test_closure_of_a_tuple_meets_itself():
    rng = random.Random(0)
    a = random_tuple(rng, 2, 2)
    verdict = orbit_closure_intersects(a, a)
    assert verdict.decision == OrbitDecision.intersecting
    assert verdict.method == Method.whitebox
    assert verdict.witness is None


def test_unipotent_closure_contains_the_identity():
    # GIVEN ([[1, 1], [0, 1]]) and (I_2)
    a, b = unipotent_pair()
    # THEN the closures intersect although the orbits differ
    assert orbit_closure_intersects(a, b).decision == OrbitDecision.intersecting


def test_diagonal_tuples_are_separated_by_the_trace():
    # GIVEN diag(1, 2) and diag(1, 3)
    verdict = orbit_closure_intersects(DIAG_12, DIAG_13)
    # THEN l = 1 separates them with Tr = 3 against Tr = 4
    assert verdict.decision == OrbitDecision.disjoint
    assert verdict.witness == SeparatingWitness(1, (Fraction(0),), Fraction(3), Fraction(4))


def test_closure_decision_is_symmetric():
    rng = random.Random(1)
    for _ in range(5):
        a, b = random_tuple(rng, 2, 2), random_tuple(rng, 2, 2)
        assert orbit_closure_intersects(a, b).decision == orbit_closure_intersects(b, a).decision


def test_separating_witness_separates():
    rng = random.Random(2)
    a, b = random_tuple(rng, 2, 2), random_tuple(rng, 2, 2)
    verdict = orbit_closure_intersects(a, b)
    assert verdict.decision == OrbitDecision.disjoint
    w = verdict.witness
    assert isinstance(w, SeparatingWitness)
    assert evaluate_f_ell(a, w.point, w.ell) == w.value_a != w.value_b
    assert evaluate_f_ell(b, w.point, w.ell) == w.value_b


def test_workers_do_not_change_the_verdict():
    # GIVEN random pairs tested on one thread and on four
    rng = random.Random(3)
    for _ in range(3):
        a, b = random_tuple(rng, 2, 2), random_tuple(rng, 2, 2)
        sequential = orbit_closure_intersects(a, b)
        parallel = orbit_closure_intersects(a, b, workers=4)
        # THEN the decision and the smallest-length witness agree
        assert sequential.decision == parallel.decision
        assert sequential.witness == parallel.witness


def test_closure_decision_rejects_mismatched_tuples():
    with pytest.raises(DimensionError):
        orbit_closure_intersects(DIAG_12, random_tuple(random.Random(0), 2, 2))


def test_conjugate_and_upper_triangular_pairs_intersect():
    rng = random.Random(4)
    for _ in range(3):
        a, b, _ = conjugate_pair(rng, 2, 2)
        assert orbit_closure_intersects(a, b).decision == OrbitDecision.intersecting
        a, b = closure_equal_pair(rng, 2, 2)
        assert orbit_closure_intersects(a, b).decision == OrbitDecision.intersecting


def test_conjugating_either_side_keeps_disjoint_pairs_disjoint():
    # GIVEN diag(1, 2) and diag(1, 3) with one side replaced by a random conjugate
    rng = random.Random(9)
    for _ in range(3):
        left = conjugate(DIAG_12, random_invertible(rng, 2))
        right = conjugate(DIAG_13, random_invertible(rng, 2))
        # THEN the closures stay disjoint
        assert orbit_closure_intersects(left, DIAG_13).decision == OrbitDecision.disjoint
        assert orbit_closure_intersects(DIAG_12, right).decision == OrbitDecision.disjoint


def test_closure_decision_is_conjugation_invariant():
    rng = random.Random(10)
    for _ in range(5):
        a, b = random_tuple(rng, 2, 2), random_tuple(rng, 2, 2)
        decision = orbit_closure_intersects(a, b).decision
        moved_a = conjugate(a, random_invertible(rng, 2))
        moved_b = conjugate(b, random_invertible(rng, 2))
        assert orbit_closure_intersects(moved_a, b).decision == decision
        assert orbit_closure_intersects(a, moved_b).decision == decision


@pytest.mark.acceptance
def test_closure_decision_agrees_with_word_traces():
    # GIVEN 40 conjugate, 40 random and 20 closure-equal pairs
    rng = random.Random(2024)
    pairs = [conjugate_pair(rng, 2, 2)[:2] for _ in range(40)]
    pairs += [(random_tuple(rng, 2, 2), random_tuple(rng, 2, 2)) for _ in range(40)]
    pairs += [closure_equal_pair(rng, 2, 2) for _ in range(19)] + [unipotent_pair()]
    # THEN the decision matches the trace-of-words oracle on all of them
    for a, b in pairs:
        intersecting = orbit_closure_intersects(a, b).decision == OrbitDecision.intersecting
        assert intersecting == trace_word_oracle(a, b, 4)


def test_separating_family_size():
    h = random_hitting_set(4, 3, seed=0)
    family = separating_family(2, 2, h)
    assert len(family) == 4 * 3
    assert {d.ell for d in family} == {1, 2, 3, 4}
    assert separating_family(2, 2, HittingSet((), Provenance.file)) == []


@pytest.mark.acceptance
def test_family_members_are_conjugation_invariant():
    # GIVEN 20 random conjugate pairs
    rng = random.Random(5)
    family = separating_family(2, 2, random_hitting_set(4, 2, seed=1))
    for _ in range(20):
        # THEN no member of the family tells them apart
        a, b, _ = conjugate_pair(rng, 2, 2)
        assert separates(a, b, family) is None


def test_family_evaluation_checks_arity():
    family = separating_family(2, 2, random_hitting_set(4, 1, seed=0))
    with pytest.raises(DimensionError):
        family[0].evaluate(DIAG_12)


@pytest.mark.acceptance
def test_grid_family_agrees_with_word_traces():
    # GIVEN 50 pairs of single matrices (r = 1) and the grid over n^2 variables with bound 0
    rng = random.Random(6)
    family = separating_family(2, 1, grid_hitting_set(4, 0))
    for i in range(50):
        if i % 2:
            a, b, _ = conjugate_pair(rng, 2, 1)
        else:
            a, b = random_tuple(rng, 2, 1), random_tuple(rng, 2, 1)
        # THEN separation happens exactly when some Tr(A^l) differs
        assert (separates(a, b, family) is None) == trace_word_oracle(a, b, 4)


def test_random_family_separates_random_pairs():
    # GIVEN 20 random points from {0..99}^4 and 50 pairs with different word traces
    family = separating_family(2, 2, random_hitting_set(4, 20, seed=7, sample_range=100))
    rng = random.Random(12)
    pairs = []
    while len(pairs) < 50:
        a, b = random_tuple(rng, 2, 2), random_tuple(rng, 2, 2)
        if not trace_word_oracle(a, b, 4):
            pairs.append((a, b))
    # THEN every pair is told apart by some member of the family
    assert all(separates(a, b, family) is not None for a, b in pairs)


def test_blackbox_closure_decision():
    # GIVEN the diagonal tuples and the grid point 0
    verdict = orbit_closure_intersects_blackbox(DIAG_12, DIAG_13, grid_hitting_set(4, 0))
    # THEN the trace separates them with a black-box method
    assert verdict.decision == OrbitDecision.disjoint
    assert verdict.method == Method.blackbox
    assert verdict.witness == SeparatingWitness(
        1, (Fraction(0),) * 4, Fraction(3), Fraction(4)
    )
    # AND an empty hitting set cannot separate anything
    empty = HittingSet((), Provenance.random)
    assert orbit_closure_intersects_blackbox(DIAG_12, DIAG_13, empty).decision == (
        OrbitDecision.intersecting
    )


def test_a_tuple_is_in_its_own_orbit():
    rng = random.Random(7)
    a = random_tuple(rng, 2, 2)
    verdict = orbit_member(a, a, seed=0)
    assert verdict.decision == OrbitDecision.member
    assert is_conjugator(a, a, verdict.witness)


def test_unipotent_is_not_conjugate_to_the_identity():
    # GIVEN ([[1, 1], [0, 1]]) and (I_2)
    a, b = unipotent_pair()
    verdict = orbit_member(a, b, seed=0)
    # THEN every solution of B P = P A is singular
    assert verdict.decision == OrbitDecision.non_member
    assert verdict.method == Method.randomized
    assert verdict.failure_bound <= Fraction(1, 10**5)


def test_membership_without_nonzero_solutions():
    # GIVEN diagonal matrices with disjoint spectra, only P = 0 solves B P = P A
    a = MatrixTuple.from_rows([[[1, 0], [0, 2]]])
    b = MatrixTuple.from_rows([[[3, 0], [0, 4]]])
    verdict = orbit_member(a, b, seed=0)
    assert verdict.decision == OrbitDecision.non_member
    assert verdict.method == Method.whitebox
    assert verdict.failure_bound == 0


def test_random_conjugates_are_members():
    # GIVEN B = P A P^-1 for random 3x3 pairs
    rng = random.Random(8)
    for seed in range(3):
        a, b, _ = conjugate_pair(rng, 3, 2)
        verdict = orbit_member(a, b, seed=seed)
        # THEN a conjugating matrix is reported
        assert verdict.decision == OrbitDecision.member
        assert isinstance(verdict.witness, Matrix)
        assert is_conjugator(a, b, verdict.witness)


@pytest.mark.acceptance
def test_membership_on_constructed_pairs():
    rng = random.Random(2024)
    for i in range(50):
        n, r = rng.randint(1, 3), rng.randint(1, 2)
        a = random_tuple(rng, n, r)
        b = conjugate(a, random_invertible(rng, n))
        verdict = orbit_member(a, b, seed=i)
        assert verdict.decision == OrbitDecision.member
        assert is_conjugator(a, b, verdict.witness)
    non_members = [unipotent_pair()]
    for _ in range(49):
        # shifting one matrix by the identity changes its trace, which conjugation keeps
        n, r = rng.randint(1, 3), rng.randint(1, 2)
        a = random_tuple(rng, n, r)
        b = conjugate(a, random_invertible(rng, n))
        shifted = (b[0] + Matrix.identity(n),) + b.matrices[1:]
        non_members.append((a, MatrixTuple(shifted)))
    for i, (a, b) in enumerate(non_members):
        verdict = orbit_member(a, b, seed=i)
        assert verdict.decision == OrbitDecision.non_member
        assert verdict.failure_bound <= Fraction(1, 10**5)


def test_members_have_intersecting_closures():
    # GIVEN conjugate, closure-equal and random pairs
    rng = random.Random(11)
    pairs = [conjugate_pair(rng, 2, 2)[:2] for _ in range(10)]
    pairs += [closure_equal_pair(rng, 2, 2) for _ in range(10)]
    pairs += [(random_tuple(rng, 2, 2), random_tuple(rng, 2, 2)) for _ in range(10)]
    members = 0
    for seed, (a, b) in enumerate(pairs):
        # WHEN membership holds
        if orbit_member(a, b, seed=seed).decision == OrbitDecision.member:
            members += 1
            # THEN the closures intersect as well
            assert orbit_closure_intersects(a, b).decision == OrbitDecision.intersecting
    assert members >= 10

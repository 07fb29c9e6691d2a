import random
from fractions import Fraction
from itertools import product

import pytest

from conjugacy_pit.algebra import Matrix, Monomial, SparsePoly
from conjugacy_pit.branching import eval_abp, eval_roabp, expand_abp, expand_roabp
from conjugacy_pit.errors import DimensionError, ParameterError, SizeError
from conjugacy_pit.generators import (
    conjugate_pair,
    random_invertible,
    random_scalar,
    random_tuple,
    unipotent_pair,
)
from conjugacy_pit.invariants import (
    MatrixTuple,
    build_f_ell_roabp,
    conjugate,
    diff_roabp,
    entry_variable,
    evaluate_f_ell,
    invariant_abp,
    is_conjugator,
    trace_word_oracle,
)

DIAG_12 = MatrixTuple.from_rows([[[1, 0], [0, 2]]])
DIAG_13 = MatrixTuple.from_rows([[[1, 0], [0, 3]]])
PAIR = MatrixTuple.from_rows([[[1, 2], [3, 4]], [[0, 1], [1, 0]]])


def word_trace(a: MatrixTuple, word) -> Fraction:
    product_matrix = Matrix.identity(a.n)
    for letter in word:
        product_matrix = product_matrix @ a[letter]
    return product_matrix.trace()


def test_tuple_shapes():
    assert (PAIR.n, PAIR.r) == (2, 2)
    with pytest.raises(DimensionError):
        MatrixTuple((Matrix.identity(2), Matrix.identity(3)))
    with pytest.raises(DimensionError):
        MatrixTuple(())
    with pytest.raises(DimensionError):
        PAIR.check_compatible(DIAG_12)


def test_pencil():
    # GIVEN M(x) = A0 + A1 x
    # THEN M(2) = [[1, 4], [5, 4]] and M(0) = A0
    assert PAIR.pencil(2) == Matrix.from_rows([[1, 4], [5, 4]])
    assert PAIR.pencil(0) == PAIR[0]


def test_conjugation_helpers():
    rng = random.Random(0)
    a = random_tuple(rng, 3, 2)
    p = random_invertible(rng, 3)
    assert is_conjugator(a, conjugate(a, p), p)
    assert not is_conjugator(a, conjugate(a, p), Matrix.zeros(3, 3))


def test_f_ell_examples():
    # GIVEN the identity tuple, f_l is the constant n for every l
    identity = MatrixTuple((Matrix.identity(2),))
    for ell in (1, 2, 3):
        assert expand_roabp(build_f_ell_roabp(identity, ell)) == SparsePoly.constant(ell, 2)
    # AND f_1 of the pair is Tr(A0) + Tr(A1) x0 = 5
    assert expand_roabp(build_f_ell_roabp(PAIR, 1)) == SparsePoly.constant(1, 5)
    assert evaluate_f_ell(PAIR, [2], 1) == 5


def test_f_ell_rejects_bad_lengths():
    with pytest.raises(ParameterError):
        build_f_ell_roabp(PAIR, 0)
    with pytest.raises(ParameterError):
        evaluate_f_ell(PAIR, [1], 2)


@pytest.mark.acceptance
@pytest.mark.parametrize("ell", (1, 2, 3))
def test_coefficients_are_word_traces(ell):
    # GIVEN 50 random 2x2 pairs, the same ones for every ell
    rng = random.Random(0)
    for _ in range(50):
        a = random_tuple(rng, 2, 2)
        f = expand_roabp(build_f_ell_roabp(a, ell))
        words = {Monomial.from_vector(w): w for w in product(range(a.r), repeat=ell)}
        # THEN each coefficient of x^w is Tr(A_w) and no other exponent appears
        assert set(f.terms) <= set(words)
        for monomial, word in words.items():
            assert f.coeff(monomial) == word_trace(a, word)


def test_f_ell_program_matches_direct_evaluation():
    rng = random.Random(3)
    a = random_tuple(rng, 3, 2)
    program = build_f_ell_roabp(a, 3)
    assert program.width <= a.n**2
    point = [random_scalar(rng) for _ in range(3)]
    assert eval_roabp(program, point) == evaluate_f_ell(a, point, 3)


def test_difference_programs():
    # GIVEN the unipotent pair and the two diagonal tuples
    a, b = unipotent_pair()
    # THEN the unipotent difference vanishes and the diagonal one is the constant -1
    for ell in (1, 2, 3, 4):
        assert expand_roabp(diff_roabp(a, b, ell)).is_zero()
    assert expand_roabp(diff_roabp(DIAG_12, DIAG_13, 1)) == SparsePoly.constant(1, -1)


def test_invariant_abp_is_homogeneous_and_invariant():
    # GIVEN f_l(M, alpha) on the entry variables of 2x2 pairs
    rng = random.Random(4)
    n, r = 2, 2
    for ell in (1, 2, 3):
        alpha = [random_scalar(rng) for _ in range(ell)]
        program = invariant_abp(alpha, ell, n, r)
        f = expand_abp(program)
        # THEN every monomial has degree l
        assert all(m.degree == ell for m in f.terms)
        # AND its values agree with f_l and survive conjugation
        a, b, _ = conjugate_pair(rng, n, r)
        assert eval_abp(program, a.entries()) == evaluate_f_ell(a, alpha, ell)
        assert eval_abp(program, a.entries()) == eval_abp(program, b.entries())


def test_entry_variables():
    assert entry_variable(0, 0, 0, 2) == 0
    assert entry_variable(1, 0, 1, 2) == 5
    assert PAIR.entries()[entry_variable(1, 0, 1, 2)] == 1


def test_trace_word_oracle():
    a, b = unipotent_pair()
    assert trace_word_oracle(a, b, 4)
    assert not trace_word_oracle(DIAG_12, DIAG_13, 1)
    assert trace_word_oracle(DIAG_12, DIAG_13, 0)
    with pytest.raises(SizeError):
        trace_word_oracle(PAIR, PAIR, 20)

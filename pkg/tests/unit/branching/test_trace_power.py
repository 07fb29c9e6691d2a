import random
from fractions import Fraction

import pytest

from conjugacy_pit.algebra import Matrix, Monomial, SparsePoly
from conjugacy_pit.branching import (
    ABP,
    AffineForm,
    AffineMatrix,
    TracePower,
    abp_to_trace_power,
    cyclic_block_embed,
    cyclic_variable_matrix,
    eval_trace_power,
    expand_abp,
    expand_trace_power,
    homogenize,
    homogenized_trace_query,
    trace_power_to_abp,
)
from conjugacy_pit.errors import ParameterError, ShapeError
from conjugacy_pit.generators import (
    random_abp,
    random_affine_matrix,
    random_matrix,
    random_scalar,
    random_trace_power,
)

X0, X1 = AffineForm.var(0), AffineForm.var(1)


def single(form: AffineForm) -> AffineMatrix:
    return AffineMatrix(1, 1, (form,))


def test_depth_one_program_is_a_one_by_one_trace():
    t = abp_to_trace_power(ABP(1, (single(X0),)))
    assert t.width == 1
    assert expand_trace_power(t) == SparsePoly.variable(1, 0)


def test_product_program_uses_the_cyclic_embedding():
    # GIVEN the width-1 program x0 * x1
    t = abp_to_trace_power(ABP(2, (single(X0), single(X1))))
    # THEN A = [[0, x0/2], [x1, 0]] and Tr(A^2) = x0 x1
    assert t.matrix.to_rows() == [[AffineForm(), X0.scale(Fraction(1, 2))], [X1, AffineForm()]]
    assert expand_trace_power(t) == SparsePoly(2, {Monomial.from_vector((1, 1)): 1})


def test_d_prime_smaller_than_depth():
    with pytest.raises(ParameterError):
        abp_to_trace_power(ABP(2, (single(X0), single(X1))), 1)


@pytest.mark.acceptance
def test_round_trip_preserves_the_polynomial():
    # GIVEN 50 random programs with w <= 2, d <= 3, n <= 3
    rng = random.Random(0)
    for _ in range(50):
        p = random_abp(rng, rng.randint(1, 3), rng.randint(1, 2), rng.randint(1, 3))
        d_prime = p.depth + rng.randint(0, 1)
        t = abp_to_trace_power(p, d_prime)
        # THEN both directions keep the expansion and respect the width bounds
        assert expand_trace_power(t) == expand_abp(p)
        assert t.width <= p.width * d_prime
        back = trace_power_to_abp(t)
        assert expand_abp(back) == expand_abp(p)
        assert back.width <= t.width**2


def test_trace_power_to_abp_examples():
    # GIVEN Tr([x]^3) and the cyclic variable matrix with d = 2
    cube = TracePower(1, 3, single(X0))
    assert expand_abp(trace_power_to_abp(cube)) == SparsePoly.variable(1, 0) ** 3
    cycle = trace_power_to_abp(cyclic_variable_matrix(2))
    assert expand_abp(cycle) == SparsePoly(2, {Monomial.from_vector((1, 1)): 2})


def test_trace_power_to_abp_on_random_squares():
    rng = random.Random(1)
    for _ in range(10):
        t = TracePower(2, 2, random_affine_matrix(rng, 2, 2, 2))
        a = t.matrix.expand(2)
        direct = sum(
            (a[i][k] * a[k][i] for i in range(2) for k in range(2)), SparsePoly.zero(2)
        )
        assert expand_abp(trace_power_to_abp(t)) == direct


def test_cyclic_block_embed_examples():
    # GIVEN scalar blocks a and b
    a, b = Fraction(3), Fraction(5)
    embedded = cyclic_block_embed([Matrix(1, 1, (a,)), Matrix(1, 1, (b,))])
    # THEN Tr(A^2) = 2ab
    assert embedded.power(2).trace() == 2 * a * b
    # AND one block is its own cycle
    m = Matrix.from_rows([[1, 2], [3, 4]])
    assert cyclic_block_embed([m]) == m


@pytest.mark.parametrize("d", (2, 3))
def test_cyclic_block_embed_trace_identity(d):
    # GIVEN d random 2x2 blocks
    rng = random.Random(d)
    blocks = [random_matrix(rng, 2, 2) for _ in range(d)]
    product = Matrix.identity(2)
    for m in blocks:
        product = product @ m
    # THEN Tr(A^d) = d Tr(M_1 ... M_d)
    assert cyclic_block_embed(blocks).power(d).trace() == d * product.trace()


def test_cyclic_block_embed_rejects_mixed_sizes():
    with pytest.raises(ShapeError):
        cyclic_block_embed([Matrix.identity(1), Matrix.identity(2)])


@pytest.mark.parametrize("d", (2, 3, 4))
def test_power_of_a_cycle(d):
    # GIVEN the cycle matrix with A[i][i + 1] = x_i
    # THEN Tr(A^d) = d x_0 ... x_{d-1}
    expected = SparsePoly(d, {Monomial.from_vector((1,) * d): d})
    assert expand_trace_power(cyclic_variable_matrix(d)) == expected


def test_homogenized_query_examples():
    # GIVEN Tr(A^2) for a random affine 2x2 matrix
    rng = random.Random(2)
    t = random_trace_power(rng, 2, 2, 2)
    alpha = [Fraction(1), Fraction(-2)]
    # THEN beta = 1 recovers the affine value
    assert homogenized_trace_query(t, alpha, 1) == eval_trace_power(t, alpha)
    # AND beta = 2 scales by beta^d
    halved = [v / 2 for v in alpha]
    assert homogenized_trace_query(t, alpha, 2) == 4 * eval_trace_power(t, halved)


@pytest.mark.acceptance
def test_homogenized_query_matches_explicit_homogenization():
    # GIVEN 50 random trace powers and points, 10 of them with beta = 0
    rng = random.Random(3)
    for i in range(50):
        nvars = rng.randint(1, 3)
        t = random_trace_power(rng, nvars, rng.randint(1, 2), rng.randint(1, 3))
        alpha = [random_scalar(rng) for _ in range(nvars)]
        beta = Fraction(0) if i % 5 == 0 else random_scalar(rng)
        # THEN query-only values equal the homogenized trace evaluated directly
        assert homogenized_trace_query(t, alpha, beta) == eval_trace_power(
            homogenize(t), alpha + [beta]
        )


def test_size_is_n_w_d():
    t = TracePower(3, 4, AffineMatrix.identity(2))
    assert t.size == 3 * 2 * 4

import random
from fractions import Fraction

import pytest

from conjugacy_pit.algebra import Matrix, SparsePoly
from conjugacy_pit.branching import (
    ABP,
    AffineForm,
    AffineMatrix,
    abp_add,
    abp_negate,
    abp_pad_depth,
    abp_sub,
    eval_abp,
    expand_abp,
    from_square_matrices,
    pad_to_square,
)
from conjugacy_pit.errors import DimensionError, ShapeError
from conjugacy_pit.generators import random_abp, random_affine_matrix

X0, X1 = AffineForm.var(0), AffineForm.var(1)


def single(form: AffineForm) -> AffineMatrix:
    return AffineMatrix(1, 1, (form,))


def product_abp() -> ABP:
    return ABP(2, (single(X0), single(X1)))


def random_point(rng: random.Random, nvars: int):
    return [Fraction(rng.randint(-9, 9), rng.randint(1, 3)) for _ in range(nvars)]


def test_eval_abp_examples():
    # GIVEN a single edge x0 + 1 and a path x0 * x1
    # THEN evaluation multiplies the evaluated layers
    assert eval_abp(ABP(1, (single(X0 + AffineForm.const(1)),)), [2]) == 3
    assert eval_abp(product_abp(), [3, 4]) == 12


def test_eval_abp_arity_mismatch():
    with pytest.raises(DimensionError):
        eval_abp(product_abp(), [1])


def test_eval_matches_expansion():
    # GIVEN random width-3 depth-3 programs
    rng = random.Random(0)
    for _ in range(10):
        p = random_abp(rng, 3, 3, 3)
        f = expand_abp(p)
        # THEN evaluating the program equals evaluating its expansion
        for _ in range(5):
            point = random_point(rng, 3)
            assert eval_abp(p, point) == f.evaluate(point)


def test_zero_layers_expand_to_zero():
    zero = AffineMatrix(1, 1, (AffineForm(),))
    assert expand_abp(ABP(2, (zero, zero))).is_zero()


def test_layers_must_chain():
    # GIVEN a first layer with two rows
    # WHEN the program is built
    # THEN it is rejected
    with pytest.raises(ShapeError):
        ABP(1, (AffineMatrix.identity(2),))
    with pytest.raises(DimensionError):
        ABP(1, (single(X1),))


def test_pad_to_square_keeps_the_corner_entry():
    # GIVEN a program with vertex layers 1, 2, 1
    rng = random.Random(1)
    p = ABP(2, (random_affine_matrix(rng, 1, 2, 2), random_affine_matrix(rng, 2, 1, 2)))
    squares = pad_to_square(p)
    assert all(m.rows == m.cols == 2 for m in squares)
    for _ in range(5):
        point = random_point(rng, 2)
        product = squares[0].evaluate(point) @ squares[1].evaluate(point)
        # THEN the product holds f at (0, 0) and zeros elsewhere
        assert product[0, 0] == eval_abp(p, point)
        assert product.entries[1:] == (0, 0, 0)


def test_square_matrices_round_trip():
    # GIVEN random square affine matrices
    rng = random.Random(2)
    for depth in (1, 2, 3):
        matrices = [random_affine_matrix(rng, 2, 2, 2) for _ in range(depth)]
        p = from_square_matrices(matrices, 2)
        for _ in range(5):
            point = random_point(rng, 2)
            product = Matrix.identity(2)
            for m in matrices:
                product = product @ m.evaluate(point)
            # THEN the rebuilt program computes entry (0, 0) of the product
            assert eval_abp(p, point) == product[0, 0]


def test_sum_and_difference():
    # GIVEN random programs of equal depth
    rng = random.Random(3)
    for _ in range(10):
        p, q = random_abp(rng, 2, 2, 3), random_abp(rng, 2, 3, 3)
        # THEN the combinators follow the expansions
        assert expand_abp(abp_add(p, q)) == expand_abp(p) + expand_abp(q)
        assert expand_abp(abp_negate(p)) == -expand_abp(p)
        assert expand_abp(abp_sub(p, p)).is_zero()
        # AND widths add up
        assert abp_add(p, q).width <= p.width + q.width


def test_adding_zero_program():
    rng = random.Random(4)
    p = random_abp(rng, 2, 2, 2)
    zero = ABP(2, (AffineMatrix(1, 1, (AffineForm(),)), AffineMatrix(1, 1, (AffineForm(),))))
    assert expand_abp(abp_add(p, zero)) == expand_abp(p)


def test_depth_mismatch_needs_padding():
    # GIVEN programs of depth 1 and 2
    short = ABP(2, (single(X0),))
    long = product_abp()
    # WHEN they are added directly
    # THEN a shape error is raised
    with pytest.raises(ShapeError):
        abp_add(short, long)
    # AND padding the shorter one with identity layers fixes it
    total = abp_add(abp_pad_depth(short, 2), long)
    x0, x1 = SparsePoly.variable(2, 0), SparsePoly.variable(2, 1)
    assert expand_abp(total) == x0 + x0 * x1


def test_size_is_n_w_d():
    rng = random.Random(5)
    p = random_abp(rng, 3, 2, 4)
    assert p.size == 3 * 2 * 4

"""Seeded random instances for the self-check suites and the tests.

Every generator draws from the ``random.Random`` it is given, so an instance is fixed by
the seed of that generator.
"""

import random
from fractions import Fraction
from typing import Tuple

from conjugacy_pit.algebra import Matrix, Monomial, SparsePoly, det_division_free
from conjugacy_pit.branching import ABP, ROABP, AffineForm, AffineMatrix, TracePower, roabp_sub
from conjugacy_pit.diagonal import DiagonalCircuit, DiagonalTerm
from conjugacy_pit.errors import ParameterError
from conjugacy_pit.invariants import MatrixTuple, conjugate


def random_scalar(rng: random.Random, low: int = -5, high: int = 5) -> Fraction:
    """Integer scalar drawn uniformly from ``[low, high]``."""
    return Fraction(rng.randint(low, high))


def random_matrix(
    rng: random.Random, rows: int, cols: int, low: int = -5, high: int = 5
) -> Matrix:
    """Dense matrix with integer entries in ``[low, high]``."""
    return Matrix(rows, cols, tuple(random_scalar(rng, low, high) for _ in range(rows * cols)))


def random_invertible(rng: random.Random, n: int, low: int = -3, high: int = 3) -> Matrix:
    """Random matrix, redrawn until its determinant is nonzero."""
    while True:
        m = random_matrix(rng, n, n, low, high)
        if det_division_free(m):
            return m


def random_tuple(rng: random.Random, n: int, r: int, low: int = -5, high: int = 5) -> MatrixTuple:
    """``r`` random ``n x n`` matrices."""
    return MatrixTuple(tuple(random_matrix(rng, n, n, low, high) for _ in range(r)))


def conjugate_pair(rng: random.Random, n: int, r: int) -> Tuple[MatrixTuple, MatrixTuple, Matrix]:
    """A random tuple, its conjugate by a random invertible ``P``, and ``P``."""
    a = random_tuple(rng, n, r)
    p = random_invertible(rng, n)
    return a, conjugate(a, p), p


def unipotent_pair() -> Tuple[MatrixTuple, MatrixTuple]:
    """``([[1, 1], [0, 1]])`` and ``(I_2)``: closures meet, orbits differ."""
    return (
        MatrixTuple.from_rows([[[1, 1], [0, 1]]]),
        MatrixTuple((Matrix.identity(2),)),
    )


def closure_equal_pair(rng: random.Random, n: int, r: int) -> Tuple[MatrixTuple, MatrixTuple]:
    """Upper-triangular tuples and their diagonal parts.

    Traces of words in upper-triangular matrices only see the diagonals, so the two
    tuples agree on every invariant. The strictly upper parts are nonzero.
    """
    uppers, diagonals = [], []
    for _ in range(r):
        rows = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = random_scalar(rng)
            for j in range(i + 1, n):
                rows[i][j] = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))
        uppers.append(Matrix.from_rows(rows))
        diagonals.append(
            Matrix.from_rows(
                [[rows[i][j] if i == j else 0 for j in range(n)] for i in range(n)]
            )
        )
    return MatrixTuple(tuple(uppers)), MatrixTuple(tuple(diagonals))


def random_affine_form(
    rng: random.Random, nvars: int, low: int = -3, high: int = 3, density: float = 0.6
) -> AffineForm:
    """Affine form whose coefficients are each nonzero with probability ``density``."""
    linear = tuple(
        (v, random_scalar(rng, low, high)) for v in range(nvars) if rng.random() < density
    )
    return AffineForm(random_scalar(rng, low, high), linear)


def random_affine_matrix(rng: random.Random, rows: int, cols: int, nvars: int) -> AffineMatrix:
    """Matrix of random affine forms."""
    return AffineMatrix(
        rows, cols, tuple(random_affine_form(rng, nvars) for _ in range(rows * cols))
    )


def random_abp(rng: random.Random, nvars: int, width: int, depth: int) -> ABP:
    """Random ABP with every inner vertex layer of size ``width``."""
    sizes = [1] + [width] * (depth - 1) + [1]
    layers = tuple(
        random_affine_matrix(rng, sizes[i], sizes[i + 1], nvars) for i in range(depth)
    )
    return ABP(nvars, layers)


def random_roabp(
    rng: random.Random, width: int, depth: int, degree_bound: int, low: int = -5, high: int = 5
) -> ROABP:
    """Random ROABP over ``x_0 .. x_{depth-1}`` with a shuffled variable order."""
    sizes = [1] + [width] * (depth - 1) + [1]
    layers = tuple(
        tuple(random_matrix(rng, sizes[i], sizes[i + 1], low, high) for _ in range(degree_bound))
        for i in range(depth)
    )
    order = list(range(depth))
    rng.shuffle(order)
    return ROABP(depth, degree_bound, layers, tuple(order))


def random_zero_roabp(rng: random.Random, width: int, depth: int, degree_bound: int) -> ROABP:
    """``p - p`` for a random ``p``: nonzero layers computing the zero polynomial."""
    p = random_roabp(rng, width, depth, degree_bound)
    return roabp_sub(p, p)


def random_trace_power(rng: random.Random, nvars: int, width: int, exponent: int) -> TracePower:
    """Random ``Tr(A(x)^d)``."""
    return TracePower(nvars, exponent, random_affine_matrix(rng, width, width, nvars))


def random_poly(
    rng: random.Random, nvars: int, max_degree: int, terms: int, low: int = -5, high: int = 5
) -> SparsePoly:
    """Polynomial with up to ``terms`` monomials of total degree at most ``max_degree``."""
    result = {}
    for _ in range(terms):
        exponents = [0] * nvars
        for _ in range(rng.randint(0, max_degree)):
            exponents[rng.randrange(nvars)] += 1
        result[Monomial.from_vector(exponents)] = random_scalar(rng, low, high)
    return SparsePoly(nvars, result)


def random_diagonal_term(rng: random.Random, nvars: int, max_degree: int) -> DiagonalTerm:
    """Product of one to three powered forms with total degree at most ``max_degree``."""
    count = rng.randint(1, 3)
    budget = rng.randint(1, max_degree)
    exponents = [0] * count
    for _ in range(budget):
        exponents[rng.randrange(count)] += 1
    return DiagonalTerm(
        tuple(random_affine_form(rng, nvars) for _ in range(count)), tuple(exponents)
    )


def random_diagonal(
    rng: random.Random, nvars: int, max_degree: int, terms: int
) -> DiagonalCircuit:
    """Random diagonal circuit with ``terms`` terms."""
    return DiagonalCircuit(
        nvars, tuple(random_diagonal_term(rng, nvars, max_degree) for _ in range(terms))
    )


def negated_term(term: DiagonalTerm) -> DiagonalTerm:
    """A term computing ``-term``: the first form with an odd exponent changes sign."""
    odd = next((j for j, e in enumerate(term.exponents) if e % 2), None)
    if odd is None:
        raise ParameterError(f"exponents {term.exponents} are all even")
    forms = list(term.forms)
    forms[odd] = -forms[odd]
    return DiagonalTerm(tuple(forms), term.exponents)


def zero_diagonal(rng: random.Random, nvars: int, max_degree: int, pairs: int) -> DiagonalCircuit:
    """Identically zero circuit made of ``pairs`` cancelling term pairs."""
    terms = []
    for _ in range(pairs):
        term = random_diagonal_term(rng, nvars, max_degree)
        if not any(e % 2 for e in term.exponents):
            term = DiagonalTerm(term.forms, (term.exponents[0] + 1,) + term.exponents[1:])
        terms.extend([term, negated_term(term)])
    return DiagonalCircuit(nvars, tuple(terms))

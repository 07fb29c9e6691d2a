"""Depth-3 diagonal circuits and their small-support hitting set."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import comb, prod
from typing import Iterator, Sequence, Tuple

from rich.console import Console
from rich.logging import RichHandler

from conjugacy_pit.algebra import ScalarLike, SparsePoly, to_scalar
from conjugacy_pit.branching import AffineForm
from conjugacy_pit.constants import GRID_POINT_CAP
from conjugacy_pit.errors import DimensionError, ParameterError, SizeError
from conjugacy_pit.pit import (
    CertificateKind,
    HittingSet,
    PitVerdict,
    PointWitness,
    Provenance,
)

logging.basicConfig(level=logging.WARN, handlers=[RichHandler(console=Console(stderr=True))])
log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiagonalTerm:
    """``L_1^{e_1} * ... * L_k^{e_k}`` for affine forms ``L_j``."""

    forms: Tuple[AffineForm, ...]
    exponents: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "forms", tuple(self.forms))
        object.__setattr__(self, "exponents", tuple(self.exponents))
        if len(self.forms) != len(self.exponents):
            raise DimensionError(
                f"{len(self.forms)} forms but {len(self.exponents)} exponents in a term"
            )
        if any(e < 0 for e in self.exponents):
            raise ParameterError(f"negative exponent in {self.exponents}")

    @property
    def degree(self) -> int:
        """``|e|_1``, the total degree of the term."""
        return sum(self.exponents)

    @property
    def product_size(self) -> int:
        """``|e|_x = prod(e_j + 1)``."""
        return prod(e + 1 for e in self.exponents)

    def evaluate(self, point: Sequence[Fraction]) -> Fraction:
        """Exact value at ``point``."""
        return prod(
            (form.evaluate(point) ** e for form, e in zip(self.forms, self.exponents)),
            start=Fraction(1),
        )

    def expand(self, nvars: int) -> SparsePoly:
        """Symbolic product of the powered forms."""
        total = SparsePoly.constant(nvars, 1)
        for form, e in zip(self.forms, self.exponents):
            if e:
                total = total * form.to_poly(nvars) ** e
        return total


@dataclass(frozen=True)
class DiagonalCircuit:
    """Sum of diagonal terms over ``nvars`` variables."""

    nvars: int
    terms: Tuple[DiagonalTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for i, term in enumerate(self.terms):
            for form in term.forms:
                if form.max_variable >= self.nvars:
                    raise DimensionError(
                        f"term {i} reads x{form.max_variable} but the circuit has "
                        f"{self.nvars} variables"
                    )

    @property
    def degree(self) -> int:
        """Largest term degree."""
        return max((t.degree for t in self.terms), default=0)

    @property
    def size(self) -> int:
        """``n * sum(|e|_x)``."""
        return self.nvars * sum(t.product_size for t in self.terms)


def eval_diagonal(c: DiagonalCircuit, point: Sequence[ScalarLike]) -> Fraction:
    """Exact value of the circuit at ``point``.

    >>> x0, x1 = AffineForm.var(0), AffineForm.var(1)
    >>> square = DiagonalCircuit(2, (DiagonalTerm((x0 + x1,), (2,)),))
    >>> eval_diagonal(square, [1, 1])
    Fraction(4, 1)
    """
    if len(point) != c.nvars:
        raise DimensionError(f"point has {len(point)} coordinates, circuit has {c.nvars}")
    values = [to_scalar(v) for v in point]
    return sum((t.evaluate(values) for t in c.terms), Fraction(0))


def expand_diagonal(c: DiagonalCircuit) -> SparsePoly:
    """The polynomial computed by the circuit."""
    total = SparsePoly.zero(c.nvars)
    for term in c.terms:
        total = total + term.expand(c.nvars)
    return total


def derivative_dim_bound(c: DiagonalCircuit) -> int:
    """Upper bound ``sum(|e|_x)`` on the dimension of the Hasse-derivative space."""
    return sum(t.product_size for t in c.terms)


def diagonal_hitting_set_size(n: int, d: int, m: int) -> int:
    """Number of points of ``{0..d}^n`` with at most ``m`` nonzero coordinates."""
    return sum(comb(n, k) * d**k for k in range(min(m, n) + 1))


def _check_sparse_parameters(n: int, d: int, m: int):
    if n < 1 or d < 1 or m < 0:
        raise ParameterError(f"need n, d >= 1 and m >= 0, got n={n}, d={d}, m={m}")


def iter_sparse_points(n: int, d: int, m: int) -> Iterator[Tuple[Fraction, ...]]:
    """Points of ``{0..d}^n`` with support at most ``m``.

    Ordered by support size, then by support positions, then by the nonzero values.
    """
    _check_sparse_parameters(n, d, m)
    values = [Fraction(v) for v in range(1, d + 1)]
    for k in range(min(m, n) + 1):
        for support in combinations(range(n), k):
            for chosen in product(values, repeat=k):
                point = [Fraction(0)] * n
                for position, value in zip(support, chosen):
                    point[position] = value
                yield tuple(point)


def hitting_set_diagonal(n: int, d: int, m: int) -> HittingSet:
    """The small-support hitting set over ``S = {0..d}``.

    >>> [tuple(map(int, p)) for p in hitting_set_diagonal(2, 1, 1).points]
    [(0, 0), (1, 0), (0, 1)]
    """
    size = diagonal_hitting_set_size(n, d, m) if n >= 1 and d >= 1 else 0
    if size > GRID_POINT_CAP:
        raise SizeError(f"{size} points exceed the cap of {GRID_POINT_CAP}")
    return HittingSet(
        tuple(iter_sparse_points(n, d, m)), Provenance.sparse_grid, {"n": n, "d": d, "m": m}
    )


def support_bound(c: DiagonalCircuit) -> int:
    """``ceil(log2(bound))`` for the derivative bound, 0 when the bound is at most 1."""
    bound = derivative_dim_bound(c)
    return (bound - 1).bit_length() if bound > 1 else 0


def blackbox_zero_test_diagonal(c: DiagonalCircuit) -> PitVerdict:
    """Zero test that only evaluates the circuit on the small-support hitting set.

    The support size ``m`` comes from the derivative bound and the value range ``d`` from
    the largest term degree. Points are generated lazily and the test stops at the first
    nonzero value.
    """
    m = support_bound(c)
    d = max(c.degree, 1)
    size = diagonal_hitting_set_size(c.nvars, d, m)
    log.info(f"Diagonal test over {size} points (d={d}, m={m})")
    points = iter_sparse_points(c.nvars, d, m) if c.nvars else iter([()])
    for point in points:
        if value := eval_diagonal(c, point):
            return PitVerdict(
                False, CertificateKind.blackbox_deterministic, PointWitness(point, value)
            )
    return PitVerdict(True, CertificateKind.blackbox_deterministic)

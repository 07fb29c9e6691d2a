"""Hasse-derivative calculus on sparse polynomials and monomial orderings."""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import product
from math import comb, factorial, prod
from typing import Dict, Iterator, Sequence, Tuple

from rich.console import Console
from rich.logging import RichHandler

from conjugacy_pit.algebra import Monomial, ScalarLike, SparsePoly, rank, to_scalar
from conjugacy_pit.errors import DimensionError, EmptyInputError, ParameterError

logging.basicConfig(level=logging.WARN, handlers=[RichHandler(console=Console(stderr=True))])
log = logging.getLogger(__name__)


def _check_direction(f: SparsePoly, u: Sequence[ScalarLike], k: int):
    if len(u) != f.nvars:
        raise DimensionError(f"direction has {len(u)} coordinates, f has {f.nvars} variables")
    if k < 0:
        raise ParameterError(f"derivative order must be non-negative, got {k}")


def taylor_shift(f: SparsePoly, directions: Sequence[Sequence[ScalarLike]]) -> SparsePoly:
    """Expand ``f(x + u_1 y_1 + ... + u_m y_m)``.

    The result lives in ``f.nvars + m`` variables; ``y_j`` is variable ``f.nvars + j``.
    """
    n, m = f.nvars, len(directions)
    for u in directions:
        if len(u) != n:
            raise DimensionError(f"direction has {len(u)} coordinates, f has {n} variables")
    substitutions = []
    for i in range(n):
        shifted = SparsePoly.variable(n + m, i)
        for j, u in enumerate(directions):
            shifted = shifted + SparsePoly.variable(n + m, n + j).scale(to_scalar(u[i]))
        substitutions.append(shifted)
    if n == 0:
        return f.with_nvars(m)
    return f.compose(substitutions)


def hasse_directional(f: SparsePoly, u: Sequence[ScalarLike], k: int) -> SparsePoly:
    """The ``k``-th Hasse derivative of ``f`` in direction ``u``.

    This is the coefficient of ``y^k`` in ``f(x + u y)``.

    >>> x = SparsePoly.variable(1, 0)
    >>> print(hasse_directional(x ** 5, [1], 2))
    10*x0^3
    """
    _check_direction(f, u, k)
    return taylor_shift(f, [u]).extract(f.nvars, k).with_nvars(f.nvars)


def hasse_iterated(
    f: SparsePoly, steps: Sequence[Tuple[Sequence[ScalarLike], int]]
) -> SparsePoly:
    """Apply directional derivatives ``(u_1, k_1), (u_2, k_2), ...`` one after another."""
    for u, k in steps:
        f = hasse_directional(f, u, k)
    return f


def _hasse_single_variable(f: SparsePoly, var: int, k: int) -> SparsePoly:
    terms: Dict[Monomial, Fraction] = {}
    for monomial, coefficient in f.terms.items():
        exponents = monomial.as_dict()
        current = exponents.get(var, 0)
        if current < k:
            continue
        exponents[var] = current - k
        terms[Monomial.from_dict(exponents)] = coefficient * comb(current, k)
    return SparsePoly(f.nvars, terms)


def hasse_variable(f: SparsePoly, i: Sequence[int]) -> SparsePoly:
    """The iterated per-variable derivative ``d_{x_1^{i_1}} ... d_{x_n^{i_n}} f``.

    >>> x0, x1 = SparsePoly.variable(2, 0), SparsePoly.variable(2, 1)
    >>> print(hasse_variable(x0 ** 3 * x1, (1, 1)))
    3*x0^2
    """
    if len(i) != f.nvars:
        raise DimensionError(f"exponent vector has {len(i)} entries, f has {f.nvars} variables")
    for var, k in enumerate(i):
        if k < 0:
            raise ParameterError(f"derivative order must be non-negative, got {k}")
        if k:
            f = _hasse_single_variable(f, var, k)
    return f


def derivative_space_dimension(f: SparsePoly) -> int:
    """Dimension of the span of all per-variable Hasse derivatives of ``f``."""
    if f.is_zero():
        return 0
    derivatives = [
        hasse_variable(f, i) for i in product(*(range(b + 1) for b in f.max_exponents()))
    ]
    support = sorted(
        {m for d in derivatives for m in d.terms}, key=lambda m: m.to_vector(f.nvars)
    )
    rows = [[d.coeff(m) for m in support] for d in derivatives]
    return rank(rows)


def product_rule_expansion(
    f: SparsePoly, g: SparsePoly, u: Sequence[ScalarLike], k: int
) -> SparsePoly:
    """Right-hand side of the product rule: sum over ``i + j = k`` of ``D_u^i(f) D_u^j(g)``."""
    _check_direction(f, u, k)
    total = SparsePoly.zero(f.nvars)
    for i in range(k + 1):
        total = total + hasse_directional(f, u, i) * hasse_directional(g, u, k - i)
    return total


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """All tuples of ``parts`` non-negative integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _weighted_totals(k: int) -> Iterator[Tuple[int, ...]]:
    """Tuples ``(t_1, ..., t_k)`` with ``sum(j * t_j) == k``."""

    def extend(j: int, remaining: int) -> Iterator[Tuple[int, ...]]:
        if j > k:
            if remaining == 0:
                yield ()
            return
        for t in range(remaining // j + 1):
            for rest in extend(j + 1, remaining - j * t):
                yield (t,) + rest

    yield from extend(1, k)


def _multinomial(parts: Sequence[int]) -> int:
    return factorial(sum(parts)) // prod(factorial(p) for p in parts)


def chain_rule_expansion(
    f: SparsePoly, gs: Sequence[SparsePoly], u: Sequence[ScalarLike], k: int
) -> SparsePoly:
    """Right-hand side of the Hasse chain rule for ``D_u^k (f o g)``.

    Sums over vectors ``l_1, ..., l_k`` of length ``n = f.nvars`` with
    ``sum(j * |l_j|) == k`` the product of ``D_u^j(g)^{l_j}``, the per-coordinate
    multinomial of ``(l_1, ..., l_k)``, and ``D_{x^{l_1 + ... + l_k}}(f)`` evaluated at ``g``.
    """
    if len(gs) != f.nvars:
        raise DimensionError(f"{len(gs)} inner polynomials given for {f.nvars} variables")
    if not gs:
        return SparsePoly.zero(len(u)) if k else f.with_nvars(len(u))
    inner = gs[0].nvars
    if k < 0:
        raise ParameterError(f"derivative order must be non-negative, got {k}")
    if len(u) != inner:
        raise DimensionError(f"direction has {len(u)} coordinates, g has {inner} variables")
    n = f.nvars
    inner_derivatives = [[hasse_directional(g, u, j) for g in gs] for j in range(k + 1)]
    total = SparsePoly.zero(inner)
    for totals in _weighted_totals(k):
        for vectors in product(*(list(_compositions(t, n)) for t in totals)):
            term = SparsePoly.constant(inner, 1)
            for j, vector in enumerate(vectors, start=1):
                for i, exponent in enumerate(vector):
                    if exponent:
                        term = term * inner_derivatives[j][i] ** exponent
            summed = [sum(vector[i] for vector in vectors) for i in range(n)]
            weight = prod(_multinomial([vector[i] for vector in vectors]) for i in range(n))
            outer = hasse_variable(f, summed).compose(list(gs))
            total = total + (term * outer).scale(weight)
    return total


class OrderingKind(str, Enum):
    """Supported monomial orderings."""

    grlex = "grlex"
    lex = "lex"


@dataclass(frozen=True)
class MonomialOrdering:
    """A monomial ordering with variable precedence ``x_0 > x_1 > ... > x_{n-1}``.

    ``grlex`` compares total degree first and breaks ties lexicographically;
    ``lex`` is the pure lexicographic order.
    """

    kind: OrderingKind = OrderingKind.grlex

    def key(self, monomial: Monomial, nvars: int) -> Tuple:
        """Sort key: larger keys are larger monomials."""
        vector = monomial.to_vector(nvars)
        match self.kind:
            case OrderingKind.grlex:
                return (monomial.degree, vector)
            case OrderingKind.lex:
                return vector
            case _:
                raise NotImplementedError

    def less(self, a: Monomial, b: Monomial) -> bool:
        """Whether ``a`` precedes ``b``."""
        nvars = max(a.max_variable, b.max_variable) + 1
        return self.key(a, nvars) < self.key(b, nvars)


def leading_monomial(f: SparsePoly, ordering: MonomialOrdering = MonomialOrdering()) -> Monomial:
    """The largest monomial of ``f`` with a nonzero coefficient."""
    if f.is_zero():
        raise EmptyInputError("the zero polynomial has no leading monomial")
    return max(f.terms, key=lambda m: ordering.key(m, f.nvars))


@dataclass
class SmallMonomialReport:
    """Leading-monomial statistics against the derivative dimension."""

    leading: Monomial
    support_size: int
    product_size: int
    dimension: int

    @property
    def support_bound_holds(self) -> bool:
        """``2^{|i|_0} <= |d(f)|``, compared on integers."""
        return 2**self.support_size <= self.dimension

    @property
    def product_bound_holds(self) -> bool:
        """``2^{|i|_x} <= |d(f)|``; reported only."""
        return 2**self.product_size <= self.dimension


def small_monomial_report(
    f: SparsePoly, ordering: MonomialOrdering = MonomialOrdering()
) -> SmallMonomialReport:
    """Compare the leading monomial of a nonzero ``f`` with its derivative dimension."""
    leading = leading_monomial(f, ordering)
    report = SmallMonomialReport(
        leading=leading,
        support_size=leading.support_size,
        product_size=leading.product_size,
        dimension=derivative_space_dimension(f),
    )
    log.info(
        f"Leading monomial {leading}: |i|_0={report.support_size}, |i|_x={report.product_size}, "
        f"|d(f)|={report.dimension}, product bound holds: {report.product_bound_holds}"
    )
    return report

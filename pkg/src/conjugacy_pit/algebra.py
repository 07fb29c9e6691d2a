"""Exact rational scalars, matrices, sparse polynomials and the linear-algebra kernels.

Every value in this module is immutable after construction and every operation is pure.
Scalars are :class:`fractions.Fraction` instances, which are always kept in lowest terms
with a positive denominator, so equality tests are canonical everywhere.
"""

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from conjugacy_pit.errors import (
    DimensionError,
    InterpolationError,
    ParameterError,
    SchemaError,
)

Scalar = Fraction
ScalarLike = Union[Fraction, int, str]
Vector = Tuple[Fraction, ...]

_RATIONAL = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_scalar(text: str) -> Fraction:
    """Parse the ``"p/q"`` (or ``"p"``) rational notation used by every JSON format.

    >>> parse_scalar("6/4")
    Fraction(3, 2)
    >>> parse_scalar("-7")
    Fraction(-7, 1)
    """
    if not (match := _RATIONAL.match(text)):
        raise SchemaError(f'"{text}" is not a rational of the form "p/q"')
    numerator, denominator = match.group(1), match.group(2)
    if denominator is not None and int(denominator) == 0:
        raise SchemaError(f'"{text}" has a zero denominator')
    return Fraction(int(numerator), int(denominator or 1))


def format_scalar(value: Fraction) -> str:
    """Serialize a scalar as ``"p/q"``, omitting ``q`` when it is 1.

    >>> format_scalar(Fraction(6, 4))
    '3/2'
    >>> format_scalar(Fraction(-3))
    '-3'
    """
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def to_scalar(value: ScalarLike) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Scalar."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_scalar(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def scalar_bit_length(value: Fraction) -> int:
    """Bits needed to write the numerator and (non-trivial) denominator of a scalar."""
    bits = abs(value.numerator).bit_length()
    if value.denominator != 1:
        bits += value.denominator.bit_length()
    return bits


# ==========================
# Monomials and polynomials
# ==========================


@dataclass(frozen=True)
class Monomial:
    """A monomial as sorted ``(variable, exponent)`` pairs; zero exponents are never stored.

    Variables are 0-based.
    """

    exponents: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        previous = -1
        for var, exp in self.exponents:
            if var <= previous:
                raise ParameterError(f"monomial variables must be increasing: {self.exponents}")
            if exp <= 0:
                raise ParameterError(f"monomial exponents must be positive: {self.exponents}")
            previous = var

    @staticmethod
    def from_dict(exponents: Mapping[int, int]) -> "Monomial":
        """Build a monomial from a variable-to-exponent map, dropping zero exponents."""
        if any(exp < 0 for exp in exponents.values()):
            raise ParameterError(f"negative exponent in {dict(exponents)}")
        return Monomial(tuple(sorted((v, e) for v, e in exponents.items() if e)))

    @staticmethod
    def from_vector(vector: Sequence[int]) -> "Monomial":
        """Build a monomial from a dense exponent vector."""
        return Monomial.from_dict(dict(enumerate(vector)))

    def as_dict(self) -> Dict[int, int]:
        """Variable-to-exponent map."""
        return dict(self.exponents)

    def exponent(self, var: int) -> int:
        """Exponent of ``var`` (0 when absent)."""
        for v, e in self.exponents:
            if v == var:
                return e
        return 0

    def to_vector(self, nvars: int) -> Tuple[int, ...]:
        """Dense exponent vector of length ``nvars``."""
        vector = [0] * nvars
        for var, exp in self.exponents:
            if var >= nvars:
                raise DimensionError(f"variable x{var} does not fit in {nvars} variables")
            vector[var] = exp
        return tuple(vector)

    @property
    def degree(self) -> int:
        """Total degree."""
        return sum(e for _, e in self.exponents)

    @property
    def support_size(self) -> int:
        """Number of variables with a nonzero exponent, written ``|e|_0``."""
        return len(self.exponents)

    @property
    def product_size(self) -> int:
        """The product of ``e_l + 1`` over all variables, written ``|e|_x``."""
        size = 1
        for _, exp in self.exponents:
            size *= exp + 1
        return size

    @property
    def variables(self) -> Tuple[int, ...]:
        """Support of the monomial."""
        return tuple(v for v, _ in self.exponents)

    @property
    def max_variable(self) -> int:
        """Largest variable index in the support, -1 for the unit monomial."""
        return self.exponents[-1][0] if self.exponents else -1

    def __mul__(self, other: "Monomial") -> "Monomial":
        merged = self.as_dict()
        for var, exp in other.exponents:
            merged[var] = merged.get(var, 0) + exp
        return Monomial.from_dict(merged)

    def __str__(self) -> str:
        if not self.exponents:
            return "1"
        return "*".join(f"x{v}" if e == 1 else f"x{v}^{e}" for v, e in self.exponents)


ONE = Monomial()


@dataclass(frozen=True)
class SparsePoly:
    """A multivariate polynomial over the rationals stored as ``Monomial -> coefficient``.

    Explicit zero coefficients are dropped on construction, so the zero polynomial is the
    empty map and two polynomials are equal iff their term maps are equal.
    """

    nvars: int
    terms: Mapping[Monomial, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean: Dict[Monomial, Fraction] = {}
        for monomial, coefficient in self.terms.items():
            coefficient = to_scalar(coefficient)
            if not coefficient:
                continue
            if monomial.max_variable >= self.nvars:
                raise DimensionError(
                    f"monomial {monomial} does not fit in {self.nvars} variables"
                )
            clean[monomial] = coefficient
        object.__setattr__(self, "terms", clean)

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    @staticmethod
    def zero(nvars: int) -> "SparsePoly":
        """The zero polynomial."""
        return SparsePoly(nvars)

    @staticmethod
    def constant(nvars: int, value: ScalarLike) -> "SparsePoly":
        """A constant polynomial."""
        return SparsePoly(nvars, {ONE: to_scalar(value)})

    @staticmethod
    def variable(nvars: int, var: int) -> "SparsePoly":
        """The polynomial ``x_var``."""
        if not 0 <= var < nvars:
            raise DimensionError(f"variable x{var} does not fit in {nvars} variables")
        return SparsePoly(nvars, {Monomial(((var, 1),)): Fraction(1)})

    @staticmethod
    def from_terms(
        nvars: int, terms: Iterable[Tuple[Union[Monomial, Sequence[int]], ScalarLike]]
    ) -> "SparsePoly":
        """Sum up ``(monomial or exponent vector, coefficient)`` pairs."""
        accumulated: Dict[Monomial, Fraction] = {}
        for monomial, coefficient in terms:
            if not isinstance(monomial, Monomial):
                monomial = Monomial.from_vector(monomial)
            accumulated[monomial] = accumulated.get(monomial, Fraction(0)) + to_scalar(
                coefficient
            )
        return SparsePoly(nvars, accumulated)

    def _lift(self, other: Union["SparsePoly", ScalarLike]) -> "SparsePoly":
        if isinstance(other, SparsePoly):
            if other.nvars != self.nvars:
                raise DimensionError(
                    f"polynomials in {self.nvars} and {other.nvars} variables cannot be combined"
                )
            return other
        return SparsePoly.constant(self.nvars, other)

    def is_zero(self) -> bool:
        """Whether this is the zero polynomial."""
        return not self.terms

    def __add__(self, other: Union["SparsePoly", ScalarLike]) -> "SparsePoly":
        other = self._lift(other)
        summed = dict(self.terms)
        for monomial, coefficient in other.terms.items():
            summed[monomial] = summed.get(monomial, Fraction(0)) + coefficient
        return SparsePoly(self.nvars, summed)

    __radd__ = __add__

    def __neg__(self) -> "SparsePoly":
        return SparsePoly(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Union["SparsePoly", ScalarLike]) -> "SparsePoly":
        return self + (-self._lift(other))

    def __rsub__(self, other: ScalarLike) -> "SparsePoly":
        return self._lift(other) - self

    def __mul__(self, other: Union["SparsePoly", ScalarLike]) -> "SparsePoly":
        if not isinstance(other, SparsePoly):
            return self.scale(to_scalar(other))
        other = self._lift(other)
        product: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                monomial = m1 * m2
                product[monomial] = product.get(monomial, Fraction(0)) + c1 * c2
        return SparsePoly(self.nvars, product)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "SparsePoly":
        if exponent < 0:
            raise ParameterError("polynomials only have non-negative powers")
        result = SparsePoly.constant(self.nvars, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def scale(self, factor: ScalarLike) -> "SparsePoly":
        """Multiply every coefficient by ``factor``."""
        factor = to_scalar(factor)
        return SparsePoly(self.nvars, {m: c * factor for m, c in self.terms.items()})

    def coeff(self, monomial: Monomial) -> Fraction:
        """Coefficient of ``monomial`` (0 if absent)."""
        return self.terms.get(monomial, Fraction(0))

    def total_degree(self) -> int:
        """Largest total degree of a term (0 for the zero polynomial)."""
        return max((m.degree for m in self.terms), default=0)

    def max_exponents(self) -> Tuple[int, ...]:
        """Per-variable largest exponent appearing in some term."""
        bounds = [0] * self.nvars
        for monomial in self.terms:
            for var, exp in monomial.exponents:
                bounds[var] = max(bounds[var], exp)
        return tuple(bounds)

    def evaluate(self, point: Sequence[ScalarLike]) -> Fraction:
        """Exact value at ``point``."""
        if len(point) != self.nvars:
            raise DimensionError(
                f"point has {len(point)} coordinates, polynomial has {self.nvars} variables"
            )
        values = [to_scalar(p) for p in point]
        total = Fraction(0)
        for monomial, coefficient in self.terms.items():
            term = coefficient
            for var, exp in monomial.exponents:
                term *= values[var] ** exp
            total += term
        return total

    def compose(self, substitutions: Sequence["SparsePoly"]) -> "SparsePoly":
        """Substitute ``substitutions[i]`` for ``x_i``; all substitutions share one arity."""
        if len(substitutions) != self.nvars:
            raise DimensionError(
                f"{len(substitutions)} substitutions given for {self.nvars} variables"
            )
        if not substitutions:
            return self
        target = substitutions[0].nvars
        powers: Dict[Tuple[int, int], SparsePoly] = {}

        def power(var: int, exp: int) -> SparsePoly:
            if (var, exp) not in powers:
                powers[(var, exp)] = substitutions[var] ** exp
            return powers[(var, exp)]

        result = SparsePoly.zero(target)
        for monomial, coefficient in self.terms.items():
            term = SparsePoly.constant(target, coefficient)
            for var, exp in monomial.exponents:
                term = term * power(var, exp)
            result = result + term
        return result

    def extract(self, var: int, exponent: int) -> "SparsePoly":
        """Coefficient of ``x_var^exponent`` as a polynomial in the remaining variables."""
        extracted: Dict[Monomial, Fraction] = {}
        for monomial, coefficient in self.terms.items():
            if monomial.exponent(var) == exponent:
                rest = monomial.as_dict()
                rest.pop(var, None)
                extracted[Monomial.from_dict(rest)] = coefficient
        return SparsePoly(self.nvars, extracted)

    def with_nvars(self, nvars: int) -> "SparsePoly":
        """The same polynomial viewed in ``nvars`` variables."""
        return SparsePoly(nvars, self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for monomial, coefficient in sorted(
            self.terms.items(), key=lambda t: (-t[0].degree, t[0].exponents)
        ):
            if monomial == ONE:
                parts.append(format_scalar(coefficient))
            elif coefficient == 1:
                parts.append(str(monomial))
            else:
                parts.append(f"{format_scalar(coefficient)}*{monomial}")
        return " + ".join(parts).replace("+ -", "- ")


def poly_eval(f: SparsePoly, point: Sequence[ScalarLike]) -> Fraction:
    """Exact value of ``f`` at ``point``."""
    return f.evaluate(point)


def poly_coeff(f: SparsePoly, m: Monomial) -> Fraction:
    """The coefficient of ``m`` in ``f``, 0 when absent."""
    return f.coeff(m)


# ==========================
# Matrices
# ==========================


@dataclass(frozen=True)
class Matrix:
    """A dense ``rows x cols`` matrix of scalars stored row-major."""

    rows: int
    cols: int
    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        entries = tuple(to_scalar(e) for e in self.entries)
        if len(entries) != self.rows * self.cols:
            raise DimensionError(
                f"{len(entries)} entries cannot fill a {self.rows}x{self.cols} matrix"
            )
        object.__setattr__(self, "entries", entries)

    @staticmethod
    def from_rows(rows: Sequence[Sequence[ScalarLike]]) -> "Matrix":
        """Build a matrix from a list of equally long rows."""
        widths = {len(row) for row in rows}
        if len(widths) > 1:
            raise DimensionError(f"ragged rows of lengths {sorted(widths)}")
        cols = widths.pop() if widths else 0
        return Matrix(len(rows), cols, tuple(e for row in rows for e in row))

    @staticmethod
    def identity(n: int) -> "Matrix":
        """The ``n x n`` identity."""
        return Matrix(n, n, tuple(Fraction(int(i == j)) for i in range(n) for j in range(n)))

    @staticmethod
    def zeros(rows: int, cols: int) -> "Matrix":
        """The all-zero matrix."""
        return Matrix(rows, cols, (Fraction(0),) * (rows * cols))

    def __getitem__(self, index: Tuple[int, int]) -> Fraction:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        """Row ``i``."""
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        """Column ``j``."""
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> List[List[Fraction]]:
        """Nested-list copy of the entries."""
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def is_square(self) -> bool:
        """Whether rows equal cols."""
        return self.rows == self.cols

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        columns = [other.column(j) for j in range(other.cols)]
        return Matrix(
            self.rows,
            other.cols,
            tuple(
                sum((a * b for a, b in zip(self.row(i), col)), Fraction(0))
                for i in range(self.rows)
                for col in columns
            ),
        )

    def _same_shape(self, other: "Matrix"):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError(
                f"shape {self.rows}x{self.cols} does not match {other.rows}x{other.cols}"
            )

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        summed = tuple(a + b for a, b in zip(self.entries, other.entries))
        return Matrix(self.rows, self.cols, summed)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        difference = tuple(a - b for a, b in zip(self.entries, other.entries))
        return Matrix(self.rows, self.cols, difference)

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def scale(self, factor: ScalarLike) -> "Matrix":
        """Multiply every entry by ``factor``."""
        factor = to_scalar(factor)
        return Matrix(self.rows, self.cols, tuple(e * factor for e in self.entries))

    def transpose(self) -> "Matrix":
        """The transposed matrix."""
        return Matrix(
            self.cols,
            self.rows,
            tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)),
        )

    def trace(self) -> Fraction:
        """Sum of the diagonal."""
        if not self.is_square:
            raise DimensionError(f"trace of a non-square {self.rows}x{self.cols} matrix")
        return sum((self[i, i] for i in range(self.rows)), Fraction(0))

    def power(self, exponent: int) -> "Matrix":
        """Integer power by repeated squaring."""
        if not self.is_square:
            raise DimensionError("only square matrices have powers")
        if exponent < 0:
            raise ParameterError("matrix powers must be non-negative")
        result, base = Matrix.identity(self.rows), self
        while exponent:
            if exponent & 1:
                result = result @ base
            base = base @ base
            exponent >>= 1
        return result

    def apply(self, vector: Sequence[Fraction]) -> Vector:
        """Matrix-vector product."""
        if len(vector) != self.cols:
            raise DimensionError(f"vector of length {len(vector)} for {self.cols} columns")
        return tuple(
            sum((a * b for a, b in zip(self.row(i), vector)), Fraction(0))
            for i in range(self.rows)
        )

    def is_zero(self) -> bool:
        """Whether every entry is 0."""
        return not any(self.entries)


# ==========================
# Exact linear algebra
# ==========================


def _primitive(values: Sequence[Fraction]) -> List[int]:
    """Clear denominators and divide out the content, keeping direction and sign."""
    denominator = lcm(*(v.denominator for v in values)) if values else 1
    integers = [int(v * denominator) for v in values]
    content = gcd(*integers) if integers else 0
    if content > 1:
        integers = [i // content for i in integers]
    return integers


def _reduce_rows(
    rows: Sequence[Sequence[Fraction]], ncols: int
) -> Tuple[List[List[int]], List[int]]:
    """Fraction-free Gauss-Jordan elimination.

    Rows are scaled to primitive integer vectors and combined only by cross-multiplication.
    The pivot of each column is the earliest remaining row with a nonzero entry there.

    Returns:
        the reduced nonzero rows (one per pivot, in pivot order) and their pivot columns
    """
    work = [_primitive(row) for row in rows]
    pivots: List[int] = []
    top = 0
    for col in range(ncols):
        found = next((i for i in range(top, len(work)) if work[i][col]), None)
        if found is None:
            continue
        work.insert(top, work.pop(found))
        pivot_row = work[top]
        for i, row in enumerate(work):
            if i != top and row[col]:
                a, b = row[col], pivot_row[col]
                combined = [b * x - a * y for x, y in zip(row, pivot_row)]
                work[i] = _primitive([Fraction(v) for v in combined])
        pivots.append(col)
        top += 1
    return work[:top], pivots


def rank(rows: Union[Matrix, Sequence[Sequence[Fraction]]]) -> int:
    """Exact rank of a matrix (or of a list of equally long vectors)."""
    if isinstance(rows, Matrix):
        return len(_reduce_rows(rows.to_rows(), rows.cols)[1])
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    return len(_reduce_rows(rows, len(rows[0]))[1])


def nullspace_basis(coefficient_matrix: Matrix) -> List[Vector]:
    """Basis of the right nullspace ``{v : M v = 0}``.

    One basis vector per non-pivot column ``c`` of the reduced echelon form, with a 1 in
    coordinate ``c``. The basis is empty iff the nullspace is trivial, and is the same for
    the same input every time.

    >>> nullspace_basis(Matrix.identity(3))
    []
    >>> nullspace_basis(Matrix.from_rows([[1, 1]]))
    [(Fraction(-1, 1), Fraction(1, 1))]
    """
    reduced, pivots = _reduce_rows(coefficient_matrix.to_rows(), coefficient_matrix.cols)
    free = [c for c in range(coefficient_matrix.cols) if c not in set(pivots)]
    basis: List[Vector] = []
    for column in free:
        vector = [Fraction(0)] * coefficient_matrix.cols
        vector[column] = Fraction(1)
        for row, pivot in zip(reduced, pivots):
            vector[pivot] = Fraction(-row[column], row[pivot])
        basis.append(tuple(vector))
    return basis


def charpoly(m: Matrix) -> Vector:
    """Coefficients of ``det(t I - m)``, leading coefficient first (Berkowitz vector).

    Only ring operations are used: trailing principal submatrices are processed from the
    bottom-right corner, each step multiplying by a lower-triangular Toeplitz matrix.
    """
    if not m.is_square:
        raise DimensionError(f"characteristic polynomial of a {m.rows}x{m.cols} matrix")
    n = m.rows
    vector: List[Fraction] = [Fraction(1)]
    for k in range(n - 1, -1, -1):
        size = n - k
        rest = range(k + 1, n)
        row = [m[k, j] for j in rest]
        column = [m[i, k] for i in rest]
        diagonals = [Fraction(1), -m[k, k]]
        for _ in range(size - 1):
            diagonals.append(-sum((a * b for a, b in zip(row, column)), Fraction(0)))
            column = [sum((m[i, j] * column[j - k - 1] for j in rest), Fraction(0)) for i in rest]
        vector = [
            sum((diagonals[i - j] * vector[j] for j in range(min(i + 1, size))), Fraction(0))
            for i in range(size + 1)
        ]
    return tuple(vector)


def det_division_free(m: Matrix) -> Fraction:
    """Exact determinant from the constant term of the Berkowitz characteristic polynomial.

    >>> det_division_free(Matrix.from_rows([[0, 1], [1, 0]]))
    Fraction(-1, 1)
    """
    if not m.is_square:
        raise DimensionError(f"determinant of a non-square {m.rows}x{m.cols} matrix")
    constant = charpoly(m)[-1]
    return constant if m.rows % 2 == 0 else -constant


def _minor(m: Matrix, row: int, col: int) -> Matrix:
    return Matrix.from_rows(
        [[m[i, j] for j in range(m.cols) if j != col] for i in range(m.rows) if i != row]
    )


def matrix_inverse(m: Matrix) -> Matrix:
    """Exact inverse through the adjugate and the division-free determinant."""
    determinant = det_division_free(m)
    if not determinant:
        raise ParameterError("matrix is singular and has no inverse")
    n = m.rows
    if n == 1:
        return Matrix(1, 1, (1 / determinant,))
    adjugate = [
        [(-1) ** (i + j) * det_division_free(_minor(m, j, i)) for j in range(n)] for i in range(n)
    ]
    return Matrix.from_rows(adjugate).scale(1 / determinant)


def _times_linear(coefficients: List[Fraction], root: Fraction) -> List[Fraction]:
    """Multiply an ascending coefficient list by ``(y - root)``."""
    shifted = [Fraction(0)] + coefficients
    return [s - root * c for s, c in zip(shifted, coefficients + [Fraction(0)])]


def interpolate_coefficient(evals: Sequence[Tuple[ScalarLike, ScalarLike]], j: int) -> Fraction:
    """Coefficient of ``y^j`` in the unique interpolant of degree < len(evals).

    >>> interpolate_coefficient([(0, 1), (1, 6), (2, 15)], 1)
    Fraction(3, 1)
    """
    if j < 0:
        raise ParameterError(f"coefficient index must be non-negative, got {j}")
    points = [to_scalar(p) for p, _ in evals]
    values = [to_scalar(v) for _, v in evals]
    if len(set(points)) != len(points):
        raise InterpolationError(f"interpolation nodes are not distinct: {points}")
    if j >= len(points):
        return Fraction(0)
    total = Fraction(0)
    for k, (node, value) in enumerate(zip(points, values)):
        basis = [Fraction(1)]
        denominator = Fraction(1)
        for other_index, other in enumerate(points):
            if other_index == k:
                continue
            basis = _times_linear(basis, other)
            denominator *= node - other
        total += value * basis[j] / denominator
    return total

"""Layered circuit representations (ABP, ROABP, trace of a matrix power) and their conversions.

Every program is kept in source/sink normal form: a list of layer matrices whose first
matrix has a single row and whose last matrix has a single column, so the computed
polynomial is the 1x1 product of all layers.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, TypeVar, Union

from rich.console import Console
from rich.logging import RichHandler

from conjugacy_pit.algebra import (
    Matrix,
    Monomial,
    ScalarLike,
    SparsePoly,
    interpolate_coefficient,
    to_scalar,
)
from conjugacy_pit.errors import DimensionError, ParameterError, ShapeError

logging.basicConfig(level=logging.WARN, handlers=[RichHandler(console=Console(stderr=True))])
log = logging.getLogger(__name__)

T = TypeVar("T")
PolyMatrix = List[List[SparsePoly]]


@dataclass(frozen=True)
class AffineForm:
    """``constant + sum(linear[v] * x_v)``; zero linear coefficients are never stored."""

    constant: Fraction = Fraction(0)
    linear: Tuple[Tuple[int, Fraction], ...] = ()

    def __post_init__(self):
        merged: Dict[int, Fraction] = {}
        for var, coefficient in self.linear:
            if var < 0:
                raise DimensionError(f"negative variable index {var}")
            merged[var] = merged.get(var, Fraction(0)) + to_scalar(coefficient)
        object.__setattr__(self, "constant", to_scalar(self.constant))
        object.__setattr__(self, "linear", tuple(sorted((v, c) for v, c in merged.items() if c)))

    @staticmethod
    def from_dict(constant: ScalarLike, linear: Mapping[int, ScalarLike]) -> "AffineForm":
        """Build a form from a constant and a variable-to-coefficient map."""
        return AffineForm(to_scalar(constant), tuple(linear.items()))

    @staticmethod
    def const(value: ScalarLike) -> "AffineForm":
        """A constant form."""
        return AffineForm(to_scalar(value))

    @staticmethod
    def var(var: int, coefficient: ScalarLike = 1) -> "AffineForm":
        """The form ``coefficient * x_var``."""
        return AffineForm(Fraction(0), ((var, to_scalar(coefficient)),))

    @property
    def max_variable(self) -> int:
        """Largest variable with a nonzero coefficient, -1 if none."""
        return self.linear[-1][0] if self.linear else -1

    def is_zero(self) -> bool:
        """Whether the form is identically 0."""
        return not self.constant and not self.linear

    def evaluate(self, point: Sequence[Fraction]) -> Fraction:
        """Exact value at ``point``."""
        return self.constant + sum((c * point[v] for v, c in self.linear), Fraction(0))

    def to_poly(self, nvars: int) -> SparsePoly:
        """The form as a degree-1 polynomial in ``nvars`` variables."""
        terms = {Monomial(((v, 1),)): c for v, c in self.linear}
        terms[Monomial()] = self.constant
        return SparsePoly(nvars, terms)

    def scale(self, factor: ScalarLike) -> "AffineForm":
        """Multiply the form by a scalar."""
        factor = to_scalar(factor)
        return AffineForm(self.constant * factor, tuple((v, c * factor) for v, c in self.linear))

    def __add__(self, other: "AffineForm") -> "AffineForm":
        return AffineForm(self.constant + other.constant, self.linear + other.linear)

    def __neg__(self) -> "AffineForm":
        return self.scale(-1)

    def homogenize(self, z: int) -> "AffineForm":
        """Replace the constant ``c`` by ``c * x_z``."""
        return AffineForm(Fraction(0), self.linear + ((z, self.constant),))


ZERO_FORM = AffineForm()


@dataclass(frozen=True)
class AffineMatrix:
    """A ``rows x cols`` matrix of affine forms stored row-major."""

    rows: int
    cols: int
    entries: Tuple[AffineForm, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError(
                f"{len(self.entries)} forms cannot fill a {self.rows}x{self.cols} matrix"
            )

    @staticmethod
    def from_rows(rows: Sequence[Sequence[AffineForm]]) -> "AffineMatrix":
        """Build from equally long rows of forms."""
        widths = {len(row) for row in rows}
        if len(widths) > 1:
            raise DimensionError(f"ragged rows of lengths {sorted(widths)}")
        cols = widths.pop() if widths else 0
        return AffineMatrix(len(rows), cols, tuple(e for r in rows for e in r))

    @staticmethod
    def from_matrix(m: Matrix) -> "AffineMatrix":
        """A constant affine matrix."""
        return AffineMatrix(m.rows, m.cols, tuple(AffineForm.const(e) for e in m.entries))

    @staticmethod
    def identity(n: int) -> "AffineMatrix":
        """The constant identity."""
        return AffineMatrix.from_matrix(Matrix.identity(n))

    def __getitem__(self, index: Tuple[int, int]) -> AffineForm:
        i, j = index
        return self.entries[i * self.cols + j]

    def to_rows(self) -> List[List[AffineForm]]:
        """Nested-list copy of the forms."""
        return [list(self.entries[i * self.cols : (i + 1) * self.cols]) for i in range(self.rows)]

    @property
    def max_variable(self) -> int:
        """Largest variable read by any entry."""
        return max((e.max_variable for e in self.entries), default=-1)

    def evaluate(self, point: Sequence[Fraction]) -> Matrix:
        """Evaluate every entry."""
        return Matrix(self.rows, self.cols, tuple(e.evaluate(point) for e in self.entries))

    def expand(self, nvars: int) -> PolyMatrix:
        """The matrix of entry polynomials."""
        return [[form.to_poly(nvars) for form in row] for row in self.to_rows()]

    def scale(self, factor: ScalarLike) -> "AffineMatrix":
        """Multiply every entry by a scalar."""
        return AffineMatrix(self.rows, self.cols, tuple(e.scale(factor) for e in self.entries))

    def map(self, fn: Callable[[AffineForm], AffineForm]) -> "AffineMatrix":
        """Apply ``fn`` to every entry."""
        return AffineMatrix(self.rows, self.cols, tuple(fn(e) for e in self.entries))


def _poly_matmul(a: PolyMatrix, b: PolyMatrix, nvars: int) -> PolyMatrix:
    inner = len(b)
    cols = len(b[0]) if b else 0
    product = []
    for row in a:
        out = []
        for j in range(cols):
            total = SparsePoly.zero(nvars)
            for k in range(inner):
                if not row[k].is_zero() and not b[k][j].is_zero():
                    total = total + row[k] * b[k][j]
            out.append(total)
        product.append(out)
    return product


def _embed(rows: List[List[T]], size: int, zero: T) -> List[List[T]]:
    """Place ``rows`` in the top-left corner of a ``size x size`` grid."""
    grid = [[zero] * size for _ in range(size)]
    for i, row in enumerate(rows):
        for j, value in enumerate(row):
            grid[i][j] = value
    return grid


def _side_by_side(a: List[List[T]], b: List[List[T]]) -> List[List[T]]:
    return [ra + rb for ra, rb in zip(a, b)]


def _stacked(a: List[List[T]], b: List[List[T]]) -> List[List[T]]:
    return [list(r) for r in a] + [list(r) for r in b]


def _block_diagonal(a: List[List[T]], b: List[List[T]], zero: T) -> List[List[T]]:
    a_cols = len(a[0]) if a else 0
    b_cols = len(b[0]) if b else 0
    return [list(r) + [zero] * b_cols for r in a] + [[zero] * a_cols + list(r) for r in b]


# ==========================
# ABP
# ==========================


@dataclass(frozen=True)
class ABP:
    """Algebraic branching program with affine edge weights over ``nvars`` variables."""

    nvars: int
    layers: Tuple[AffineMatrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise ShapeError("a branching program needs at least one layer")
        if self.layers[0].rows != 1 or self.layers[-1].cols != 1:
            raise ShapeError("the first layer must have one row and the last one column")
        for i, (left, right) in enumerate(zip(self.layers, self.layers[1:])):
            if left.cols != right.rows:
                raise ShapeError(
                    f"layer {i} has {left.cols} columns but layer {i + 1} has {right.rows} rows"
                )
        for i, layer in enumerate(self.layers):
            if layer.max_variable >= self.nvars:
                raise DimensionError(
                    f"layer {i} reads x{layer.max_variable} but the program has "
                    f"{self.nvars} variables"
                )

    @property
    def depth(self) -> int:
        """Number of layers."""
        return len(self.layers)

    @property
    def widths(self) -> Tuple[int, ...]:
        """Sizes of the vertex layers, source and sink included."""
        return (1,) + tuple(layer.cols for layer in self.layers)

    @property
    def width(self) -> int:
        """Largest vertex layer."""
        return max(self.widths)

    @property
    def size(self) -> int:
        """``n * w * d``."""
        return self.nvars * self.width * self.depth


def _check_point(nvars: int, point: Sequence[ScalarLike]) -> List[Fraction]:
    if len(point) != nvars:
        raise DimensionError(f"point has {len(point)} coordinates, program has {nvars} variables")
    return [to_scalar(p) for p in point]


def eval_abp(p: ABP, point: Sequence[ScalarLike]) -> Fraction:
    """Exact value of the program at ``point``.

    >>> layer = AffineMatrix(1, 1, (AffineForm(Fraction(1), ((0, Fraction(1)),)),))
    >>> eval_abp(ABP(1, (layer,)), [2])
    Fraction(3, 1)
    """
    values = _check_point(p.nvars, point)
    product = p.layers[0].evaluate(values)
    for layer in p.layers[1:]:
        product = product @ layer.evaluate(values)
    return product[0, 0]


def expand_abp(p: ABP) -> SparsePoly:
    """The polynomial computed by the program."""
    product = p.layers[0].expand(p.nvars)
    for layer in p.layers[1:]:
        product = _poly_matmul(product, layer.expand(p.nvars), p.nvars)
    return product[0][0]


def from_square_matrices(matrices: Sequence[AffineMatrix], nvars: int) -> ABP:
    """Rebuild a source/sink program computing entry (0, 0) of the product of square matrices."""
    if not matrices:
        raise ShapeError("at least one matrix is required")
    if len(matrices) == 1:
        return ABP(nvars, (AffineMatrix(1, 1, (matrices[0][0, 0],)),))
    first, last = matrices[0], matrices[-1]
    head = AffineMatrix(1, first.cols, tuple(first[0, j] for j in range(first.cols)))
    tail = AffineMatrix(last.rows, 1, tuple(last[i, 0] for i in range(last.rows)))
    return ABP(nvars, (head,) + tuple(matrices[1:-1]) + (tail,))


def abp_add(p: ABP, q: ABP) -> ABP:
    """Program for ``p + q`` obtained by merging sources and sinks."""
    if p.nvars != q.nvars:
        raise ShapeError(f"programs over {p.nvars} and {q.nvars} variables")
    if p.depth != q.depth:
        raise ShapeError(f"depth {p.depth} does not match depth {q.depth}; pad the shorter one")
    if p.depth == 1:
        return ABP(p.nvars, (AffineMatrix(1, 1, (p.layers[0][0, 0] + q.layers[0][0, 0],)),))
    layers = [AffineMatrix.from_rows(_side_by_side(p.layers[0].to_rows(), q.layers[0].to_rows()))]
    for left, right in zip(p.layers[1:-1], q.layers[1:-1]):
        layers.append(
            AffineMatrix.from_rows(_block_diagonal(left.to_rows(), right.to_rows(), ZERO_FORM))
        )
    layers.append(AffineMatrix.from_rows(_stacked(p.layers[-1].to_rows(), q.layers[-1].to_rows())))
    return ABP(p.nvars, tuple(layers))


def abp_negate(p: ABP) -> ABP:
    """Flip the sign of every edge leaving the source."""
    return ABP(p.nvars, (p.layers[0].scale(-1),) + p.layers[1:])


def abp_sub(p: ABP, q: ABP) -> ABP:
    """Program for ``p - q``."""
    return abp_add(p, abp_negate(q))


def abp_pad_depth(p: ABP, depth: int) -> ABP:
    """Append constant 1x1 identity layers until the program has ``depth`` layers."""
    if depth < p.depth:
        raise ParameterError(f"cannot pad a depth-{p.depth} program down to depth {depth}")
    return ABP(p.nvars, p.layers + (AffineMatrix.identity(1),) * (depth - p.depth))


# ==========================
# ROABP
# ==========================


@dataclass(frozen=True)
class ROABP:
    """Read-once oblivious program: layer ``i`` reads only ``x_{order[i]}``, with degree < r.

    ``layers[i][j]`` is the coefficient matrix of ``x_{order[i]}^j`` in the ``i``-th
    layer matrix, so every layer holds exactly ``degree_bound`` matrices of one shape.
    """

    nvars: int
    degree_bound: int
    layers: Tuple[Tuple[Matrix, ...], ...]
    order: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        layers = tuple(tuple(layer) for layer in self.layers)
        object.__setattr__(self, "layers", layers)
        if self.degree_bound < 1:
            raise ParameterError(f"degree bound must be positive, got {self.degree_bound}")
        if not layers:
            raise ShapeError("a branching program needs at least one layer")
        if not self.order:
            object.__setattr__(self, "order", tuple(range(len(layers))))
        if len(self.order) != len(layers) or len(set(self.order)) != len(self.order):
            raise ShapeError(
                f"variable order {self.order} must name {len(layers)} distinct variables"
            )
        if max(self.order) >= self.nvars or min(self.order) < 0:
            raise DimensionError(
                f"variable order {self.order} does not fit in {self.nvars} variables"
            )
        for i, layer in enumerate(layers):
            if len(layer) != self.degree_bound:
                raise ShapeError(
                    f"layer {i} holds {len(layer)} coefficient matrices, "
                    f"expected {self.degree_bound}"
                )
            if len({(m.rows, m.cols) for m in layer}) != 1:
                raise ShapeError(f"coefficient matrices of layer {i} differ in shape")
        shapes = [(layer[0].rows, layer[0].cols) for layer in layers]
        if shapes[0][0] != 1 or shapes[-1][1] != 1:
            raise ShapeError("the first layer must have one row and the last one column")
        for i, (left, right) in enumerate(zip(shapes, shapes[1:])):
            if left[1] != right[0]:
                raise ShapeError(
                    f"layer {i} has {left[1]} columns but layer {i + 1} has {right[0]} rows"
                )

    @property
    def depth(self) -> int:
        """Number of layers."""
        return len(self.layers)

    @property
    def widths(self) -> Tuple[int, ...]:
        """Sizes of the vertex layers, source and sink included."""
        return (1,) + tuple(layer[0].cols for layer in self.layers)

    @property
    def width(self) -> int:
        """Largest vertex layer."""
        return max(self.widths)

    @property
    def size(self) -> int:
        """``n * w * d``."""
        return self.nvars * self.width * self.depth

    def shape(self, layer: int) -> Tuple[int, int]:
        """Rows and columns of a layer matrix."""
        return self.layers[layer][0].rows, self.layers[layer][0].cols

    def entry(self, layer: int, row: int, col: int) -> SparsePoly:
        """The univariate entry polynomial at ``(row, col)`` of a layer."""
        var = self.order[layer]
        return SparsePoly.from_terms(
            self.nvars,
            (
                (Monomial(((var, j),)) if j else Monomial(), m[row, col])
                for j, m in enumerate(self.layers[layer])
            ),
        )

    def layer_at(self, layer: int, value: Fraction) -> Matrix:
        """The layer matrix with its variable set to ``value``."""
        rows, cols = self.shape(layer)
        total = Matrix.zeros(rows, cols)
        power = Fraction(1)
        for coefficient in self.layers[layer]:
            total = total + coefficient.scale(power)
            power *= value
        return total


def eval_roabp(p: ROABP, point: Sequence[ScalarLike]) -> Fraction:
    """Exact value of the program at ``point``."""
    values = _check_point(p.nvars, point)
    product = p.layer_at(0, values[p.order[0]])
    for i in range(1, p.depth):
        product = product @ p.layer_at(i, values[p.order[i]])
    return product[0, 0]


def expand_roabp(p: ROABP) -> SparsePoly:
    """The polynomial computed by the program."""

    def layer_polys(i: int) -> PolyMatrix:
        rows, cols = p.shape(i)
        return [[p.entry(i, a, b) for b in range(cols)] for a in range(rows)]

    product = layer_polys(0)
    for i in range(1, p.depth):
        product = _poly_matmul(product, layer_polys(i), p.nvars)
    return product[0][0]


def _map_layers(p: ROABP, fn: Callable[[int, Matrix], Matrix]) -> Tuple[Tuple[Matrix, ...], ...]:
    return tuple(tuple(fn(i, m) for m in layer) for i, layer in enumerate(p.layers))


def _check_roabp_pair(p: ROABP, q: ROABP):
    if p.nvars != q.nvars:
        raise ShapeError(f"programs over {p.nvars} and {q.nvars} variables")
    if p.depth != q.depth:
        raise ShapeError(f"depth {p.depth} does not match depth {q.depth}; pad the shorter one")
    if p.degree_bound != q.degree_bound:
        raise ShapeError(f"degree bound {p.degree_bound} does not match {q.degree_bound}")
    if p.order != q.order:
        raise ShapeError(f"variable order {p.order} does not match {q.order}")


def roabp_add(p: ROABP, q: ROABP) -> ROABP:
    """Program for ``p + q``; the width is at most the sum of the widths."""
    _check_roabp_pair(p, q)
    zero = Fraction(0)
    if p.depth == 1:
        layers = ((tuple(a + b for a, b in zip(p.layers[0], q.layers[0]))),)
        return ROABP(p.nvars, p.degree_bound, layers, p.order)
    layers = []
    last = p.depth - 1
    for i, (left, right) in enumerate(zip(p.layers, q.layers)):
        merged = []
        for a, b in zip(left, right):
            if i == 0:
                rows = _side_by_side(a.to_rows(), b.to_rows())
            elif i == last:
                rows = _stacked(a.to_rows(), b.to_rows())
            else:
                rows = _block_diagonal(a.to_rows(), b.to_rows(), zero)
            merged.append(Matrix.from_rows(rows))
        layers.append(tuple(merged))
    return ROABP(p.nvars, p.degree_bound, tuple(layers), p.order)


def roabp_negate(p: ROABP) -> ROABP:
    """Flip the sign of the first layer."""
    return ROABP(
        p.nvars, p.degree_bound, _map_layers(p, lambda i, m: -m if i == 0 else m), p.order
    )


def roabp_sub(p: ROABP, q: ROABP) -> ROABP:
    """Program for ``p - q``."""
    return roabp_add(p, roabp_negate(q))


def roabp_pad_depth(p: ROABP, depth: int) -> ROABP:
    """Append constant 1x1 identity layers reading fresh dummy variables after ``x``."""
    if depth < p.depth:
        raise ParameterError(f"cannot pad a depth-{p.depth} program down to depth {depth}")
    extra = depth - p.depth
    identity = (Matrix.identity(1),) + (Matrix.zeros(1, 1),) * (p.degree_bound - 1)
    return ROABP(
        p.nvars + extra,
        p.degree_bound,
        p.layers + (identity,) * extra,
        p.order + tuple(range(p.nvars, p.nvars + extra)),
    )


def roabp_partial_evaluate(p: ROABP, layer: int, value: ScalarLike) -> ROABP:
    """Fix the variable read by ``layer`` to a scalar; the layer becomes constant."""
    fixed = p.layer_at(layer, to_scalar(value))
    constant = (fixed,) + (Matrix.zeros(fixed.rows, fixed.cols),) * (p.degree_bound - 1)
    layers = p.layers[:layer] + (constant,) + p.layers[layer + 1 :]
    return ROABP(p.nvars, p.degree_bound, layers, p.order)


def roabp_to_abp(p: ROABP) -> ABP:
    """ABP of depth ``d * r`` and width at most ``w * r`` computing the same polynomial.

    A layer ``sum(C_j x^j)`` becomes ``T_1 ... T_{r-1}`` followed by the stacked block
    column ``[C_0; ...; C_{r-1}]``; the product of the ``T_k`` is ``[I, xI, ..., x^{r-1} I]``.
    """
    layers: List[AffineMatrix] = []
    one = AffineForm.const(1)
    for i, coefficients in enumerate(p.layers):
        rows, _ = p.shape(i)
        for k in range(1, p.degree_bound):
            # [I, ..., x^{k-1} I] -> [I, ..., x^k I]
            grid = [[ZERO_FORM] * ((k + 1) * rows) for _ in range(k * rows)]
            for a in range(k * rows):
                grid[a][a] = one
            for a in range(rows):
                grid[(k - 1) * rows + a][k * rows + a] = AffineForm.var(p.order[i])
            layers.append(AffineMatrix.from_rows(grid))
        stacked = [row for m in coefficients for row in m.to_rows()]
        layers.append(AffineMatrix.from_rows([[AffineForm.const(v) for v in r] for r in stacked]))
    return ABP(p.nvars, tuple(layers))


def pad_to_square(p: Union[ABP, ROABP]) -> Union[List[AffineMatrix], List[Tuple[Matrix, ...]]]:
    """Embed every layer into a ``w x w`` matrix; the product keeps ``f`` at entry (0, 0) only.

    ABP layers stay affine matrices; ROABP layers stay tuples of coefficient matrices.
    """
    size = p.width
    match p:
        case ABP():
            return [
                AffineMatrix.from_rows(_embed(layer.to_rows(), size, ZERO_FORM))
                for layer in p.layers
            ]
        case ROABP():
            return [
                tuple(Matrix.from_rows(_embed(m.to_rows(), size, Fraction(0))) for m in layer)
                for layer in p.layers
            ]
        case _:
            raise NotImplementedError


# ==========================
# Trace of a matrix power
# ==========================


@dataclass(frozen=True)
class TracePower:
    """``Tr(A(x)^d)`` for a square matrix ``A`` of affine forms."""

    nvars: int
    exponent: int
    matrix: AffineMatrix

    def __post_init__(self):
        if self.matrix.rows != self.matrix.cols:
            raise ShapeError(f"{self.matrix.rows}x{self.matrix.cols} matrix is not square")
        if self.exponent < 1:
            raise ParameterError(f"exponent must be positive, got {self.exponent}")
        if self.matrix.max_variable >= self.nvars:
            raise DimensionError(
                f"matrix reads x{self.matrix.max_variable} but has {self.nvars} variables"
            )

    @property
    def width(self) -> int:
        """Size of ``A``."""
        return self.matrix.rows

    @property
    def size(self) -> int:
        """``n * w * d``."""
        return self.nvars * self.width * self.exponent


def eval_trace_power(t: TracePower, point: Sequence[ScalarLike]) -> Fraction:
    """``Tr(A(point)^d)``."""
    values = _check_point(t.nvars, point)
    return t.matrix.evaluate(values).power(t.exponent).trace()


def expand_trace_power(t: TracePower) -> SparsePoly:
    """Symbolic ``Tr(A(x)^d)``."""
    base = t.matrix.expand(t.nvars)
    product = base
    for _ in range(t.exponent - 1):
        product = _poly_matmul(product, base, t.nvars)
    total = SparsePoly.zero(t.nvars)
    for i in range(t.width):
        total = total + product[i][i]
    return total


def cyclic_block_embed(
    blocks: Sequence[Union[Matrix, AffineMatrix]],
) -> Union[Matrix, AffineMatrix]:
    """Place ``blocks[i]`` at block position ``(i, i + 1 mod d)`` of a ``nd x nd`` matrix.

    The result satisfies ``Tr(A^d) = d * Tr(M_1 ... M_d)``.
    """
    if not blocks:
        raise ShapeError("at least one block is required")
    shapes = {(b.rows, b.cols) for b in blocks}
    if len(shapes) != 1 or blocks[0].rows != blocks[0].cols:
        raise ShapeError(f"blocks must be square and equally sized, got {sorted(shapes)}")
    if len({type(b) for b in blocks}) != 1:
        raise ShapeError("blocks mix constant and affine matrices")
    n, d = blocks[0].rows, len(blocks)
    match blocks[0]:
        case AffineMatrix():
            zero, build = ZERO_FORM, AffineMatrix.from_rows
        case Matrix():
            zero, build = Fraction(0), Matrix.from_rows
        case _:
            raise NotImplementedError
    grid = [[zero] * (n * d) for _ in range(n * d)]
    for i, block in enumerate(blocks):
        j = (i + 1) % d
        for a, row in enumerate(block.to_rows()):
            for b, value in enumerate(row):
                grid[i * n + a][j * n + b] = value
    return build(grid)


def abp_to_trace_power(p: ABP, d_prime: Optional[int] = None) -> TracePower:
    """Trace of a matrix power of width ``w * d'`` and exponent ``d'`` computing ``p``."""
    d_prime = p.depth if d_prime is None else d_prime
    if d_prime < p.depth:
        raise ParameterError(f"d' = {d_prime} is smaller than the program depth {p.depth}")
    squares = pad_to_square(p)
    squares[0] = squares[0].scale(Fraction(1, d_prime))
    squares.extend([AffineMatrix.identity(p.width)] * (d_prime - p.depth))
    t = TracePower(p.nvars, d_prime, cyclic_block_embed(squares))
    log.info(f"Converted a width-{p.width} depth-{p.depth} ABP into a width-{t.width} trace power")
    return t


def trace_power_to_abp(t: TracePower) -> ABP:
    """ABP of width at most ``w^2`` and depth ``d`` computing ``Tr(A^d)``."""
    a, w, d = t.matrix, t.width, t.exponent
    total: Optional[ABP] = None
    for i in range(w):
        if d == 1:
            diagonal = ABP(t.nvars, (AffineMatrix(1, 1, (a[i, i],)),))
        else:
            head = AffineMatrix(1, w, tuple(a[i, j] for j in range(w)))
            tail = AffineMatrix(w, 1, tuple(a[j, i] for j in range(w)))
            diagonal = ABP(t.nvars, (head,) + (a,) * (d - 2) + (tail,))
        total = diagonal if total is None else abp_add(total, diagonal)
    assert total is not None
    return total


def homogenize(t: TracePower) -> TracePower:
    """Replace every constant ``c`` by ``c * z`` with ``z`` the new last variable."""
    z = t.nvars
    return TracePower(t.nvars + 1, t.exponent, t.matrix.map(lambda form: form.homogenize(z)))


def homogenized_trace_query(
    t: TracePower, alpha: Sequence[ScalarLike], beta: ScalarLike
) -> Fraction:
    """Value of the homogenized trace at ``(alpha, beta)`` using only evaluations of ``t``.

    For ``beta != 0`` this is ``beta^d * Tr(A(alpha / beta)^d)``. For ``beta == 0`` the
    coefficient of ``y^d`` in ``Tr(A(y * alpha)^d)`` is interpolated from ``d + 1`` queries.
    """
    values = _check_point(t.nvars, alpha)
    beta = to_scalar(beta)
    if beta:
        return beta**t.exponent * eval_trace_power(t, [v / beta for v in values])
    evals = [
        (Fraction(y), eval_trace_power(t, [y * v for v in values])) for y in range(t.exponent + 1)
    ]
    return interpolate_coefficient(evals, t.exponent)


def cyclic_variable_matrix(d: int) -> TracePower:
    """``Tr(A^d)`` for the cycle matrix with ``A[i][i + 1 mod d] = x_i``."""
    if d < 1:
        raise ParameterError(f"cycle length must be positive, got {d}")
    rows = [[ZERO_FORM] * d for _ in range(d)]
    for i in range(d):
        rows[i][(i + 1) % d] = AffineForm.var(i)
    return TracePower(d, d, AffineMatrix.from_rows(rows))

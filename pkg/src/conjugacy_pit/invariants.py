"""Invariants of matrix tuples under simultaneous conjugation and the two orbit decisions.

For a tuple ``A = (A_0, ..., A_{r-1})`` of ``n x n`` matrices, ``M(x) = sum(A_i x^i)`` and
``f_l(A, x) = Tr(M(x_1) ... M(x_l))``. Two tuples have intersecting orbit closures iff
``f_l(A, x) = f_l(B, x)`` as polynomials for every ``l <= n^2``.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from rich.console import Console
from rich.logging import RichHandler

from conjugacy_pit.algebra import (
    Matrix,
    ScalarLike,
    det_division_free,
    matrix_inverse,
    nullspace_basis,
    scalar_bit_length,
    to_scalar,
)
from conjugacy_pit.branching import (
    ABP,
    ROABP,
    AffineForm,
    AffineMatrix,
    abp_add,
    eval_abp,
    roabp_add,
    roabp_sub,
)
from conjugacy_pit.constants import DEFAULT_TRIALS, WORD_CAP
from conjugacy_pit.errors import DimensionError, ParameterError, SizeError
from conjugacy_pit.pit import (
    HittingSet,
    MonomialWitness,
    PitVerdict,
    roabp_nonzero_point,
    schwartz_zippel_zero_test,
    whitebox_roabp_zero_test,
)

logging.basicConfig(level=logging.WARN, handlers=[RichHandler(console=Console(stderr=True))])
log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatrixTuple:
    """``r >= 1`` square matrices of one size ``n``."""

    matrices: Tuple[Matrix, ...]

    def __post_init__(self):
        matrices = tuple(self.matrices)
        object.__setattr__(self, "matrices", matrices)
        if not matrices:
            raise DimensionError("a matrix tuple needs at least one matrix")
        n = matrices[0].rows
        for i, m in enumerate(matrices):
            if m.rows != n or m.cols != n:
                raise DimensionError(
                    f"matrix {i} is {m.rows}x{m.cols}, expected {n}x{n} like matrix 0"
                )

    @staticmethod
    def from_rows(matrices: Sequence[Sequence[Sequence[ScalarLike]]]) -> "MatrixTuple":
        """Build from nested lists of entries."""
        return MatrixTuple(tuple(Matrix.from_rows(m) for m in matrices))

    @property
    def n(self) -> int:
        """Matrix size."""
        return self.matrices[0].rows

    @property
    def r(self) -> int:
        """Tuple length."""
        return len(self.matrices)

    def __getitem__(self, i: int) -> Matrix:
        return self.matrices[i]

    def check_compatible(self, other: "MatrixTuple"):
        """Raise if ``other`` has a different ``(n, r)``."""
        if (self.n, self.r) != (other.n, other.r):
            raise DimensionError(
                f"expected (n, r) = ({self.n}, {self.r}), got ({other.n}, {other.r})"
            )

    def pencil(self, x: ScalarLike) -> Matrix:
        """``M(x) = sum(A_i x^i)``, with ``0^0 = 1``."""
        x = to_scalar(x)
        total = Matrix.zeros(self.n, self.n)
        power = Fraction(1)
        for m in self.matrices:
            total = total + m.scale(power)
            power *= x
        return total

    def entries(self) -> Tuple[Fraction, ...]:
        """All entries, indexed ``k * n^2 + i * n + j``."""
        return tuple(e for m in self.matrices for e in m.entries)


def tuple_bit_length(a: MatrixTuple) -> int:
    """Largest bit-length of an entry."""
    return max(scalar_bit_length(e) for e in a.entries())


def conjugate(a: MatrixTuple, p: Matrix) -> MatrixTuple:
    """``(P A_0 P^-1, ..., P A_{r-1} P^-1)``."""
    inverse = matrix_inverse(p)
    return MatrixTuple(tuple(p @ m @ inverse for m in a.matrices))


def is_conjugator(a: MatrixTuple, b: MatrixTuple, p: Matrix) -> bool:
    """Whether ``P`` is invertible and ``B_i P = P A_i`` for every ``i``."""
    a.check_compatible(b)
    if (p.rows, p.cols) != (a.n, a.n) or not det_division_free(p):
        return False
    return all(bm @ p == p @ am for am, bm in zip(a.matrices, b.matrices))


def evaluate_f_ell(a: MatrixTuple, alpha: Sequence[ScalarLike], ell: int) -> Fraction:
    """``Tr(M(alpha_1) ... M(alpha_l))``."""
    if len(alpha) < ell:
        raise ParameterError(f"{len(alpha)} coordinates given for word length {ell}")
    product = Matrix.identity(a.n)
    for t in range(ell):
        product = product @ a.pencil(alpha[t])
    return product.trace()


def build_f_ell_roabp(a: MatrixTuple, ell: int) -> ROABP:
    """ROABP of width ``n^2`` and depth ``l`` over ``x_1 ... x_l`` computing ``f_l(A, x)``.

    The trace is the sum of the ``n`` diagonal entries, each an ROABP that starts with row
    ``i`` and ends with column ``i`` of the pencil.
    """
    if ell < 1:
        raise ParameterError(f"word length must be positive, got {ell}")
    n = a.n
    total: Optional[ROABP] = None
    for i in range(n):
        if ell == 1:
            layers = ((tuple(Matrix(1, 1, (m[i, i],)) for m in a.matrices)),)
        else:
            head = tuple(Matrix(1, n, m.row(i)) for m in a.matrices)
            tail = tuple(Matrix(n, 1, m.column(i)) for m in a.matrices)
            layers = (head,) + (a.matrices,) * (ell - 2) + (tail,)
        diagonal = ROABP(ell, a.r, layers)
        total = diagonal if total is None else roabp_add(total, diagonal)
    assert total is not None
    return total


def diff_roabp(a: MatrixTuple, b: MatrixTuple, ell: int) -> ROABP:
    """ROABP of width ``2 n^2`` computing ``f_l(A, x) - f_l(B, x)``."""
    a.check_compatible(b)
    return roabp_sub(build_f_ell_roabp(a, ell), build_f_ell_roabp(b, ell))


def entry_variable(k: int, i: int, j: int, n: int) -> int:
    """Index of the variable for entry ``(i, j)`` of ``M_k``."""
    return k * n * n + i * n + j


def invariant_abp(alpha: Sequence[ScalarLike], ell: int, n: int, r: int) -> ABP:
    """ABP of width ``n^2`` and depth ``l`` computing ``f_l(M, alpha)`` on entry variables."""
    if ell < 1:
        raise ParameterError(f"word length must be positive, got {ell}")
    if len(alpha) < ell:
        raise ParameterError(f"{len(alpha)} coordinates given for word length {ell}")
    nvars = n * n * r

    def pencil(x: Fraction) -> AffineMatrix:
        powers = [x**k for k in range(r)]
        rows = [
            [
                AffineForm(
                    Fraction(0), tuple((entry_variable(k, i, j, n), powers[k]) for k in range(r))
                )
                for j in range(n)
            ]
            for i in range(n)
        ]
        return AffineMatrix.from_rows(rows)

    pencils = [pencil(to_scalar(alpha[t])) for t in range(ell)]
    total: Optional[ABP] = None
    for i in range(n):
        if ell == 1:
            layers = (AffineMatrix(1, 1, (pencils[0][i, i],)),)
        else:
            head = AffineMatrix(1, n, tuple(pencils[0][i, j] for j in range(n)))
            tail = AffineMatrix(n, 1, tuple(pencils[-1][j, i] for j in range(n)))
            layers = (head,) + tuple(pencils[1:-1]) + (tail,)
        diagonal = ABP(nvars, layers)
        total = diagonal if total is None else abp_add(total, diagonal)
    assert total is not None
    return total


def trace_word_oracle(a: MatrixTuple, b: MatrixTuple, max_ell: int) -> bool:
    """Whether ``Tr(A_w) = Tr(B_w)`` for every word ``w`` of length at most ``max_ell``."""
    a.check_compatible(b)
    words = sum(a.r**ell for ell in range(1, max_ell + 1))
    if words > WORD_CAP:
        raise SizeError(f"{words} words exceed the cap of {WORD_CAP}")

    def visit(prefix_a: Matrix, prefix_b: Matrix, length: int) -> bool:
        for am, bm in zip(a.matrices, b.matrices):
            word_a, word_b = prefix_a @ am, prefix_b @ bm
            if word_a.trace() != word_b.trace():
                return False
            if length + 1 < max_ell and not visit(word_a, word_b, length + 1):
                return False
        return True

    if max_ell < 1:
        return True
    return visit(Matrix.identity(a.n), Matrix.identity(a.n), 0)


class OrbitDecision(str, Enum):
    """Possible answers of the orbit decisions."""

    intersecting = "intersecting"
    disjoint = "disjoint"
    member = "member"
    non_member = "non-member"


class Method(str, Enum):
    """How an orbit verdict was reached."""

    whitebox = "whitebox"
    blackbox = "blackbox"
    randomized = "randomized"


@dataclass(frozen=True)
class SeparatingWitness:
    """A word length and point where ``f_l(A, .)`` and ``f_l(B, .)`` differ."""

    ell: int
    point: Tuple[Fraction, ...]
    value_a: Fraction
    value_b: Fraction


@dataclass(frozen=True)
class OrbitVerdict:
    """Outcome of an orbit decision.

    Args:
        decision: intersecting/disjoint for closures, member/non-member for orbits
        method: how the decision was reached
        witness: separating point for disjoint closures, conjugating matrix for members
        failure_bound: probability bound on a wrong randomized non-member verdict
        steps: total white-box elimination steps
    """

    decision: OrbitDecision
    method: Method
    witness: Optional[Union[SeparatingWitness, Matrix]] = None
    failure_bound: Fraction = Fraction(0)
    steps: int = 0


def _test_ell(a: MatrixTuple, b: MatrixTuple, ell: int) -> Tuple[int, ROABP, PitVerdict]:
    program = diff_roabp(a, b, ell)
    return ell, program, whitebox_roabp_zero_test(program)


def orbit_closure_intersects(
    a: MatrixTuple, b: MatrixTuple, max_ell: Optional[int] = None, workers: int = 1
) -> OrbitVerdict:
    """Decide whether the orbit closures of ``A`` and ``B`` intersect.

    Runs the white-box ROABP test on ``f_l(A, x) - f_l(B, x)`` for ``l = 1 .. n^2``; the
    tests are independent and run on ``workers`` threads. On a disjoint verdict the witness
    is taken for the smallest separating ``l``.
    """
    a.check_compatible(b)
    default = a.n * a.n
    if max_ell is None:
        max_ell = default
    elif max_ell != default:
        log.warning(f"Testing word lengths up to {max_ell} instead of n^2 = {default}")
    log.info(f"Input bit-lengths: A={tuple_bit_length(a)}, B={tuple_bit_length(b)}")
    ells = range(1, max_ell + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda ell: _test_ell(a, b, ell), ells))
    else:
        results = []
        for ell in ells:
            results.append(_test_ell(a, b, ell))
            if not results[-1][2].is_zero:
                break
    steps = sum(verdict.steps for _, _, verdict in results)
    for ell, program, verdict in results:
        if verdict.is_zero:
            continue
        assert isinstance(verdict.witness, MonomialWitness)
        point = roabp_nonzero_point(program, verdict.witness).point
        witness = SeparatingWitness(
            ell, point, evaluate_f_ell(a, point, ell), evaluate_f_ell(b, point, ell)
        )
        assert witness.value_a != witness.value_b, "separating point does not separate"
        log.info(f"Disjoint at l={ell}, witness bit-length {max(map(scalar_bit_length, point))}")
        return OrbitVerdict(OrbitDecision.disjoint, Method.whitebox, witness, steps=steps)
    return OrbitVerdict(OrbitDecision.intersecting, Method.whitebox, steps=steps)


@dataclass(frozen=True)
class InvariantDescriptor:
    """One member ``f_l(M, alpha)`` of a separating family with its ABP realization."""

    ell: int
    alpha: Tuple[Fraction, ...]
    realization: ABP

    def evaluate(self, a: MatrixTuple) -> Fraction:
        """Value of the invariant on a concrete tuple."""
        if len(a.entries()) != self.realization.nvars:
            raise DimensionError(
                f"invariant reads {self.realization.nvars} entries, tuple has {len(a.entries())}"
            )
        return eval_abp(self.realization, a.entries())


def separating_family(n: int, r: int, h: HittingSet) -> List[InvariantDescriptor]:
    """The ``n^2 |H|`` invariants ``f_l(M, alpha)`` for ``l <= n^2`` and ``alpha`` in ``H``."""
    size = n * n
    if h.points and h.nvars < size:
        log.warning(f"Hitting-set points have {h.nvars} coordinates; zero-padding to {size}")
    alphas = [tuple(p[:size]) + (Fraction(0),) * (size - len(p[:size])) for p in h.points]
    return [
        InvariantDescriptor(ell, alpha, invariant_abp(alpha, ell, n, r))
        for ell in range(1, size + 1)
        for alpha in alphas
    ]


def separates(
    a: MatrixTuple, b: MatrixTuple, family: Sequence[InvariantDescriptor]
) -> Optional[InvariantDescriptor]:
    """The first invariant of ``family`` taking different values on ``A`` and ``B``."""
    a.check_compatible(b)
    for descriptor in family:
        if descriptor.evaluate(a) != descriptor.evaluate(b):
            return descriptor
    return None


def orbit_closure_intersects_blackbox(
    a: MatrixTuple, b: MatrixTuple, h: HittingSet
) -> OrbitVerdict:
    """Closure decision comparing only the values of a separating family built from ``H``."""
    a.check_compatible(b)
    found = separates(a, b, separating_family(a.n, a.r, h))
    if found is None:
        return OrbitVerdict(OrbitDecision.intersecting, Method.blackbox)
    witness = SeparatingWitness(
        found.ell,
        found.alpha,
        evaluate_f_ell(a, found.alpha, found.ell),
        evaluate_f_ell(b, found.alpha, found.ell),
    )
    return OrbitVerdict(OrbitDecision.disjoint, Method.blackbox, witness)


def conjugation_system(a: MatrixTuple, b: MatrixTuple) -> Matrix:
    """Coefficients of ``B_j P - P A_j = 0`` in the unknowns ``P[u][v]`` (index ``u n + v``)."""
    a.check_compatible(b)
    n = a.n
    rows = []
    for am, bm in zip(a.matrices, b.matrices):
        for u in range(n):
            for v in range(n):
                row = [Fraction(0)] * (n * n)
                for c in range(n):
                    row[c * n + v] += bm[u, c]
                    row[u * n + c] -= am[c, v]
                rows.append(row)
    return Matrix.from_rows(rows)


def _pencil_at(basis: Sequence[Tuple[Fraction, ...]], point: Sequence[Fraction], n: int) -> Matrix:
    entries = [Fraction(0)] * (n * n)
    for x, vector in zip(point, basis):
        if x:
            for idx, value in enumerate(vector):
                entries[idx] += x * value
    return Matrix(n, n, tuple(entries))


def orbit_member(
    a: MatrixTuple,
    b: MatrixTuple,
    seed: int,
    trials: int = DEFAULT_TRIALS,
    sample_range: Optional[int] = None,
) -> OrbitVerdict:
    """Decide whether ``B = P A P^-1`` for some invertible ``P``.

    The solutions of ``B_j P = P A_j`` form a space with basis ``P_1 .. P_k``; ``A`` and
    ``B`` are conjugate iff ``det(sum(x_i P_i))`` is a nonzero polynomial, which is tested
    by Schwartz-Zippel. A member verdict is certain and carries ``P``.
    """
    basis = nullspace_basis(conjugation_system(a, b))
    n = a.n
    log.info(f"Commutation space has dimension {len(basis)}")
    if not basis:
        return OrbitVerdict(OrbitDecision.non_member, Method.whitebox)
    verdict = schwartz_zippel_zero_test(
        lambda point: det_division_free(_pencil_at(basis, point, n)),
        nvars=len(basis),
        total_degree_bound=n,
        trials=trials,
        seed=seed,
        sample_range=sample_range,
    )
    if verdict.is_zero:
        return OrbitVerdict(
            OrbitDecision.non_member, Method.randomized, failure_bound=verdict.failure_bound
        )
    assert verdict.witness is not None
    p = _pencil_at(basis, verdict.witness.point, n)
    assert is_conjugator(a, b, p), "pencil point does not conjugate"
    log.info(f"Conjugator bit-length {max(map(scalar_bit_length, p.entries))}")
    return OrbitVerdict(OrbitDecision.member, Method.randomized, p)

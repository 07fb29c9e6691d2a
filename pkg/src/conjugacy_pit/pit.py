"""Zero-testing engines and hitting-set providers."""

import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

from rich.console import Console
from rich.logging import RichHandler

from conjugacy_pit.algebra import Monomial, SparsePoly, to_scalar
from conjugacy_pit.branching import ROABP, eval_roabp, roabp_partial_evaluate
from conjugacy_pit.constants import DEFAULT_RANDOM_RANGE, GRID_POINT_CAP, MIN_SAMPLE_RANGE
from conjugacy_pit.errors import DimensionError, ParameterError, SizeError
from conjugacy_pit.hasse import leading_monomial

logging.basicConfig(level=logging.WARN, handlers=[RichHandler(console=Console(stderr=True))])
log = logging.getLogger(__name__)

Point = Tuple[Fraction, ...]
Evaluator = Callable[[Sequence[Fraction]], Fraction]


class Provenance(str, Enum):
    """Where the points of a hitting set came from."""

    grid = "grid"
    random = "random"
    file = "file"
    sparse_grid = "sparse-grid"


@dataclass(frozen=True)
class HittingSet:
    """A finite point set, all points of one arity.

    Args:
        points: the points, as tuples of scalars
        provenance: the provider that built the set
        metadata: provider parameters (seed, count, path, degree bounds, ...)
    """

    points: Tuple[Point, ...]
    provenance: Provenance
    metadata: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        points = tuple(tuple(to_scalar(c) for c in p) for p in self.points)
        if len({len(p) for p in points}) > 1:
            raise DimensionError(
                f"hitting-set points have mixed arities {sorted({len(p) for p in points})}"
            )
        object.__setattr__(self, "points", points)

    @property
    def nvars(self) -> int:
        """Arity of the points (0 for the empty set)."""
        return len(self.points[0]) if self.points else 0

    def __len__(self) -> int:
        return len(self.points)


class CertificateKind(str, Enum):
    """How a verdict was reached."""

    whitebox = "whitebox"
    blackbox_deterministic = "blackbox-deterministic"
    randomized = "randomized"


@dataclass(frozen=True)
class PointWitness:
    """A point where the polynomial is nonzero."""

    point: Point
    value: Fraction


@dataclass(frozen=True)
class MonomialWitness:
    """A monomial with a nonzero coefficient."""

    monomial: Monomial
    coefficient: Fraction


Witness = Union[PointWitness, MonomialWitness]


@dataclass(frozen=True)
class PitVerdict:
    """Outcome of a zero test.

    Args:
        is_zero: whether the polynomial was declared identically zero
        certificate: how the verdict was reached
        witness: evidence of non-zeroness, present whenever ``is_zero`` is false
        failure_bound: upper bound on the probability that a zero verdict is wrong
        steps: elimination row operations performed (white-box engine only)
    """

    is_zero: bool
    certificate: CertificateKind
    witness: Optional[Witness] = None
    failure_bound: Fraction = Fraction(0)
    steps: int = 0

    @property
    def confidence(self) -> Fraction:
        """``1 - failure_bound``."""
        return 1 - self.failure_bound


def bruteforce_zero_test(f: SparsePoly) -> PitVerdict:
    """Zero test by inspecting an expanded polynomial; the witness is its leading monomial."""
    if f.is_zero():
        return PitVerdict(True, CertificateKind.whitebox)
    monomial = leading_monomial(f)
    witness = MonomialWitness(monomial, f.coeff(monomial))
    return PitVerdict(False, CertificateKind.whitebox, witness)


class _Echelon:
    """Incremental fraction-free echelon form that remembers the vectors it accepted."""

    def __init__(self):
        self.rows: List[List[Fraction]] = []
        self.pivots: List[int] = []
        self.steps = 0

    def insert(self, vector: Sequence[Fraction]) -> bool:
        """Reduce ``vector`` against the current rows; keep it if it is independent."""
        reduced = list(vector)
        for row, pivot in zip(self.rows, self.pivots):
            self.steps += len(reduced)
            if reduced[pivot]:
                a, b = reduced[pivot], row[pivot]
                reduced = [b * x - a * y for x, y in zip(reduced, row)]
        pivot = next((i for i, x in enumerate(reduced) if x), None)
        if pivot is None:
            return False
        self.rows.append(reduced)
        self.pivots.append(pivot)
        return True


def _row_times(vector: Sequence[Fraction], m) -> Tuple[Fraction, ...]:
    return tuple(
        sum((vector[a] * m[a, c] for a in range(m.rows) if vector[a]), Fraction(0))
        for c in range(m.cols)
    )


def whitebox_roabp_zero_test(p: ROABP) -> PitVerdict:
    """Deterministic zero test of an ROABP by coefficient-span propagation.

    The engine keeps at most ``w`` labelled row vectors that span every coefficient vector
    of the partial product of the first ``i`` layers. Each survivor is the exact coefficient
    vector of its label, so a nonzero survivor after the last layer is a witness monomial.
    The full polynomial is never expanded.
    """
    survivors: List[Tuple[Tuple[Fraction, ...], Monomial]] = [((Fraction(1),), Monomial())]
    steps = 0
    for i, layer in enumerate(p.layers):
        var = p.order[i]
        echelon = _Echelon()
        next_survivors = []
        for vector, label in survivors:
            for j, coefficient in enumerate(layer):
                candidate = _row_times(vector, coefficient)
                if echelon.insert(candidate):
                    step = Monomial(((var, j),)) if j else Monomial()
                    next_survivors.append((candidate, label * step))
        steps += echelon.steps
        survivors = next_survivors
        if not survivors:
            break
    log.info(f"White-box test: {steps} elimination steps, {len(survivors)} survivors")
    if not survivors:
        return PitVerdict(True, CertificateKind.whitebox, steps=steps)
    vector, label = survivors[0]
    return PitVerdict(
        False, CertificateKind.whitebox, MonomialWitness(label, vector[0]), steps=steps
    )


def schwartz_zippel_zero_test(
    evaluator: Evaluator,
    nvars: int,
    total_degree_bound: int,
    trials: int,
    seed: int,
    sample_range: Optional[int] = None,
) -> PitVerdict:
    """Randomized zero test at ``trials`` points with coordinates in ``{0, ..., S - 1}``.

    A zero verdict is wrong with probability at most ``(bound / S)^trials``.
    """
    if trials < 0 or total_degree_bound < 0:
        raise ParameterError("trials and degree bound must be non-negative")
    if sample_range is None:
        sample_range = max(2 * total_degree_bound * trials, MIN_SAMPLE_RANGE)
    if sample_range < 1:
        raise ParameterError(f"sample range must be positive, got {sample_range}")
    rng = random.Random(seed)
    for _ in range(trials):
        point = tuple(Fraction(rng.randrange(sample_range)) for _ in range(nvars))
        if value := evaluator(point):
            return PitVerdict(False, CertificateKind.randomized, PointWitness(point, value))
    failure = min(Fraction(total_degree_bound, sample_range) ** trials, Fraction(1))
    return PitVerdict(True, CertificateKind.randomized, failure_bound=failure)


def grid_hitting_set(nvars: int, individual_degree_bound: int) -> HittingSet:
    """The full grid ``{0, ..., bound}^nvars``."""
    size = (individual_degree_bound + 1) ** nvars
    if size > GRID_POINT_CAP:
        raise SizeError(f"a grid of {size} points exceeds the cap of {GRID_POINT_CAP}")
    values = range(individual_degree_bound + 1)
    return HittingSet(
        tuple(product(values, repeat=nvars)),
        Provenance.grid,
        {"degree_bound": individual_degree_bound},
    )


def random_hitting_set(
    nvars: int, count: int, seed: int, sample_range: int = DEFAULT_RANDOM_RANGE
) -> HittingSet:
    """``count`` uniformly random points from ``{0, ..., range - 1}^nvars``."""
    rng = random.Random(seed)
    points = tuple(tuple(rng.randrange(sample_range) for _ in range(nvars)) for _ in range(count))
    return HittingSet(
        points, Provenance.random, {"seed": seed, "count": count, "range": sample_range}
    )


def hitting_set_zero_test(
    evaluator: Evaluator,
    hitting_set: HittingSet,
    certificate: CertificateKind = CertificateKind.blackbox_deterministic,
) -> PitVerdict:
    """Declare zero iff every point of the hitting set evaluates to 0."""
    for point in hitting_set.points:
        if value := evaluator(point):
            return PitVerdict(False, certificate, PointWitness(point, value))
    return PitVerdict(True, certificate)


def roabp_nonzero_point(p: ROABP, witness: Optional[MonomialWitness] = None) -> PointWitness:
    """A point where a nonzero ROABP does not vanish.

    Variables outside the support of the witness monomial are set to 0, which keeps that
    monomial. The remaining variables are fixed one at a time to the first of ``1, ..., r``
    that keeps the program nonzero, each step certified by the white-box test.
    """
    if witness is None:
        verdict = whitebox_roabp_zero_test(p)
        if verdict.is_zero:
            raise ParameterError("the program computes zero and has no nonzero point")
        assert isinstance(verdict.witness, MonomialWitness)
        witness = verdict.witness
    support = set(witness.monomial.variables)
    point: List[Fraction] = [Fraction(0)] * p.nvars
    current = p
    for layer, var in enumerate(p.order):
        if var not in support:
            current = roabp_partial_evaluate(current, layer, 0)
    for layer, var in enumerate(p.order):
        if var not in support:
            continue
        for value in range(1, p.degree_bound + 1):
            candidate = roabp_partial_evaluate(current, layer, value)
            if not whitebox_roabp_zero_test(candidate).is_zero:
                current, point[var] = candidate, Fraction(value)
                break
        else:
            raise ParameterError(f"no value in 1..{p.degree_bound} keeps x{var} nonzero")
    value = eval_roabp(p, point)
    assert value, "a certified nonzero point evaluated to zero"
    return PointWitness(tuple(point), value)

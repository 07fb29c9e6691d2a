"""Pydantic models of the JSON/YAML input documents and their domain conversions.

Scalars travel as ``"p/q"`` strings (plain integers are accepted too); affine forms as
``{"c": "p/q", "lin": {"<var>": "p/q", ...}}``. Circuit documents name their arity
``nvars``; the longer spellings ``constant``, ``linear`` and ``n`` are accepted on input.
"""

from fractions import Fraction
from typing import Annotated, Dict, List, Literal, Union

from pydantic import (
    AfterValidator,
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeInt,
    PositiveInt,
    RootModel,
    StrictInt,
    model_validator,
)

from conjugacy_pit.algebra import Matrix, format_scalar, parse_scalar
from conjugacy_pit.branching import ABP, ROABP, AffineForm, AffineMatrix, TracePower
from conjugacy_pit.diagonal import DiagonalCircuit, DiagonalTerm
from conjugacy_pit.invariants import MatrixTuple


def _normalize_scalar(value: Union[int, str]) -> str:
    return format_scalar(Fraction(value) if isinstance(value, int) else parse_scalar(value))


Scalar = Annotated[Union[StrictInt, str], AfterValidator(_normalize_scalar)]
MatrixRows = List[List[Scalar]]


def _matrix(rows: MatrixRows) -> Matrix:
    return Matrix.from_rows([[parse_scalar(v) for v in row] for row in rows])


def _rows(m: Matrix) -> List[List[str]]:
    return [[format_scalar(v) for v in row] for row in m.to_rows()]


class MatrixTupleModel(BaseModel):
    """Schema of a matrix tuple document."""

    model_config = ConfigDict(extra="forbid")

    n: PositiveInt
    r: PositiveInt
    matrices: List[MatrixRows]

    @model_validator(mode="after")
    def _check_shape(self) -> "MatrixTupleModel":
        if len(self.matrices) != self.r:
            raise ValueError(f"expected r = {self.r} matrices, got {len(self.matrices)}")
        for k, rows in enumerate(self.matrices):
            if len(rows) != self.n or any(len(row) != self.n for row in rows):
                raise ValueError(f"matrices[{k}] is not {self.n}x{self.n}")
        return self

    def to_domain(self) -> MatrixTuple:
        """The validated tuple."""
        return MatrixTuple(tuple(_matrix(rows) for rows in self.matrices))

    @staticmethod
    def from_domain(a: MatrixTuple) -> "MatrixTupleModel":
        """Document for a tuple."""
        return MatrixTupleModel(n=a.n, r=a.r, matrices=[_rows(m) for m in a.matrices])


class AffineFormModel(BaseModel):
    """Schema of an affine form."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    constant: Scalar = Field("0", alias="c")
    linear: Dict[NonNegativeInt, Scalar] = Field(default_factory=dict, alias="lin")

    def to_domain(self) -> AffineForm:
        """The validated form."""
        return AffineForm.from_dict(
            parse_scalar(self.constant), {v: parse_scalar(c) for v, c in self.linear.items()}
        )

    @staticmethod
    def from_domain(form: AffineForm) -> "AffineFormModel":
        """Document for a form."""
        return AffineFormModel(
            c=format_scalar(form.constant),
            lin={v: format_scalar(c) for v, c in form.linear},
        )


AffineRows = List[List[AffineFormModel]]


def _affine_matrix(rows: AffineRows) -> AffineMatrix:
    return AffineMatrix.from_rows([[form.to_domain() for form in row] for row in rows])


def _affine_rows(m: AffineMatrix) -> AffineRows:
    return [[AffineFormModel.from_domain(form) for form in row] for row in m.to_rows()]


class ABPModel(BaseModel):
    """Schema of an algebraic branching program: one affine matrix per layer."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    kind: Literal["abp"]
    n: NonNegativeInt = Field(..., alias="nvars")
    layers: List[AffineRows] = Field(..., min_length=1)

    def to_domain(self) -> ABP:
        """The validated program."""
        return ABP(self.n, tuple(_affine_matrix(rows) for rows in self.layers))

    @staticmethod
    def from_domain(p: ABP) -> "ABPModel":
        """Document for a program."""
        return ABPModel(
            kind="abp", nvars=p.nvars, layers=[_affine_rows(layer) for layer in p.layers]
        )


class ROABPModel(BaseModel):
    """Schema of a read-once program.

    ``layers[i][j]`` is the coefficient matrix of ``x_{order[i]}^j`` in layer ``i``.
    """

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    kind: Literal["roabp"]
    n: NonNegativeInt = Field(..., alias="nvars")
    r: PositiveInt
    order: List[NonNegativeInt] = Field(default_factory=list)
    layers: List[List[MatrixRows]] = Field(..., min_length=1)

    def to_domain(self) -> ROABP:
        """The validated program."""
        layers = tuple(tuple(_matrix(rows) for rows in layer) for layer in self.layers)
        return ROABP(self.n, self.r, layers, tuple(self.order))

    @staticmethod
    def from_domain(p: ROABP) -> "ROABPModel":
        """Document for a program."""
        return ROABPModel(
            kind="roabp",
            nvars=p.nvars,
            r=p.degree_bound,
            order=list(p.order),
            layers=[[_rows(m) for m in layer] for layer in p.layers],
        )


class TracePowerModel(BaseModel):
    """Schema of ``Tr(A(x)^d)``."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    kind: Literal["trace_power"]
    n: NonNegativeInt = Field(..., alias="nvars")
    d: PositiveInt
    matrix: AffineRows

    def to_domain(self) -> TracePower:
        """The validated trace power."""
        return TracePower(self.n, self.d, _affine_matrix(self.matrix))

    @staticmethod
    def from_domain(t: TracePower) -> "TracePowerModel":
        """Document for a trace power."""
        return TracePowerModel(
            kind="trace_power", nvars=t.nvars, d=t.exponent, matrix=_affine_rows(t.matrix)
        )


class DiagonalTermModel(BaseModel):
    """Schema of one term ``L^e`` of a diagonal circuit."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    forms: List[AffineFormModel] = Field(..., alias="L")
    exponents: List[NonNegativeInt] = Field(..., alias="e")

    @model_validator(mode="after")
    def _check_lengths(self) -> "DiagonalTermModel":
        if len(self.forms) != len(self.exponents):
            raise ValueError(f"{len(self.forms)} forms in L but {len(self.exponents)} in e")
        return self


class DiagonalModel(BaseModel):
    """Schema of a depth-3 diagonal circuit."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["diagonal"] = "diagonal"
    n: NonNegativeInt
    terms: List[DiagonalTermModel]

    def to_domain(self) -> DiagonalCircuit:
        """The validated circuit."""
        return DiagonalCircuit(
            self.n,
            tuple(
                DiagonalTerm(tuple(f.to_domain() for f in t.forms), tuple(t.exponents))
                for t in self.terms
            ),
        )

    @staticmethod
    def from_domain(c: DiagonalCircuit) -> "DiagonalModel":
        """Document for a circuit."""
        return DiagonalModel(
            n=c.nvars,
            terms=[
                DiagonalTermModel(
                    L=[AffineFormModel.from_domain(f) for f in t.forms],
                    e=list(t.exponents),
                )
                for t in c.terms
            ],
        )


class CircuitModel(RootModel):
    """Any circuit document, told apart by its ``kind``."""

    root: Annotated[
        Union[ABPModel, ROABPModel, TracePowerModel, DiagonalModel], Field(discriminator="kind")
    ]


class HittingSetModel(RootModel):
    """A hitting set: an array of equally long point arrays."""

    root: List[List[Scalar]]

    @model_validator(mode="after")
    def _check_arity(self) -> "HittingSetModel":
        arities = sorted({len(point) for point in self.root})
        if len(arities) > 1:
            raise ValueError(f"points have mixed arities {arities}")
        return self

    def to_points(self) -> List[tuple]:
        """The points as scalar tuples."""
        return [tuple(parse_scalar(v) for v in point) for point in self.root]


SCHEMA_MODELS = {
    "tuple": [MatrixTupleModel],
    "circuit": [ABPModel, ROABPModel, TracePowerModel],
    "diagonal": [DiagonalModel],
    "hitting-set": [HittingSetModel],
}

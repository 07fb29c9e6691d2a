"""JSON documents emitted by the CLI; rationals are ``"p/q"`` strings."""

from fractions import Fraction
from typing import Any, Dict, List, Sequence

from conjugacy_pit.algebra import Matrix, Monomial, SparsePoly, format_scalar, scalar_bit_length
from conjugacy_pit.invariants import Method, OrbitVerdict, SeparatingWitness
from conjugacy_pit.pit import (
    CertificateKind,
    HittingSet,
    MonomialWitness,
    PitVerdict,
    PointWitness,
)


def _bit_length(values: Sequence[Fraction]) -> int:
    return max((scalar_bit_length(v) for v in values), default=0)


def point_json(point: Sequence[Fraction]) -> List[str]:
    """A point as a list of rationals."""
    return [format_scalar(v) for v in point]


def matrix_json(m: Matrix) -> List[List[str]]:
    """A matrix as nested rows."""
    return [point_json(row) for row in m.to_rows()]


def monomial_json(m: Monomial) -> Dict[str, Any]:
    """A monomial as text plus its ``(variable, exponent)`` pairs."""
    return {"text": str(m), "exponents": [list(pair) for pair in m.exponents]}


def poly_json(f: SparsePoly) -> Dict[str, Any]:
    """A polynomial as text plus its sorted term list."""
    terms = sorted(f.terms.items(), key=lambda t: (-t[0].degree, t[0].exponents))
    return {
        "nvars": f.nvars,
        "text": str(f),
        "terms": [
            {"monomial": monomial_json(m), "coefficient": format_scalar(c)} for m, c in terms
        ],
    }


def pit_json(verdict: PitVerdict, verbose: bool = False) -> Dict[str, Any]:
    """A zero-test verdict."""
    doc: Dict[str, Any] = {
        "is_zero": verdict.is_zero,
        "certificate": verdict.certificate.value,
    }
    match verdict.witness:
        case PointWitness(point=point, value=value):
            doc["witness"] = {"point": point_json(point), "value": format_scalar(value)}
        case MonomialWitness(monomial=monomial, coefficient=coefficient):
            doc["witness"] = {
                "monomial": monomial_json(monomial),
                "coefficient": format_scalar(coefficient),
            }
    if verdict.certificate == CertificateKind.randomized:
        doc["confidence"] = format_scalar(verdict.confidence)
    if verdict.steps:
        doc["steps"] = verdict.steps
    if verbose and isinstance(verdict.witness, PointWitness):
        doc["witness_bit_length"] = _bit_length(verdict.witness.point)
    return doc


def orbit_json(verdict: OrbitVerdict, verbose: bool = False) -> Dict[str, Any]:
    """An orbit decision."""
    doc: Dict[str, Any] = {"decision": verdict.decision.value, "method": verdict.method.value}
    match verdict.witness:
        case SeparatingWitness(ell=ell, point=point, value_a=value_a, value_b=value_b):
            doc["witness"] = {
                "ell": ell,
                "point": point_json(point),
                "value_a": format_scalar(value_a),
                "value_b": format_scalar(value_b),
            }
        case Matrix():
            doc["witness"] = {"P": matrix_json(verdict.witness)}
    if verdict.method == Method.randomized:
        doc["confidence"] = format_scalar(1 - verdict.failure_bound)
    if verdict.steps:
        doc["steps"] = verdict.steps
    if verbose:
        match verdict.witness:
            case SeparatingWitness(point=point):
                doc["witness_bit_length"] = _bit_length(point)
            case Matrix(entries=entries):
                doc["witness_bit_length"] = _bit_length(entries)
    return doc


def hitting_set_json(h: HittingSet) -> List[List[str]]:
    """A hitting set as an array of point arrays, readable back as a ``file:`` provider."""
    return [point_json(p) for p in h.points]

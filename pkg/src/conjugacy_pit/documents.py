"""Read input documents through fsspec and turn them into domain objects.

Any fsspec URL works (plain paths, ``file://``, ``memory://``, ...). Documents are parsed
with ``yaml.safe_load``, so JSON input is accepted as-is.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional, Type, TypeVar, Union

import fsspec
import yaml
from pydantic import BaseModel, ValidationError
from rich.console import Console
from rich.logging import RichHandler

from conjugacy_pit.branching import ABP, ROABP, TracePower
from conjugacy_pit.diagonal import DiagonalCircuit
from conjugacy_pit.errors import SchemaError
from conjugacy_pit.invariants import MatrixTuple
from conjugacy_pit.pit import (
    HittingSet,
    Provenance,
    grid_hitting_set,
    random_hitting_set,
)
from conjugacy_pit.schemas import CircuitModel, HittingSetModel, MatrixTupleModel

logging.basicConfig(level=logging.WARN, handlers=[RichHandler(console=Console(stderr=True))])
log = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)
Circuit = Union[ABP, ROABP, TracePower, DiagonalCircuit]


def read_document(url: str) -> Any:
    """Parse the single YAML/JSON document stored at ``url``."""
    try:
        with fsspec.open(url, "r") as f:
            return yaml.safe_load(f)
    except FileNotFoundError:
        raise SchemaError("no such document", path=url)
    except yaml.YAMLError as e:
        raise SchemaError(f"not valid JSON or YAML ({e})", path=url)


def validate_document(model: Type[M], data: Any, url: str) -> M:
    """Validate ``data`` against ``model``; errors name the offending path inside ``url``."""
    try:
        return model.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        path = f"{url}:{location}" if location else url
        raise SchemaError(first["msg"], path=path)


def load_tuple(url: str) -> MatrixTuple:
    """Read a matrix tuple document."""
    return validate_document(MatrixTupleModel, read_document(url), url).to_domain()


def load_circuit(url: str) -> Circuit:
    """Read any circuit document; a document with ``terms`` and no ``kind`` is diagonal."""
    data = read_document(url)
    if isinstance(data, dict) and "terms" in data and "kind" not in data:
        data = {"kind": "diagonal", **data}
    return validate_document(CircuitModel, data, url).root.to_domain()


def load_diagonal(url: str) -> DiagonalCircuit:
    """Read a diagonal circuit document."""
    circuit = load_circuit(url)
    if not isinstance(circuit, DiagonalCircuit):
        raise SchemaError(f"expected a diagonal circuit, got {type(circuit).__name__}", path=url)
    return circuit


class ProviderKind(str, Enum):
    """Hitting-set providers selectable from the command line."""

    grid = "grid"
    random = "random"
    file = "file"


@dataclass(frozen=True)
class HittingSetProvider:
    """A parsed ``grid | random:<seed>:<count> | file:<path>`` choice."""

    kind: ProviderKind
    seed: Optional[int] = None
    count: Optional[int] = None
    path: Optional[str] = None


def parse_hitting_set_provider(text: str) -> HittingSetProvider:
    """Parse the provider notation.

    Args:
        text: ``grid``, ``random:<seed>:<count>`` or ``file:<path>`` (the path may be
            any fsspec URL and may itself contain colons)

    >>> parse_hitting_set_provider("random:7:20")
    HittingSetProvider(kind=<ProviderKind.random: 'random'>, seed=7, count=20, path=None)
    """
    name, _, rest = text.partition(":")
    match name:
        case ProviderKind.grid.value if not rest:
            return HittingSetProvider(ProviderKind.grid)
        case ProviderKind.random.value:
            parts = rest.split(":")
            try:
                seed, count = (int(p) for p in parts)
            except ValueError:
                raise SchemaError(f"expected random:<seed>:<count>, got {text!r}")
            if count < 0:
                raise SchemaError(f"point count must be non-negative, got {count}")
            return HittingSetProvider(ProviderKind.random, seed=seed, count=count)
        case ProviderKind.file.value if rest:
            return HittingSetProvider(ProviderKind.file, path=rest)
        case _:
            raise SchemaError(
                f"unknown hitting-set provider {text!r}; "
                "use grid, random:<seed>:<count> or file:<path>"
            )


def read_hitting_set(url: str) -> HittingSet:
    """Read a point-array document, or an object holding one under ``points``."""
    data = read_document(url)
    if isinstance(data, dict) and "points" in data:
        data = data["points"]
    points = validate_document(HittingSetModel, data, url).to_points()
    if len(set(points)) != len(points):
        log.warning(f"{url} lists {len(points) - len(set(points))} duplicate point(s)")
    return HittingSet(tuple(points), Provenance.file, {"path": url})


def load_hitting_set(
    provider: HittingSetProvider, nvars: int, individual_degree_bound: int
) -> HittingSet:
    """Materialize a provider for polynomials in ``nvars`` variables.

    The grid is ``{0..bound}^nvars``; random points have ``nvars`` coordinates.
    """
    match provider.kind:
        case ProviderKind.grid:
            return grid_hitting_set(nvars, individual_degree_bound)
        case ProviderKind.random:
            assert provider.seed is not None and provider.count is not None
            return random_hitting_set(nvars, provider.count, provider.seed)
        case ProviderKind.file:
            assert provider.path is not None
            return read_hitting_set(provider.path)
        case _:
            raise NotImplementedError

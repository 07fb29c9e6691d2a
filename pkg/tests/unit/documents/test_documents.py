import json
import re

import fsspec
import pytest

from conjugacy_pit.algebra import Matrix
from conjugacy_pit.branching import ABP, ROABP, TracePower
from conjugacy_pit.diagonal import DiagonalCircuit
from conjugacy_pit.documents import (
    HittingSetProvider,
    ProviderKind,
    load_circuit,
    load_diagonal,
    load_hitting_set,
    load_tuple,
    parse_hitting_set_provider,
    read_document,
    read_hitting_set,
)
from conjugacy_pit.errors import DimensionError, SchemaError
from conjugacy_pit.pit import Provenance


def write_memory(name: str, doc) -> str:
    url = f"memory://{name}"
    with fsspec.open(url, "w") as f:
        f.write(json.dumps(doc))
    return url


def test_load_tuple_from_json_and_yaml():
    # GIVEN a JSON tuple and its conjugate written in YAML
    a = load_tuple("tests/resources/tuples/pair-a.json")
    b = load_tuple("tests/resources/tuples/pair-b.yaml")
    # THEN both parse into 2x2 pairs
    assert (a.n, a.r) == (b.n, b.r) == (2, 2)
    assert b[0] == Matrix.from_rows([[4, 2], [3, 1]])


def test_load_tuple_from_memory():
    url = write_memory("tuple.json", {"n": 1, "r": 2, "matrices": [[["1/2"]], [[3]]]})
    a = load_tuple(url)
    assert a[0][0, 0] * 2 == 1
    assert a[1][0, 0] == 3


def test_missing_document():
    with pytest.raises(SchemaError, match="no such document"):
        read_document("tests/resources/tuples/missing.json")


def test_unparsable_document():
    url = "memory://broken.yaml"
    with fsspec.open(url, "w") as f:
        f.write("n: [1, 2")
    with pytest.raises(SchemaError) as e:
        read_document(url)
    assert e.value.path == url


def test_bad_shape_names_the_document():
    url = "tests/resources/tuples/bad-shape.json"
    with pytest.raises(SchemaError) as e:
        load_tuple(url)
    assert e.value.path.startswith(url)
    assert "2x2" in str(e.value)


def test_schema_errors_carry_the_offending_path():
    # GIVEN an unknown key and an unparsable scalar
    extra = write_memory("extra.json", {"n": 1, "r": 1, "matrices": [[["1"]]], "x": 1})
    scalar = write_memory("scalar.json", {"n": 1, "r": 1, "matrices": [[["1/0"]]]})
    # THEN the path names the location inside the document
    with pytest.raises(SchemaError) as e:
        load_tuple(extra)
    assert e.value.path == f"{extra}:x"
    with pytest.raises(SchemaError) as e:
        load_tuple(scalar)
    assert e.value.path.startswith(f"{scalar}:matrices.0")


@pytest.mark.parametrize(
    "name, kind",
    [
        ("abp-product", ABP),
        ("roabp-product", ROABP),
        ("roabp-zero", ROABP),
        ("trace-power", TracePower),
        ("diagonal-square", DiagonalCircuit),
        ("diagonal-zero", DiagonalCircuit),
    ],
)
def test_load_circuit_kinds(name, kind):
    assert isinstance(load_circuit(f"tests/resources/circuits/{name}.json"), kind)


def test_load_diagonal_rejects_other_circuits():
    with pytest.raises(SchemaError, match="expected a diagonal circuit"):
        load_diagonal("tests/resources/circuits/roabp-product.json")


def test_unknown_circuit_kind():
    url = write_memory("kind.json", {"kind": "formula", "n": 1})
    with pytest.raises(SchemaError):
        load_circuit(url)


def test_inconsistent_circuit_is_a_library_error():
    # GIVEN an ROABP whose order names a variable outside n
    url = write_memory(
        "order.json",
        {"kind": "roabp", "nvars": 1, "r": 1, "order": [3], "layers": [[[["1"]]]]},
    )
    with pytest.raises(DimensionError, match="does not fit"):
        load_circuit(url)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("grid", HittingSetProvider(ProviderKind.grid)),
        ("random:7:20", HittingSetProvider(ProviderKind.random, seed=7, count=20)),
        ("random:-1:0", HittingSetProvider(ProviderKind.random, seed=-1, count=0)),
        ("file:memory://h.json", HittingSetProvider(ProviderKind.file, path="memory://h.json")),
    ],
)
def test_parse_provider(text, expected):
    assert parse_hitting_set_provider(text) == expected


@pytest.mark.parametrize("text", ["grid:3", "random:7", "random:a:b", "random:1:-2", "file:", "x"])
def test_parse_provider_errors(text):
    with pytest.raises(SchemaError):
        parse_hitting_set_provider(text)


def test_read_hitting_set():
    h = read_hitting_set("tests/resources/hitting-sets/points.json")
    assert h.points == ((0, 0), (1, 1))
    assert h.provenance == Provenance.file
    assert h.metadata == {"path": "tests/resources/hitting-sets/points.json"}


def test_read_hitting_set_rejects_mixed_arity():
    with pytest.raises(SchemaError, match="mixed arities"):
        read_hitting_set("tests/resources/hitting-sets/mixed-arity.json")


def test_duplicate_points_are_kept_with_a_warning(caplog):
    # GIVEN a point set listing (1, 2) twice
    url = write_memory("dupes.json", {"points": [[1, 2], ["1", "2"], [0, 0]]})
    # WHEN the set is read
    with caplog.at_level("WARNING"):
        h = read_hitting_set(url)
    # THEN every point is kept and the duplicate is reported
    assert len(h) == 3
    assert re.search(r"1 duplicate point", caplog.text)


def test_load_hitting_set_providers():
    grid = load_hitting_set(parse_hitting_set_provider("grid"), 2, 1)
    assert len(grid) == 4 and grid.provenance == Provenance.grid
    random_set = load_hitting_set(parse_hitting_set_provider("random:3:5"), 4, 1)
    assert len(random_set) == 5 and random_set.nvars == 4
    path = "tests/resources/hitting-sets/points.json"
    from_file = load_hitting_set(parse_hitting_set_provider(f"file:{path}"), 2, 1)
    assert from_file.provenance == Provenance.file

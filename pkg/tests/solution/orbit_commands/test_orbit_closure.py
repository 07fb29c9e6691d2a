import json

from typer.testing import CliRunner

from conjugacy_pit.main import app

TUPLES = "tests/resources/tuples"


def test_unipotent_closure_meets_the_identity():
    # GIVEN ([[1, 1], [0, 1]]) and (I_2)
    test_args = [
        "orbit-closure",
        f"--a={TUPLES}/unipotent.json",
        f"--b={TUPLES}/identity.json",
    ]
    # WHEN `conjugacy-pit orbit-closure` is executed
    result = CliRunner().invoke(app, test_args)
    # THEN the closures intersect
    assert result.exit_code == 0
    doc = json.loads(result.stdout)
    assert doc["decision"] == "intersecting"
    assert doc["method"] == "whitebox"
    assert "witness" not in doc


def test_diagonal_tuples_are_disjoint():
    # GIVEN diag(1, 2) and diag(1, 3)
    test_args = ["orbit-closure", f"--a={TUPLES}/diag12.json", f"--b={TUPLES}/diag13.json"]
    # WHEN `conjugacy-pit orbit-closure` is executed
    result = CliRunner().invoke(app, test_args)
    # THEN the trace separates them
    assert result.exit_code == 0
    doc = json.loads(result.stdout)
    assert doc["decision"] == "disjoint"
    assert doc["witness"] == {"ell": 1, "point": ["0"], "value_a": "3", "value_b": "4"}


def test_conjugate_pair_from_json_and_yaml():
    # GIVEN a pair and its conjugate written in YAML
    for workers in ("1", "3"):
        test_args = [
            "orbit-closure",
            f"--a={TUPLES}/pair-a.json",
            f"--b={TUPLES}/pair-b.yaml",
            f"--workers={workers}",
        ]
        # WHEN `conjugacy-pit orbit-closure` is executed
        result = CliRunner().invoke(app, test_args)
        # THEN the closures intersect on any number of workers
        assert result.exit_code == 0
        assert json.loads(result.stdout)["decision"] == "intersecting"


def test_blackbox_decision_with_a_grid():
    # GIVEN the grid provider
    test_args = [
        "orbit-closure",
        f"--a={TUPLES}/diag12.json",
        f"--b={TUPLES}/diag13.json",
        "--hitting-set=grid",
    ]
    # WHEN `conjugacy-pit orbit-closure` is executed
    result = CliRunner().invoke(app, test_args)
    # THEN only invariant values are compared
    assert result.exit_code == 0
    doc = json.loads(result.stdout)
    assert doc["method"] == "blackbox"
    assert doc["decision"] == "disjoint"
    assert doc["witness"]["point"] == ["0", "0", "0", "0"]


def test_malformed_tuple():
    # GIVEN a tuple whose matrix is not n x n
    test_args = ["orbit-closure", f"--a={TUPLES}/bad-shape.json", f"--b={TUPLES}/diag12.json"]
    # WHEN `conjugacy-pit orbit-closure` is executed
    result = CliRunner().invoke(app, test_args)
    # THEN the command fails with a usage error naming the document
    assert result.exit_code == 2
    assert "bad-shape.json" in result.output


def test_mismatched_tuples():
    # GIVEN tuples with different (n, r)
    test_args = ["orbit-closure", f"--a={TUPLES}/pair-a.json", f"--b={TUPLES}/identity.json"]
    # WHEN `conjugacy-pit orbit-closure` is executed
    result = CliRunner().invoke(app, test_args)
    # THEN the command fails
    assert result.exit_code == 2


def test_max_ell_excludes_hitting_set():
    test_args = [
        "orbit-closure",
        f"--a={TUPLES}/diag12.json",
        f"--b={TUPLES}/diag13.json",
        "--hitting-set=grid",
        "--max-ell=2",
    ]
    result = CliRunner().invoke(app, test_args)
    assert result.exit_code == 2
    assert "mutually exclusive" in result.output


def test_unknown_provider():
    test_args = [
        "orbit-closure",
        f"--a={TUPLES}/diag12.json",
        f"--b={TUPLES}/diag13.json",
        "--hitting-set=sobol",
    ]
    result = CliRunner().invoke(app, test_args)
    assert result.exit_code == 2


def test_verbose_reports_bit_lengths():
    test_args = [
        "--verbose",
        "orbit-closure",
        f"--a={TUPLES}/diag12.json",
        f"--b={TUPLES}/diag13.json",
    ]
    result = CliRunner().invoke(app, test_args)
    assert result.exit_code == 0
    assert '"witness_bit_length": 0' in result.stdout

"""Main Typer application to assemble the CLI."""

import json
import logging
from contextlib import contextmanager
from typing import Annotated, Any, Dict, Iterator, List, Optional

import typer
from pydantic import ValidationError
from pydantic.json_schema import models_json_schema
from rich.console import Console
from rich.logging import RichHandler

from conjugacy_pit.branching import (
    ABP,
    ROABP,
    TracePower,
    abp_to_trace_power,
    eval_roabp,
    expand_abp,
    expand_roabp,
    expand_trace_power,
    roabp_to_abp,
    trace_power_to_abp,
)
from conjugacy_pit.checks import SUITES
from conjugacy_pit.constants import DEFAULT_SELFCHECK_INSTANCES, DEFAULT_TRIALS, LOGGER_NAME
from conjugacy_pit.diagonal import (
    DiagonalCircuit,
    blackbox_zero_test_diagonal,
    derivative_dim_bound,
    expand_diagonal,
    hitting_set_diagonal,
    support_bound,
)
from conjugacy_pit.documents import (
    ProviderKind,
    load_circuit,
    load_diagonal,
    load_hitting_set,
    load_tuple,
    parse_hitting_set_provider,
)
from conjugacy_pit.errors import ConjugacyPitError
from conjugacy_pit.invariants import (
    orbit_closure_intersects,
    orbit_closure_intersects_blackbox,
    orbit_member,
)
from conjugacy_pit.pit import CertificateKind, hitting_set_zero_test, whitebox_roabp_zero_test
from conjugacy_pit.reports import hitting_set_json, orbit_json, pit_json, poly_json
from conjugacy_pit.results import CheckFormat, ConvertTarget, FormatTracker, SchemaType
from conjugacy_pit.schemas import SCHEMA_MODELS, ABPModel, TracePowerModel
from conjugacy_pit.selfcheck import build_checks
from conjugacy_pit.tree import ResultAggregator

logging.basicConfig(level=logging.WARN, handlers=[RichHandler(console=Console(stderr=True))])
log = logging.getLogger(__name__)

app = typer.Typer(pretty_exceptions_show_locals=False, no_args_is_help=True)


@contextmanager
def user_input() -> Iterator[None]:
    """Turn library and schema errors into usage errors (exit status 2)."""
    try:
        yield
    except (ConjugacyPitError, ValidationError) as e:
        raise typer.BadParameter(str(e))


def emit(doc: Dict[str, Any]):
    """Print the single JSON document of a command."""
    print(json.dumps(doc))


def is_verbose(ctx: typer.Context) -> bool:
    """Whether the global --verbose flag was given."""
    return bool(ctx.obj and ctx.obj.get("verbose"))


@app.callback()
def callback(
    ctx: typer.Context,
    verbose: Annotated[
        bool,
        typer.Option("--verbose", "-v", help="Report bit-lengths and elimination steps."),
    ] = False,
):
    """Decide orbit-closure intersection of matrix tuples and test polynomial identities."""
    ctx.obj = {"verbose": verbose}
    logging.getLogger(LOGGER_NAME).setLevel(logging.INFO if verbose else logging.NOTSET)


@app.command("orbit-closure", no_args_is_help=True)
def orbit_closure(
    ctx: typer.Context,
    a: Annotated[str, typer.Option("--a", help="URL of the first matrix tuple.")],
    b: Annotated[str, typer.Option("--b", help="URL of the second matrix tuple.")],
    hitting_set: Annotated[
        Optional[str],
        typer.Option(
            "--hitting-set",
            help="Compare invariant values only: grid | random:<seed>:<count> | file:<path>.",
        ),
    ] = None,
    max_ell: Annotated[
        Optional[int],
        typer.Option("--max-ell", help="Largest word length to test (default n^2).", min=1),
    ] = None,
    workers: Annotated[
        int, typer.Option("--workers", help="Threads for the per-length tests.", min=1)
    ] = 1,
):
    """Decide whether the orbit closures of two tuples intersect."""
    if hitting_set and max_ell is not None:
        raise typer.BadParameter("--max-ell and --hitting-set are mutually exclusive.")
    with user_input():
        ta, tb = load_tuple(a), load_tuple(b)
        ta.check_compatible(tb)
        if hitting_set:
            provider = parse_hitting_set_provider(hitting_set)
            h = load_hitting_set(provider, ta.n * ta.n, ta.r - 1)
            verdict = orbit_closure_intersects_blackbox(ta, tb, h)
        else:
            verdict = orbit_closure_intersects(ta, tb, max_ell=max_ell, workers=workers)
    emit(orbit_json(verdict, is_verbose(ctx)))


@app.command("orbit-member", no_args_is_help=True)
def orbit_member_command(
    ctx: typer.Context,
    a: Annotated[str, typer.Option("--a", help="URL of the first matrix tuple.")],
    b: Annotated[str, typer.Option("--b", help="URL of the second matrix tuple.")],
    seed: Annotated[int, typer.Option("--seed", help="Seed of the randomized test.")],
    trials: Annotated[
        int, typer.Option("--trials", help="Random evaluation points to try.", min=1)
    ] = DEFAULT_TRIALS,
):
    """Decide whether the second tuple is a simultaneous conjugate of the first."""
    with user_input():
        verdict = orbit_member(load_tuple(a), load_tuple(b), seed=seed, trials=trials)
    emit(orbit_json(verdict, is_verbose(ctx)))


@app.command("pit-roabp", no_args_is_help=True)
def pit_roabp(
    ctx: typer.Context,
    circuit: Annotated[str, typer.Option("--circuit", help="URL of an ROABP document.")],
    hitting_set: Annotated[
        Optional[str],
        typer.Option(
            "--hitting-set",
            help="Evaluate on a point set instead: grid | random:<seed>:<count> | file:<path>.",
        ),
    ] = None,
):
    """Zero-test a read-once oblivious branching program."""
    with user_input():
        p = load_circuit(circuit)
        if not isinstance(p, ROABP):
            raise typer.BadParameter(f"{circuit} holds a {type(p).__name__}, not an ROABP.")
        if hitting_set:
            provider = parse_hitting_set_provider(hitting_set)
            h = load_hitting_set(provider, p.nvars, p.degree_bound - 1)
            certificate = (
                CertificateKind.randomized
                if provider.kind == ProviderKind.random
                else CertificateKind.blackbox_deterministic
            )
            verdict = hitting_set_zero_test(lambda x: eval_roabp(p, x), h, certificate)
        else:
            verdict = whitebox_roabp_zero_test(p)
    emit(pit_json(verdict, is_verbose(ctx)))


@app.command("pit-diagonal", no_args_is_help=True)
def pit_diagonal(
    ctx: typer.Context,
    circuit: Annotated[str, typer.Option("--circuit", help="URL of a diagonal circuit.")],
):
    """Zero-test a depth-3 diagonal circuit on its small-support hitting set."""
    with user_input():
        c = load_diagonal(circuit)
        verdict = blackbox_zero_test_diagonal(c)
    doc = pit_json(verdict, is_verbose(ctx))
    doc.update({"derivative_bound": derivative_dim_bound(c), "m": support_bound(c)})
    emit(doc)


@app.command("hitgen-diagonal", no_args_is_help=True)
def hitgen_diagonal(
    n: Annotated[int, typer.Option("--n", help="Number of variables.", min=1)],
    d: Annotated[int, typer.Option("--d", help="Largest coordinate value.", min=1)],
    m: Annotated[int, typer.Option("--m", help="Largest support size.", min=0)],
):
    """Print the points of {0..d}^n with at most m nonzero coordinates."""
    with user_input():
        h = hitting_set_diagonal(n, d, m)
    log.info(f"{len(h)} points ({h.provenance.value}) for n={n}, d={d}, m={m}")
    emit(hitting_set_json(h))


@app.command(no_args_is_help=True)
def convert(
    circuit: Annotated[str, typer.Option("--circuit", help="URL of a circuit document.")],
    to: Annotated[
        ConvertTarget,
        typer.Option("--to", help="Target representation.", case_sensitive=False),
    ],
    d_prime: Annotated[
        Optional[int],
        typer.Option("--d-prime", help="Exponent of the trace power (default: depth).", min=1),
    ] = None,
):
    """Convert between ABPs, ROABPs and traces of matrix powers."""
    if d_prime is not None and to != ConvertTarget.trace_power:
        raise typer.BadParameter("--d-prime only applies to --to trace_power.")
    with user_input():
        c = load_circuit(circuit)
        match c:
            case DiagonalCircuit():
                raise typer.BadParameter("diagonal circuits have no layered form to convert.")
            case TracePower() if to == ConvertTarget.trace_power and d_prime is None:
                emit(TracePowerModel.from_domain(c).model_dump(mode="json", by_alias=True))
                return
            case TracePower():
                abp = trace_power_to_abp(c)
            case ROABP():
                abp = roabp_to_abp(c)
            case _:
                abp = c
        match to:
            case ConvertTarget.abp:
                doc = ABPModel.from_domain(abp).model_dump(mode="json", by_alias=True)
            case ConvertTarget.trace_power:
                doc = TracePowerModel.from_domain(abp_to_trace_power(abp, d_prime)).model_dump(
                    mode="json", by_alias=True
                )
    emit(doc)


@app.command(no_args_is_help=True)
def expand(
    circuit: Annotated[str, typer.Option("--circuit", help="URL of a circuit document.")],
):
    """Print the polynomial a circuit computes."""
    with user_input():
        c = load_circuit(circuit)
        match c:
            case ABP():
                f = expand_abp(c)
            case ROABP():
                f = expand_roabp(c)
            case TracePower():
                f = expand_trace_power(c)
            case DiagonalCircuit():
                f = expand_diagonal(c)
            case _:
                raise NotImplementedError
    emit(poly_json(f))


@app.command(no_args_is_help=True)
def selfcheck(
    ctx: typer.Context,
    seed: Annotated[int, typer.Option("--seed", help="Seed for every generated instance.")],
    instances: Annotated[
        int, typer.Option("--instances", "-n", help="Instances per check.", min=1)
    ] = DEFAULT_SELFCHECK_INSTANCES,
    suites: Annotated[
        List[str],
        typer.Option("--suite", "-s", help=f"Suites to run (default all): {', '.join(SUITES)}."),
    ] = [],
    format_type: Annotated[
        CheckFormat,
        typer.Option("--format", "-o", help="Specify output format.", case_sensitive=False),
    ] = CheckFormat.json,
):
    """Run the oracle cross-checks on random instances; exit 1 on any mismatch."""
    unknown = [s for s in suites if s not in SUITES]
    if unknown:
        raise typer.BadParameter(f"Unknown suite(s): {', '.join(unknown)}.")
    checks = build_checks(list(dict.fromkeys(suites)) or list(SUITES))
    for check in checks:
        check.run(instances, seed)
    fmt = FormatTracker(is_verbose(ctx), format_type)
    results = ResultAggregator(checks, fmt).print_results()
    if results["fail"]:
        raise typer.Exit(1)


@app.command(no_args_is_help=True)
def schema(
    schema_type: Annotated[
        SchemaType,
        typer.Option(
            "--type", "-t", help="Specify which schema type to output.", case_sensitive=False
        ),
    ] = SchemaType.tuple,
):
    """Generate and output the JSON Schema of an input format."""
    models = SCHEMA_MODELS[schema_type.value]
    if len(models) == 1:
        doc = models[0].model_json_schema()
    else:
        _, doc = models_json_schema([(model, "validation") for model in models])
    emit(doc)


if __name__ == "__main__":
    app()

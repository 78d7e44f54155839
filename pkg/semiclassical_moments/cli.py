"""Command-line front end: ``semiclassical bracket|classify|chart|evolve``."""
import json
import logging
import sys
from typing import Any, Dict, Optional

import click
import numpy as np
from pydantic import BaseModel, ValidationError

from .brackets import bracket_general, bracket_truncated
from .charts import CHARTS, MomentChart, flow, get_chart, verify_chart_samples
from .charts.verification import DEFAULT_VERIFY_TOL
from .dynamics import evolve as run_evolution
from .dynamics.integrator import default_casimirs, record_invariants
from .dynamics.trajectory import from_points
from .exceptions import (
    ChartDomainError,
    ConvergenceError,
    DimensionMismatchError,
    IntegrationError,
    MissingInverseError,
    MissingMomentError,
    MomentParseError,
)
from .lie import classification_report
from .moments import MomentExpression
from .schemas.config import RunConfig
from .schemas.reports import SCHEMA_VERSION, BracketReport
from .utils.parser import (
    expression_from_sympy,
    format_expression,
    format_moment,
    parse_assignments,
    parse_expression,
    parse_moment,
)

logger = logging.getLogger(__name__)

EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3

INPUT_ERRORS = (MomentParseError, MissingMomentError, DimensionMismatchError, ChartDomainError, MissingInverseError, KeyError)


def _emit(payload: Any) -> None:
    if isinstance(payload, BaseModel):
        click.echo(payload.model_dump_json(by_alias=True, indent=2))
    else:
        click.echo(json.dumps(payload, indent=2, default=float))


def _usage_error(exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(EXIT_USAGE)


def _parse_operand(text: str, N: Optional[int]) -> MomentExpression:
    return expression_from_sympy(parse_expression(text, N))


@click.group()
@click.option("--verbose", is_flag=True, help="Log at DEBUG level on stderr.")
def main(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


@main.command()
@click.argument("left")
@click.argument("right")
@click.option("-s", "--order", type=click.IntRange(min=2), default=None, help="Truncate at semiclassical order s.")
@click.option("-n", "--N", "N", type=click.IntRange(min=1), default=None, help="Number of degrees of freedom.")
@click.option("--json", "as_json", is_flag=True, help="Print a JSON report instead of text.")
def bracket(left: str, right: str, order: Optional[int], N: Optional[int], as_json: bool) -> None:
    """Exact Poisson bracket of two moment expressions."""
    try:
        A = _parse_operand(left, N)
        B = _parse_operand(right, N)
        N = N or A.N or B.N or 1
        result = bracket_general(A, B, N) if order is None else bracket_truncated(A, B, N, order)
    except INPUT_ERRORS as exc:
        _usage_error(exc)
        return

    if not as_json:
        click.echo(format_expression(result))
        return
    terms = [
        {
            "factors": [str(f) for f in factors],
            "hbar_power": hbar_power,
            "coefficient": str(coefficient),
        }
        for (factors, hbar_power), coefficient in result.terms()
    ]
    _emit(
        BracketReport(
            left=format_expression(A),
            right=format_expression(B),
            N=N,
            order=order,
            result=format_expression(result),
            terms=terms,
        )
    )


@main.command()
@click.argument("n", type=click.IntRange(1, 6))
def classify(n: int) -> None:
    """Root system and Cartan matrix of the second-order moment algebra."""
    _emit(classification_report(n))


@main.group()
def chart() -> None:
    """Canonical realizations of moment algebras."""


@chart.command("list")
def chart_list() -> None:
    _emit([get_chart(name).describe() for name in CHARTS])


def _load_chart(name: str, hbar: Optional[float]):
    try:
        return get_chart(name, hbar=hbar)
    except KeyError as exc:
        _usage_error(exc)


@chart.command("eval")
@click.argument("name")
@click.option("--coords", required=True, help="Canonical coordinates, e.g. s=2,ps=3,U=4.")
@click.option("--hbar", type=float, default=None)
def chart_eval(name: str, coords: str, hbar: Optional[float]) -> None:
    """Map canonical coordinates to target coordinates."""
    target = _load_chart(name, hbar)
    try:
        values = target.forward(target.check_domain(parse_assignments(coords)))
    except INPUT_ERRORS as exc:
        _usage_error(exc)
        return
    _emit({"chart": target.name, "coordinates": parse_assignments(coords), "targets": values})


@chart.command("invert")
@click.argument("name")
@click.option("--targets", "--moments", "targets", required=True, help="Target values, e.g. d(q^2)=4,d(q pi)=6.")
@click.option("--hbar", type=float, default=None)
def chart_invert(name: str, targets: str, hbar: Optional[float]) -> None:
    """Map target coordinates back to canonical coordinates."""
    target = _load_chart(name, hbar)
    try:
        values = parse_assignments(targets)
        if isinstance(target, MomentChart):
            values = {format_moment(parse_moment(key, target.N)): value for key, value in values.items()}
        coordinates = target.inverse(values)
    except INPUT_ERRORS as exc:
        _usage_error(exc)
        return
    _emit({"chart": target.name, "targets": values, "coordinates": coordinates})


@chart.command("verify")
@click.argument("name")
@click.option("--samples", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tol", type=float, default=DEFAULT_VERIFY_TOL, show_default=True)
@click.option("--hbar", type=float, default=None)
def chart_verify(name: str, samples: int, seed: int, tol: float, hbar: Optional[float]) -> None:
    """Check bracket preservation and round trips at seeded random points."""
    target = _load_chart(name, hbar)
    summary = verify_chart_samples(target, samples=samples, seed=seed, tol=tol)
    _emit(summary)
    if not summary.passed:
        sys.exit(EXIT_FAILED)


@chart.command("flow")
@click.argument("name")
@click.option("--coords", required=True, help="Initial canonical coordinates of the chart.")
@click.option("--generator", required=True, help="Generating function, e.g. 'd(q^2)' or 'sqrt(d(q^2))'.")
@click.option("--t-final", type=float, default=1.0, show_default=True)
@click.option("--steps", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--hbar", type=float, default=None)
def chart_flow(name: str, coords: str, generator: str, t_final: float, steps: int, hbar: Optional[float]) -> None:
    """Integrate the Hamiltonian flow of a generator from a chart point (CSV on stdout)."""
    target = _load_chart(name, hbar)
    if not isinstance(target, MomentChart):
        _usage_error(ValueError(f"chart {name} does not parametrize moments"))
        return
    try:
        p0 = target.to_point(target.check_domain(parse_assignments(coords)))
        G = parse_expression(generator, target.N)
        result = flow(G, p0, t_final, steps=steps)
    except INPUT_ERRORS as exc:
        _usage_error(exc)
        return
    except IntegrationError as exc:
        _runtime_error(exc)
        return
    trajectory = from_points(result.points, result.times)
    record_invariants(trajectory, None, default_casimirs(target.N, target.order))
    trajectory.write_csv(sys.stdout)


def _runtime_error(exc: Exception) -> None:
    diagnostic: Dict[str, Any] = {"schema": SCHEMA_VERSION, "error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, IntegrationError):
        diagnostic["time"] = exc.time
        diagnostic["state"] = exc.state
    if isinstance(exc, ConvergenceError):
        diagnostic["deviation"] = exc.deviation
    logger.error("%s: %s", type(exc).__name__, exc)
    _emit(diagnostic)
    sys.exit(EXIT_RUNTIME)


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@click.option("--oracle", is_flag=True, help="Compare against the exact quantum evolution.")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None, help="Override the CSV path.")
@click.option("--summary", "summary_path", type=click.Path(dir_okay=False), default=None)
def evolve(config: str, oracle: bool, csv_path: Optional[str], summary_path: Optional[str]) -> None:
    """Run the effective dynamics described by a RunConfig JSON file."""
    with open(config, "r", encoding="utf-8") as stream:
        try:
            data = json.load(stream)
        except json.JSONDecodeError as exc:
            _usage_error(exc)
            return
    if not isinstance(data, dict):
        _usage_error(ValueError("run configuration must be a JSON object"))
        return
    if oracle:
        data.setdefault("oracle", {})["enabled"] = True
    output = data.setdefault("output", {})
    if csv_path:
        output["csv"] = csv_path
    if summary_path:
        output["summary"] = summary_path
    try:
        run_config = RunConfig.model_validate(data)
    except ValidationError as exc:
        _usage_error(exc)
        return

    try:
        run = run_evolution(run_config)
    except INPUT_ERRORS as exc:
        _usage_error(exc)
        return
    except (IntegrationError, ConvergenceError, np.linalg.LinAlgError) as exc:
        _runtime_error(exc)
        return
    _emit(run.summary)
    checks = [c for c in (run.summary.chart, run.summary.chart_samples) if c is not None]
    if not all(c.passed for c in checks):
        sys.exit(EXIT_FAILED)


if __name__ == "__main__":
    main()

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from ..charts import MomentChart, get_chart, verify_chart, verify_chart_samples
from ..exceptions import DimensionMismatchError
from ..moments import PhasePoint, gaussian_point
from ..schemas.config import RunConfig
from ..schemas.reports import ChartReport, ChartSampleSummary, EvolutionSummary
from ..utils.parser import parse_moment
from .compare import compare
from .hamiltonian import effective_hamiltonian, equations_of_motion
from .integrator import integrate, integrate_in_chart
from .oracle import quantum_oracle
from .trajectory import Trajectory

logger = logging.getLogger(__name__)


@dataclass
class EvolutionRun:
    trajectory: Trajectory
    summary: EvolutionSummary
    oracle: Optional[Trajectory] = None


def _chart_for(config: RunConfig) -> MomentChart:
    chart = get_chart(config.initial.chart.chart, hbar=config.hbar)
    if not isinstance(chart, MomentChart):
        raise DimensionMismatchError(f"chart {chart.name} does not parametrize moments")
    if (chart.N, chart.order) != (config.N, config.order):
        raise DimensionMismatchError(
            f"chart {chart.name} covers N={chart.N} s={chart.order}, run has N={config.N} s={config.order}"
        )
    return chart


def _basic_values(q: Sequence[float], pi: Sequence[float], N: int) -> Tuple[float, ...]:
    """Basic expectation values in canonical layout; an omitted side is zero."""
    q = tuple(q) or (0.0,) * N
    pi = tuple(pi) or (0.0,) * N
    if len(q) != N or len(pi) != N:
        raise DimensionMismatchError(f"expected {N} values each for q and pi, got {len(q)} and {len(pi)}")
    return q + pi


def check_initial_chart(config: RunConfig) -> Tuple[Optional[ChartReport], Optional[ChartSampleSummary]]:
    """Verify the chart of a chart initial state at its coordinates and, optionally, at seeded samples."""
    if config.initial.chart is None:
        return None, None
    chart, tol = _chart_for(config), config.tolerances
    report = verify_chart(chart, config.initial.chart.coordinates, tol=tol.verify, rank_tol=tol.rank)
    if not report.passed:
        logger.warning("chart %s fails verification at the initial coordinates", chart.name)
    samples = None
    if config.chart_samples:
        samples = verify_chart_samples(
            chart, samples=config.chart_samples, seed=config.seed, tol=tol.verify, rank_tol=tol.rank
        )
    return report, samples


def initial_point(config: RunConfig) -> PhasePoint:
    initial = config.initial
    N, s, hbar = config.N, config.order, config.hbar
    if initial.gaussian is not None:
        g = initial.gaussian
        return gaussian_point(N, s, g.widths, hbar, center=g.center, correlations=g.correlations)
    if initial.moments is not None:
        m = initial.moments
        moments = {parse_moment(name, N): value for name, value in m.moments.items()}
        return PhasePoint(N=N, order=s, hbar=hbar, basic=_basic_values(m.q, m.pi, N), moments=moments)
    c = initial.chart
    return _chart_for(config).to_point(c.coordinates, basic=_basic_values(c.q, c.pi, N))


def evolve(config: RunConfig) -> EvolutionRun:
    heff = effective_hamiltonian(config.hamiltonian, config.order)
    logger.info("H_eff at order %d has %d terms", config.order, len(heff))
    tol = config.tolerances
    chart_report, chart_samples = check_initial_chart(config)

    if config.chart_dynamics:
        c = config.initial.chart
        trajectory = integrate_in_chart(
            _chart_for(config),
            heff,
            c.coordinates,
            basic=_basic_values(c.q, c.pi, config.N),
            t_final=config.t_final,
            steps=config.steps,
            rtol=tol.rtol,
            atol=tol.atol,
        )
    else:
        p0 = initial_point(config)
        eoms = equations_of_motion(heff, config.N, config.order)
        trajectory = integrate(
            eoms, p0, config.t_final, steps=config.steps, rtol=tol.rtol, atol=tol.atol, energy=heff
        )

    oracle, comparison = None, None
    if config.oracle.enabled:
        options = config.oracle
        oracle = quantum_oracle(
            config.hamiltonian,
            config.initial.gaussian,
            trajectory.times,
            s=config.order,
            basis=options.basis,
            omega_basis=options.omega_basis,
            check_convergence=options.check_convergence,
            tol=options.convergence_tol,
        )
        comparison = compare(trajectory, oracle)
        logger.info("largest deviation from the quantum evolution: %.3g", comparison.worst)

    if config.output.csv:
        with open(config.output.csv, "w", encoding="utf-8") as stream:
            trajectory.write_csv(stream)
        logger.info("trajectory written to %s", config.output.csv)

    smallest = trajectory.min_uncertainty_product()
    summary = EvolutionSummary(
        N=config.N,
        order=config.order,
        hbar=config.hbar,
        steps=config.steps,
        t_final=config.t_final,
        energy=trajectory.energy_drift(),
        casimirs=trajectory.casimir_drifts(),
        min_uncertainty_product=smallest,
        uncertainty_margin=smallest - config.hbar**2 / 4,
        oracle=comparison,
        chart=chart_report,
        chart_samples=chart_samples,
        csv=config.output.csv,
    )
    if summary.uncertainty_margin < 0:
        logger.warning("uncertainty relation violated along the trajectory (margin %.3g)", summary.uncertainty_margin)
    if config.output.summary:
        with open(config.output.summary, "w", encoding="utf-8") as stream:
            stream.write(summary.model_dump_json(by_alias=True, indent=2))
    return EvolutionRun(trajectory=trajectory, summary=summary, oracle=oracle)

"""Numerical integration of truncated moment dynamics."""
import logging
from functools import partial
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy
from scipy.integrate import solve_ivp

from ..charts.base import Coordinates, MomentChart
from ..charts.second_order import N2S2Chart
from ..charts.third_order import quartic_casimir_expression
from ..exceptions import ChartDomainError, DimensionMismatchError, IntegrationError
from ..lie import casimir_trace, moment_pair
from ..moments import (
    BasicVariable,
    Factor,
    MomentExpression,
    MomentIndex,
    PhasePoint,
    basic_symbol,
    basic_variables,
    coordinate_layout,
    enumerate_moments,
    symbol_for,
)
from ..schemas.config import DEFAULT_ATOL, DEFAULT_RTOL
from .trajectory import Trajectory

logger = logging.getLogger(__name__)

Casimir = Callable[[PhasePoint], float]
EquationsOfMotion = Sequence[Tuple[Factor, MomentExpression]]


def _evaluate(expression: MomentExpression, point: PhasePoint) -> float:
    return expression.evaluate(point)


def _chart_casimir(chart: MomentChart, name: str, point: PhasePoint) -> float:
    return chart.from_point(point)[name]


def default_casimirs(N: int, s: int) -> Dict[str, Casimir]:
    """Casimir functions of P_s known in closed form."""
    if s == 2:
        casimirs: Dict[str, Casimir] = {f"U{2 * m}": partial(casimir_trace, m) for m in range(1, N + 1)}
        if N == 1:
            q2, qp, p2 = (MomentExpression.of(idx) for idx in enumerate_moments(1, 2))
            casimirs["U"] = partial(_evaluate, q2 * p2 - qp * qp)
        if N == 2:
            chart = N2S2Chart()
            casimirs.update({f"{chart.name}:{name}": partial(_chart_casimir, chart, name) for name in chart.casimir_names})
        return casimirs
    if N == 1 and s == 3:
        return {"U1": partial(_evaluate, quartic_casimir_expression())}
    logger.debug("no closed-form Casimir registered for N=%d s=%d", N, s)
    return {}


def _layout_order(layout: Sequence[Factor]) -> int:
    return max((f.order for f in layout if isinstance(f, MomentIndex)), default=0)


def _time_grid(t_final: float, steps: int) -> np.ndarray:
    """Evenly spaced output times from 0 to ``t_final``; descending when ``t_final`` is negative."""
    if steps < 1:
        raise ValueError("steps must be positive")
    if t_final == 0:
        return np.zeros(1)
    return np.linspace(0.0, t_final, steps + 1)


def _solve(
    vector_field: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    times: np.ndarray,
    rtol: float,
    atol: float,
) -> np.ndarray:
    """States at ``times`` as rows; raises :class:`IntegrationError` on failure."""
    if times[-1] == 0:
        return np.tile(y0, (len(times), 1))
    solution = solve_ivp(vector_field, (0.0, times[-1]), y0, method="DOP853", t_eval=times, rtol=rtol, atol=atol)
    if not solution.success:
        t_fail = float(solution.t[-1]) if solution.t.size else 0.0
        state = solution.y[:, -1] if solution.y.size else y0
        logger.error("integration stopped at t=%g: %s", t_fail, solution.message)
        raise IntegrationError(f"integration failed: {solution.message}", time=t_fail, state=state)
    return solution.y.T


def _checked(rhs: Callable[..., object]) -> Callable[[float, np.ndarray], np.ndarray]:
    def vector_field(t: float, y: np.ndarray) -> np.ndarray:
        value = np.array(rhs(*y), dtype=float).reshape(-1)
        if not np.all(np.isfinite(value)):
            raise IntegrationError(f"non-finite derivative at t={t:g}", time=t, state=y)
        return value

    return vector_field


def integrate(
    eoms: EquationsOfMotion,
    p0: PhasePoint,
    t_final: float,
    steps: int = 100,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    energy: Optional[MomentExpression] = None,
    casimirs: Optional[Mapping[str, Casimir]] = None,
) -> Trajectory:
    """Integrate dx/dt = {x, H_eff} from ``p0``.

    ``eoms`` come from :func:`equations_of_motion`; their variables fix the
    layout of the returned trajectory. Energy and Casimirs are recorded at
    every output time; a Casimir that cannot be evaluated is stored as NaN.
    """
    layout = [variable for variable, _ in eoms]
    s = _layout_order(layout)
    if layout != coordinate_layout(p0.N, s):
        raise DimensionMismatchError(f"equations of motion do not cover P_{s} for N={p0.N}")
    if s > p0.order:
        raise DimensionMismatchError(f"initial point of order {p0.order} cannot start an order-{s} run")

    symbols = [symbol_for(f) for f in layout]
    rhs = sympy.lambdify(symbols, [expression.to_sympy(hbar=p0.hbar) for _, expression in eoms], "numpy")
    times = _time_grid(t_final, steps)
    y0 = np.array([p0.value(f) for f in layout], dtype=float)
    logger.info("integrating %d equations to t=%g (rtol=%g, atol=%g)", len(layout), t_final, rtol, atol)
    states = _solve(_checked(rhs), y0, times, rtol, atol)

    trajectory = Trajectory(N=p0.N, order=s, hbar=p0.hbar, layout=layout, times=times, states=states)
    record_invariants(trajectory, energy, default_casimirs(p0.N, s) if casimirs is None else casimirs)
    return trajectory


def record_invariants(
    trajectory: Trajectory, energy: Optional[MomentExpression], casimirs: Mapping[str, Casimir]
) -> None:
    points = trajectory.points
    if energy is not None:
        trajectory.energy = np.array([energy.evaluate(p) for p in points])
    for name, function in casimirs.items():
        values = []
        for point in points:
            try:
                values.append(float(function(point)))
            except (ArithmeticError, ValueError, ChartDomainError) as exc:
                logger.debug("Casimir %s undefined at t: %s", name, exc)
                values.append(float("nan"))
        trajectory.casimirs[name] = np.array(values)


def integrate_in_chart(
    chart: MomentChart,
    heff: MomentExpression,
    coordinates: Coordinates,
    basic: Sequence[float] = (),
    t_final: float = 1.0,
    steps: int = 100,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> Trajectory:
    """Hamilton's equations in canonical chart coordinates, mapped back to moments.

    Basic variables and the chart pairs (s_α, p_α) evolve canonically; the
    chart Casimirs are constants and are recorded as such.
    """
    N, s = chart.N, chart.order
    coords = chart.check_domain(coordinates)
    basic = tuple(basic) or (0.0,) * (2 * N)
    if len(basic) != 2 * N:
        raise DimensionMismatchError(f"expected {2 * N} basic values, got {len(basic)}")

    hamiltonian = heff.to_sympy(hbar=chart.hbar).subs(chart.substitutions())
    q = [basic_symbol(v) for v in basic_variables(N)[:N]]
    pi = [basic_symbol(v) for v in basic_variables(N)[N:]]
    s_symbols = [chart.symbols[name] for name in chart.canonical_names]
    p_symbols = [chart.symbols[name] for name in chart.momentum_names]
    u_symbols = [chart.symbols[name] for name in chart.casimir_names]
    positions, momenta = q + s_symbols, pi + p_symbols
    variables = positions + momenta
    derivatives = [sympy.diff(hamiltonian, p) for p in momenta] + [-sympy.diff(hamiltonian, x) for x in positions]
    rhs = sympy.lambdify(variables + u_symbols, derivatives, "numpy")
    casimir_values = [coords[name] for name in chart.casimir_names]
    checked = _checked(rhs)

    def field(t: float, y: np.ndarray) -> np.ndarray:
        return checked(t, np.concatenate([y, casimir_values]))

    y0 = np.array(
        list(basic[:N]) + [coords[n] for n in chart.canonical_names] + list(basic[N:]) + [coords[n] for n in chart.momentum_names]
    )
    times = _time_grid(t_final, steps)
    logger.info("integrating %s chart dynamics to t=%g", chart.name, t_final)
    states = _solve(field, y0, times, rtol, atol)

    k = len(chart.canonical_names)
    points: List[PhasePoint] = []
    for row in states:
        values = dict(zip(chart.canonical_names, row[N : N + k]))
        values.update(zip(chart.momentum_names, row[2 * N + k :]))
        values.update(zip(chart.casimir_names, casimir_values))
        points.append(chart.to_point(values, basic=tuple(row[:N]) + tuple(row[N + k : 2 * N + k])))

    layout = coordinate_layout(N, s)
    trajectory = Trajectory(
        N=N,
        order=s,
        hbar=chart.hbar,
        layout=layout,
        times=times,
        states=np.array([p.as_vector() for p in points]),
        energy=np.array([heff.evaluate(p) for p in points]),
    )
    for name, value in zip(chart.casimir_names, casimir_values):
        trajectory.casimirs[name] = np.full(len(times), value)
    return trajectory


def harmonic_closed_form(p0: PhasePoint, times: Sequence[float], mass: float = 1.0, omega: float = 1.0) -> Trajectory:
    """Exact second-order evolution under Σ_j π_j²/2m + mω²q_j²/2.

    The flow is linear, x(t) = M(t)x, so the covariance transforms as
    Δ(t) = M Δ Mᵀ. ``omega = 0`` gives the free particle.
    """
    N = p0.N
    times = np.asarray(times, dtype=float)
    layout = coordinate_layout(N, 2)
    centre = np.array(p0.basic)
    covariance = np.zeros((2 * N, 2 * N))
    for idx in enumerate_moments(N, 2):
        i, j = moment_pair(idx)
        covariance[i, j] = covariance[j, i] = p0.value(idx)

    rows = []
    for t in times:
        if omega:
            c, sn = np.cos(omega * t), np.sin(omega * t)
            block = np.array([[c, sn / (mass * omega)], [-mass * omega * sn, c]])
        else:
            block = np.array([[1.0, t / mass], [0.0, 1.0]])
        M = np.kron(block, np.eye(N))
        mean = M @ centre
        cov = M @ covariance @ M.T
        row = []
        for factor in layout:
            if isinstance(factor, BasicVariable):
                row.append(mean[factor.position(N)])
            else:
                i, j = moment_pair(factor)
                row.append(cov[i, j])
        rows.append(row)
    return Trajectory(N=N, order=2, hbar=p0.hbar, layout=layout, times=times, states=np.array(rows))

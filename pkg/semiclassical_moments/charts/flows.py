"""Hamiltonian flows generated by moment functions on P_s."""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
import sympy
from scipy.integrate import solve_ivp

from ..brackets import Bracketable, bracket_truncated, poisson_tensor
from ..exceptions import DimensionMismatchError, IntegrationError
from ..moments import MomentExpression, PhasePoint, coordinate_layout, hbar_symbol, symbol_for

logger = logging.getLogger(__name__)

Generator = Union[MomentExpression, sympy.Expr]

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12


@dataclass
class FlowResult:
    generator: str
    times: np.ndarray
    points: List[PhasePoint]
    conserved: Dict[str, np.ndarray] = field(default_factory=dict)

    def series(self, factor) -> np.ndarray:
        return np.array([p.value(factor) for p in self.points])

    def drift(self, name: str) -> float:
        values = self.conserved[name]
        return float(np.max(np.abs(values - values[0]), initial=0.0))


def as_sympy(expression: Generator) -> sympy.Expr:
    if isinstance(expression, MomentExpression):
        return expression.to_sympy()
    return sympy.sympify(expression)


def flow_equations(G: Generator, N: int, s: int) -> List[sympy.Expr]:
    """dx_i/dt = {x_i, G} over the canonical coordinate layout."""
    layout = coordinate_layout(N, s)
    symbols = [symbol_for(f) for f in layout]
    tensor = poisson_tensor(N, s)
    generator = as_sympy(G)
    gradient = [sympy.diff(generator, x) for x in symbols]
    return [
        sum((tensor[i, j] * gradient[j] for j in range(len(symbols)) if gradient[j] != 0 and tensor[i, j] != 0), sympy.Integer(0))
        for i in range(len(symbols))
    ]


def flow(
    G: Generator,
    p0: PhasePoint,
    t_final: float,
    steps: int = 100,
    s: Optional[int] = None,
    conserved: Optional[Mapping[str, Generator]] = None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> FlowResult:
    s = s or p0.order
    if s > p0.order:
        raise DimensionMismatchError(f"point of order {p0.order} cannot carry a flow truncated at {s}")
    if steps < 1:
        raise ValueError("steps must be positive")
    layout = coordinate_layout(p0.N, s)
    symbols = [symbol_for(f) for f in layout]
    h = hbar_symbol()
    rhs = [e.subs(h, p0.hbar) for e in flow_equations(G, p0.N, s)]
    rhs_fn = sympy.lambdify(symbols, rhs, "numpy")

    def vector_field(_t: float, y: np.ndarray) -> np.ndarray:
        return np.array(rhs_fn(*y), dtype=float)

    y0 = np.array([p0.value(f) for f in layout])
    if t_final == 0:
        times = np.zeros(1)
        solution_y = y0[:, None]
    else:
        times = np.linspace(0.0, t_final, steps + 1)
        solution = solve_ivp(vector_field, (0.0, t_final), y0, method="DOP853", t_eval=times, rtol=rtol, atol=atol)
        if not solution.success:
            logger.error("flow of %s failed: %s", G, solution.message)
            raise IntegrationError(f"flow integration failed: {solution.message}", time=float(solution.t[-1]), state=solution.y[:, -1])
        solution_y = solution.y

    points = [PhasePoint.from_vector(p0.N, s, p0.hbar, solution_y[:, n]) for n in range(len(times))]
    result = FlowResult(generator=str(G), times=times, points=points)
    for name, function in (conserved or {}).items():
        fn = sympy.lambdify(symbols, as_sympy(function).subs(h, p0.hbar), "numpy")
        result.conserved[name] = np.array([float(fn(*solution_y[:, n])) for n in range(len(times))])
    return result


def dirac_observable_defect(F: Bracketable, generators: Sequence[Bracketable], p: PhasePoint, s: int) -> float:
    """max_G |{F, G}(p)|"""
    return max(
        (abs(bracket_truncated(F, G, p.N, s).evaluate(p)) for G in generators),
        default=0.0,
    )

from typing import Callable, Dict, List, Optional

from .base import BaseChart, Chart, MomentChart
from .flows import FlowResult, dirac_observable_defect, flow, flow_equations
from .lie_algebras import LieAlgebraChart, Su2Chart, Su11Chart, su11_casimir
from .second_order import (
    N1S2Chart,
    N2S2Chart,
    QuadraticChart,
    parameter_free_moments,
    quadratic_to_parameter_free,
)
from .third_order import (
    PRINTED_VARIANT,
    N1S3Chart,
    ThirdOrderVariant,
    adjudicate_third_order_variant,
    quartic_casimir,
    quartic_casimir_expression,
    third_order_action_matrices,
)
from .verification import DEFAULT_VERIFY_TOL, jacobian_rank, verify_chart, verify_chart_samples


def chart_n1s2(hbar: float = 1.0) -> N1S2Chart:
    return N1S2Chart(hbar)


def chart_n2s2(hbar: float = 1.0) -> N2S2Chart:
    return N2S2Chart(hbar)


def chart_n1s3(hbar: float = 1.0, variant: ThirdOrderVariant = ThirdOrderVariant()) -> N1S3Chart:
    return N1S3Chart(hbar, variant)


def chart_n2s2_quadratic(hbar: float = 1.0) -> QuadraticChart:
    return QuadraticChart(hbar)


def chart_su2() -> Su2Chart:
    return Su2Chart()


def chart_su11() -> Su11Chart:
    return Su11Chart()


CHARTS: Dict[str, Callable[[], BaseChart]] = {
    "n1s2": chart_n1s2,
    "n2s2": chart_n2s2,
    "n1s3": chart_n1s3,
    "n2s2-quadratic": chart_n2s2_quadratic,
    "su2": chart_su2,
    "su11": chart_su11,
}


def chart_names() -> List[str]:
    return list(CHARTS)


MOMENT_CHARTS = ("n1s2", "n2s2", "n1s3", "n2s2-quadratic")


def get_chart(name: str, hbar: Optional[float] = None) -> BaseChart:
    try:
        factory = CHARTS[name]
    except KeyError:
        raise KeyError(f"unknown chart {name!r}; available: {', '.join(CHARTS)}") from None
    if hbar is not None and name in MOMENT_CHARTS:
        return factory(hbar)  # type: ignore[call-arg]
    return factory()

import logging
from typing import Optional

import numpy as np

from ..brackets import DEFAULT_RANK_TOL, rank_and_kernel
from ..exceptions import ChartDomainError
from ..schemas.reports import ChartReport, ChartSampleSummary
from .base import BaseChart, Coordinates

logger = logging.getLogger(__name__)

DEFAULT_VERIFY_TOL = 1e-9


def _numerical_rank(matrix: np.ndarray, tol: float) -> int:
    singular = np.linalg.svd(matrix, compute_uv=False)
    if not singular.size or singular[0] == 0.0:
        return 0
    return int(np.sum(singular > tol * singular[0]))


def jacobian_rank(chart: BaseChart, coords: Coordinates, tol: float = DEFAULT_RANK_TOL) -> int:
    return _numerical_rank(chart.jacobian(coords), tol)


def verify_chart(
    chart: BaseChart,
    coords: Coordinates,
    tol: float = DEFAULT_VERIFY_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> ChartReport:
    """Compare the canonical bracket pushed through the chart with the target bracket."""
    coords = chart.check_domain(coords)
    targets = chart.forward_vector(coords)
    J = chart.jacobian(coords)
    P = chart.poisson_at(targets)
    omega = chart.canonical_form()

    scale = max(1.0, float(np.max(np.abs(P), initial=0.0)))
    pushforward = float(np.max(np.abs(J @ omega @ J.T - P), initial=0.0)) / scale

    rank_j = _numerical_rank(J, rank_tol)
    rank_p = rank_and_kernel(P, rank_tol)[0]
    expected_j = chart.canonical_dim + chart.casimir_count
    expected_p = chart.canonical_dim
    faithful = rank_j == expected_j and rank_p == expected_p

    canonical_defect: Optional[float] = None
    casimir_defect: Optional[float] = None
    if faithful and J.shape[0] == J.shape[1]:
        # J⁻¹ P J⁻ᵀ
        pulled = np.linalg.solve(J, np.linalg.solve(J, P).T).T
        n = chart.canonical_dim
        canonical_defect = float(np.max(np.abs(pulled[:n, :n] - omega[:n, :n]), initial=0.0))
        casimir_defect = float(np.max(np.abs(pulled[n:, :]), initial=0.0))

    round_trip: Optional[float] = None
    if chart.has_inverse:
        try:
            recovered = chart.inverse(dict(zip(chart.target_names, targets)))
            round_trip = max(
                abs(recovered[name] - value) / max(1.0, abs(value)) for name, value in coords.items()
            )
        except ChartDomainError as exc:
            logger.debug("inverse of %s failed at %s: %s", chart.name, coords, exc)
            round_trip = float("inf")

    defects = [pushforward] + [d for d in (canonical_defect, casimir_defect, round_trip) if d is not None]
    if any(not d <= tol for d in defects) or (chart.faithful and not faithful):
        status = "fail"
    elif not faithful:
        status = f"non-faithful: jacobian rank {rank_j}"
    else:
        status = "pass"

    return ChartReport(
        chart=chart.name,
        coordinates=coords,
        tolerance=tol,
        pushforward_defect=pushforward,
        canonical_defect=canonical_defect,
        casimir_defect=casimir_defect,
        round_trip_defect=round_trip,
        jacobian_rank=rank_j,
        poisson_rank=rank_p,
        expected_jacobian_rank=expected_j,
        expected_poisson_rank=expected_p,
        faithful=faithful,
        status=status,
    )


def verify_chart_samples(
    chart: BaseChart,
    samples: int = 100,
    seed: int = 0,
    tol: float = DEFAULT_VERIFY_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> ChartSampleSummary:
    rng = np.random.default_rng(seed)
    reports = [verify_chart(chart, chart.sample(rng), tol, rank_tol) for _ in range(samples)]

    def worst(field: str) -> Optional[float]:
        values = [getattr(r, field) for r in reports if getattr(r, field) is not None]
        return max(values) if values else None

    summary = ChartSampleSummary(
        chart=chart.name,
        samples=samples,
        seed=seed,
        tolerance=tol,
        max_pushforward_defect=worst("pushforward_defect") or 0.0,
        max_canonical_defect=worst("canonical_defect"),
        max_casimir_defect=worst("casimir_defect"),
        max_round_trip_defect=worst("round_trip_defect"),
        jacobian_ranks=sorted({r.jacobian_rank for r in reports}),
        statuses=sorted({r.status for r in reports}),
        reports=reports,
    )
    failures = sum(1 for r in reports if not r.passed)
    if failures:
        logger.info("%s: %d of %d samples failed verification", chart.name, failures, samples)
    return summary

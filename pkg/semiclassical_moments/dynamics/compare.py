import logging
from typing import Optional, Sequence

import numpy as np

from ..schemas.reports import ComparisonReport
from .trajectory import Trajectory

logger = logging.getLogger(__name__)


def compare(
    trajectory: Trajectory, reference: Trajectory, quantities: Optional[Sequence[str]] = None
) -> ComparisonReport:
    """Errors of ``trajectory`` against ``reference`` on their common time window.

    The reference is linearly interpolated onto the trajectory's times;
    ``quantities`` default to the columns both trajectories carry.
    """
    if quantities is None:
        quantities = [name for name in trajectory.columns if name in reference.columns]
    missing = [name for name in quantities if name not in trajectory.columns or name not in reference.columns]
    if missing:
        raise KeyError(f"quantities {missing} are not carried by both trajectories")

    t_start = max(trajectory.times[0], reference.times[0])
    t_end = min(trajectory.times[-1], reference.times[-1])
    mask = (trajectory.times >= t_start) & (trajectory.times <= t_end)
    if not np.any(mask):
        raise ValueError(f"trajectories do not overlap in time ([{t_start}, {t_end}])")
    times = trajectory.times[mask]

    max_abs, rms = {}, {}
    for name in quantities:
        reference_values = np.interp(times, reference.times, reference.series(name))
        error = trajectory.series(name)[mask] - reference_values
        max_abs[name] = float(np.max(np.abs(error)))
        rms[name] = float(np.sqrt(np.mean(error**2)))
    logger.debug("compared %d quantities on %d times", len(quantities), len(times))
    return ComparisonReport(
        quantities=list(quantities),
        max_abs_error=max_abs,
        rms_error=rms,
        t_start=float(t_start),
        t_end=float(t_end),
    )

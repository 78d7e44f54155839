import csv
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Sequence, TextIO

import numpy as np

from ..moments import BasicVariable, Factor, MomentIndex, PhasePoint, _pair_indices
from ..schemas.reports import DriftReport

logger = logging.getLogger(__name__)


def column_name(factor: Factor, N: int) -> str:
    if isinstance(factor, BasicVariable):
        return ("pi" if factor.momentum else "q") if N == 1 else factor.name
    return str(factor)


@dataclass
class Trajectory:
    N: int
    order: int
    hbar: float
    layout: List[Factor]
    times: np.ndarray
    states: np.ndarray
    energy: np.ndarray = field(default_factory=lambda: np.zeros(0))
    casimirs: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        if self.states.shape != (len(self.times), len(self.layout)):
            raise ValueError(f"states of shape {self.states.shape} do not match {len(self.times)} times × {len(self.layout)}")
        steps = np.diff(self.times)
        if steps.size and not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValueError("trajectory times must be strictly monotonic")

    def __len__(self) -> int:
        return len(self.times)

    @property
    def columns(self) -> List[str]:
        return [column_name(f, self.N) for f in self.layout]

    def index(self, factor) -> int:
        if isinstance(factor, str):
            return self.columns.index(factor)
        return self.layout.index(factor)

    def series(self, factor) -> np.ndarray:
        return self.states[:, self.index(factor)]

    def point(self, n: int) -> PhasePoint:
        basic = [self.states[n, i] for i, f in enumerate(self.layout) if isinstance(f, BasicVariable)]
        moments = {f: self.states[n, i] for i, f in enumerate(self.layout) if isinstance(f, MomentIndex)}
        return PhasePoint(N=self.N, order=self.order, hbar=self.hbar, basic=basic, moments=moments)

    @property
    def points(self) -> List[PhasePoint]:
        return [self.point(n) for n in range(len(self))]

    def header(self) -> List[str]:
        extra = ["energy"] if self.energy.size else []
        return ["t"] + self.columns + extra + list(self.casimirs)

    def to_csv_rows(self) -> Iterator[List[str]]:
        yield self.header()
        for n, t in enumerate(self.times):
            values = [t] + list(self.states[n])
            if self.energy.size:
                values.append(self.energy[n])
            values += [series[n] for series in self.casimirs.values()]
            yield ["%.17g" % v for v in values]

    def write_csv(self, stream: TextIO) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerows(self.to_csv_rows())

    def drift(self, name: str, values: np.ndarray) -> DriftReport:
        initial = float(values[0]) if values.size else float("nan")
        absolute = float(np.max(np.abs(values - initial), initial=0.0))
        return DriftReport(
            name=name,
            initial=initial,
            max_abs_drift=absolute,
            max_rel_drift=absolute / max(abs(initial), np.finfo(float).tiny),
        )

    def energy_drift(self) -> DriftReport:
        return self.drift("energy", self.energy)

    def casimir_drifts(self) -> List[DriftReport]:
        return [self.drift(name, values) for name, values in self.casimirs.items()]

    def uncertainty_products(self) -> np.ndarray:
        """Smallest Δ(q_j²)Δ(π_j²) − Δ(q_jπ_j)² over pairs at each time."""
        products = []
        for j in range(self.N):
            qq, qp, pp = (self.series(idx) for idx in _pair_indices(self.N, j))
            products.append(qq * pp - qp * qp)
        return np.min(np.array(products), axis=0)

    def min_uncertainty_product(self) -> float:
        return float(np.min(self.uncertainty_products()))


def from_points(points: Sequence[PhasePoint], times: Sequence[float]) -> Trajectory:
    first = points[0]
    layout = first.layout
    states = np.array([p.as_vector() for p in points])
    return Trajectory(N=first.N, order=first.order, hbar=first.hbar, layout=layout, times=np.asarray(times), states=states)

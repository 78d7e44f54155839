import logging
from abc import ABC, abstractmethod
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from ..brackets import poisson_tensor
from ..exceptions import ChartDomainError, DimensionMismatchError, MissingInverseError
from ..moments import MomentIndex, PhasePoint, enumerate_moments, hbar_symbol, moment_symbol

logger = logging.getLogger(__name__)

Coordinates = Union[Mapping[str, float], Sequence[float]]


class BaseChart(ABC):
    """Canonical realization (s_α, p_β, U_γ) → target coordinates.

    Subclasses give the forward map as sympy expressions in the coordinate
    symbols, the target Poisson tensor, the domain and a sampler.
    """

    name: str = ""
    N: int = 1
    order: int = 2
    faithful: bool = True
    canonical_names: Tuple[str, ...] = ()
    momentum_names: Tuple[str, ...] = ()
    casimir_names: Tuple[str, ...] = ()
    description: str = ""

    @property
    def canonical_dim(self) -> int:
        return 2 * len(self.canonical_names)

    @property
    def casimir_count(self) -> int:
        return len(self.casimir_names)

    @property
    def coordinate_names(self) -> List[str]:
        return list(self.canonical_names + self.momentum_names + self.casimir_names)

    @cached_property
    def symbols(self) -> Dict[str, sympy.Symbol]:
        return {name: sympy.Symbol(name, real=True) for name in self.coordinate_names}

    @property
    def coordinate_symbols(self) -> List[sympy.Symbol]:
        return [self.symbols[name] for name in self.coordinate_names]

    @property
    @abstractmethod
    def target_names(self) -> List[str]:
        raise NotImplementedError

    @property
    @abstractmethod
    def target_symbols(self) -> List[sympy.Symbol]:
        raise NotImplementedError

    @abstractmethod
    def forward_expressions(self) -> List[sympy.Expr]:
        raise NotImplementedError

    @abstractmethod
    def target_poisson(self) -> sympy.Matrix:
        raise NotImplementedError

    @abstractmethod
    def domain_violations(self, coords: Mapping[str, float]) -> List[str]:
        raise NotImplementedError

    @abstractmethod
    def sample(self, rng: np.random.Generator) -> Dict[str, float]:
        raise NotImplementedError

    def _inverse(self, targets: Mapping[str, float]) -> Dict[str, float]:
        raise MissingInverseError(f"chart {self.name} has no inverse map")

    @property
    def has_inverse(self) -> bool:
        return type(self)._inverse is not BaseChart._inverse

    @cached_property
    def _forward_fn(self):
        return sympy.lambdify(self.coordinate_symbols, self.forward_expressions(), "numpy")

    @cached_property
    def jacobian_expressions(self) -> sympy.Matrix:
        return sympy.Matrix(self.forward_expressions()).jacobian(self.coordinate_symbols)

    @cached_property
    def _jacobian_fn(self):
        return sympy.lambdify(self.coordinate_symbols, self.jacobian_expressions, "numpy")

    @cached_property
    def _poisson_fn(self):
        return sympy.lambdify(self.target_symbols, self.target_poisson(), "numpy")

    def coordinates(self, values: Coordinates) -> Dict[str, float]:
        names = self.coordinate_names
        if isinstance(values, Mapping):
            unknown = sorted(set(values) - set(names))
            missing = [name for name in names if name not in values]
            if unknown or missing:
                raise DimensionMismatchError(
                    f"chart {self.name} expects {names}; missing {missing}, unknown {unknown}"
                )
            return {name: float(values[name]) for name in names}
        values = list(values)
        if len(values) != len(names):
            raise DimensionMismatchError(f"chart {self.name} expects {len(names)} coordinates, got {len(values)}")
        return {name: float(value) for name, value in zip(names, values)}

    def check_domain(self, values: Coordinates) -> Dict[str, float]:
        coords = self.coordinates(values)
        violations = self.domain_violations(coords)
        if violations:
            raise ChartDomainError(self.name, violations)
        return coords

    def _ordered(self, coords: Mapping[str, float]) -> List[float]:
        return [coords[name] for name in self.coordinate_names]

    def forward_vector(self, values: Coordinates) -> np.ndarray:
        coords = self.check_domain(values)
        return np.array(self._forward_fn(*self._ordered(coords)), dtype=float)

    def forward(self, values: Coordinates) -> Dict[str, float]:
        return dict(zip(self.target_names, self.forward_vector(values)))

    def jacobian(self, values: Coordinates) -> np.ndarray:
        coords = self.check_domain(values)
        return np.array(self._jacobian_fn(*self._ordered(coords)), dtype=float)

    def poisson_at(self, target_values: Sequence[float]) -> np.ndarray:
        return np.array(self._poisson_fn(*target_values), dtype=float)

    def inverse(self, targets: Union[Mapping[str, float], Sequence[float]]) -> Dict[str, float]:
        if not isinstance(targets, Mapping):
            targets = dict(zip(self.target_names, targets))
        missing = [name for name in self.target_names if name not in targets]
        if missing:
            raise DimensionMismatchError(f"chart {self.name} inverse lacks {missing}")
        return self._inverse({name: float(targets[name]) for name in self.target_names})

    def canonical_form(self) -> np.ndarray:
        """Ω over (s…, p…, U…)."""
        n = len(self.canonical_names)
        size = len(self.coordinate_names)
        omega = np.zeros((size, size))
        omega[:n, n : 2 * n] = np.eye(n)
        omega[n : 2 * n, :n] = -np.eye(n)
        return omega

    def describe(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "N": self.N,
            "order": self.order,
            "canonical_dim": self.canonical_dim,
            "casimir_count": self.casimir_count,
            "faithful": self.faithful,
            "coordinates": self.coordinate_names,
            "inverse": self.has_inverse,
            "description": self.description,
        }


Chart = BaseChart


class MomentChart(BaseChart):
    """Chart whose targets are the central moments of P_s."""

    def __init__(self, hbar: float = 1.0) -> None:
        if hbar <= 0:
            raise ValueError(f"hbar must be positive, got {hbar}")
        self.hbar = float(hbar)

    @property
    def target_layout(self) -> List[MomentIndex]:
        return enumerate_moments(self.N, self.order)

    @property
    def target_names(self) -> List[str]:
        return [str(idx) for idx in self.target_layout]

    @property
    def target_symbols(self) -> List[sympy.Symbol]:
        return [moment_symbol(idx) for idx in self.target_layout]

    @abstractmethod
    def forward_moments(self) -> Dict[MomentIndex, sympy.Expr]:
        raise NotImplementedError

    def forward_expressions(self) -> List[sympy.Expr]:
        moments = self.forward_moments()
        return [sympy.sympify(moments[idx]) for idx in self.target_layout]

    def target_poisson(self) -> sympy.Matrix:
        return sympy.Matrix(poisson_tensor(self.N, self.order, include_basic=False)).subs(hbar_symbol(), self.hbar)

    def substitutions(self) -> Dict[sympy.Symbol, sympy.Expr]:
        """Moment symbols in terms of chart coordinates."""
        return dict(zip(self.target_symbols, self.forward_expressions()))

    def to_point(self, values: Coordinates, basic: Sequence[float] = (), hbar: Optional[float] = None) -> PhasePoint:
        moments = dict(zip(self.target_layout, self.forward_vector(values)))
        return PhasePoint(
            N=self.N,
            order=self.order,
            hbar=self.hbar if hbar is None else hbar,
            basic=tuple(basic),
            moments=moments,
        )

    def from_point(self, point: PhasePoint) -> Dict[str, float]:
        if point.N != self.N:
            raise DimensionMismatchError(f"chart {self.name} needs N={self.N}, got N={point.N}")
        return self.inverse({str(idx): point.value(idx) for idx in self.target_layout})


def require(condition: bool, message: str, violations: List[str]) -> None:
    if not condition:
        violations.append(message)

import logging
import math
from typing import Dict, List, Mapping

import numpy as np
import sympy

from ..exceptions import ChartDomainError
from .base import BaseChart, require

logger = logging.getLogger(__name__)


class LieAlgebraChart(BaseChart):
    """Chart onto the generators of a three-dimensional Lie algebra."""

    generator_names: tuple = ()
    # {g_i, g_j} = Σ_k structure[i][j][k] g_k
    structure: tuple = ()

    @property
    def target_names(self) -> List[str]:
        return list(self.generator_names)

    @property
    def target_symbols(self) -> List[sympy.Symbol]:
        return [sympy.Symbol(name, real=True) for name in self.generator_names]

    def target_poisson(self) -> sympy.Matrix:
        generators = self.target_symbols
        size = len(generators)
        return sympy.Matrix(
            size,
            size,
            lambda i, j: sum(c * g for c, g in zip(self.structure[i][j], generators)),
        )


class Su2Chart(LieAlgebraChart):
    name = "su2"
    N = 1
    order = 2
    canonical_names = ("phi",)
    momentum_names = ("Sz",)
    casimir_names = ("S2",)
    generator_names = ("Sx", "Sy", "Sz")
    structure = (
        ((0, 0, 0), (0, 0, 1), (0, -1, 0)),
        ((0, 0, -1), (0, 0, 0), (1, 0, 0)),
        ((0, 1, 0), (-1, 0, 0), (0, 0, 0)),
    )
    description = "su(2): Sx=√(S²−Sz²)cos φ, Sy=√(S²−Sz²)sin φ, Casimir S2=S²"

    def forward_expressions(self) -> List[sympy.Expr]:
        phi, Sz, S2 = self.coordinate_symbols
        radius = sympy.sqrt(S2 - Sz**2)
        return [radius * sympy.cos(phi), radius * sympy.sin(phi), Sz]

    def domain_violations(self, coords: Mapping[str, float]) -> List[str]:
        violations: List[str] = []
        require(coords["S2"] > coords["Sz"] ** 2, "S2 must exceed Sz^2", violations)
        return violations

    def sample(self, rng: np.random.Generator) -> Dict[str, float]:
        Sz = rng.uniform(-1.0, 1.0)
        return {"phi": rng.uniform(-math.pi + 0.1, math.pi - 0.1), "Sz": Sz, "S2": Sz**2 + rng.uniform(0.5, 2.0)}

    def _inverse(self, targets: Mapping[str, float]) -> Dict[str, float]:
        Sx, Sy, Sz = targets["Sx"], targets["Sy"], targets["Sz"]
        if Sx == 0 and Sy == 0:
            raise ChartDomainError(self.name, ["S2 = Sz^2 is a coordinate singularity"])
        return {"phi": math.atan2(Sy, Sx), "Sz": Sz, "S2": Sx * Sx + Sy * Sy + Sz * Sz}


class Su11Chart(LieAlgebraChart):
    name = "su11"
    N = 1
    order = 2
    canonical_names = ("s",)
    momentum_names = ("p",)
    casimir_names = ("k",)
    generator_names = ("K0", "K1", "K2")
    structure = (
        ((0, 0, 0), (0, 0, -1), (0, 1, 0)),
        ((0, 0, 1), (0, 0, 0), (1, 0, 0)),
        ((0, -1, 0), (-1, 0, 0), (0, 0, 0)),
    )
    description = "su(1,1): K0=k+(s²+p²)/2, K1=sR/2, K2=pR/2 with R=√(4k+s²+p²); Casimir −k²"

    def forward_expressions(self) -> List[sympy.Expr]:
        s, p, k = self.coordinate_symbols
        radius = sympy.sqrt(4 * k + s**2 + p**2)
        return [k + (s**2 + p**2) / 2, s * radius / 2, p * radius / 2]

    def domain_violations(self, coords: Mapping[str, float]) -> List[str]:
        violations: List[str] = []
        require(4 * coords["k"] + coords["s"] ** 2 + coords["p"] ** 2 > 0, "4k + s^2 + p^2 must be positive", violations)
        return violations

    def sample(self, rng: np.random.Generator) -> Dict[str, float]:
        return {"s": rng.uniform(-1.0, 1.0), "p": rng.uniform(-1.0, 1.0), "k": rng.uniform(0.2, 2.0)}

    def _inverse(self, targets: Mapping[str, float]) -> Dict[str, float]:
        K0, K1, K2 = targets["K0"], targets["K1"], targets["K2"]
        invariant = K0 * K0 - K1 * K1 - K2 * K2
        if invariant < 0 or K0 <= 0:
            raise ChartDomainError(self.name, ["K0^2 - K1^2 - K2^2 must be non-negative with K0 > 0"])
        k = math.sqrt(invariant)
        radius = math.sqrt(2 * K0 + 2 * k)
        return {"s": 2 * K1 / radius, "p": 2 * K2 / radius, "k": k}


def su11_casimir(K0: float, K1: float, K2: float) -> float:
    return K1 * K1 + K2 * K2 - K0 * K0

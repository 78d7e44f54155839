"""Second-order charts: one pair, two pairs, and the quadratic-in-momenta form."""
import logging
import math
from typing import Dict, List, Mapping

import numpy as np
import sympy

from ..exceptions import ChartDomainError
from ..moments import MomentIndex
from .base import MomentChart, require

logger = logging.getLogger(__name__)


def _moment(N: int, q=(), pi=()) -> MomentIndex:
    k = [0] * N
    l = [0] * N
    for j in q:
        k[j] += 1
    for j in pi:
        l[j] += 1
    return MomentIndex(tuple(k), tuple(l))


class N1S2Chart(MomentChart):
    name = "n1s2"
    N = 1
    order = 2
    canonical_names = ("s",)
    momentum_names = ("ps",)
    casimir_names = ("U",)
    description = "single pair, second order: Δ(q²)=s², Δ(qπ)=s·ps, Δ(π²)=ps²+U/s²"

    def forward_moments(self) -> Dict[MomentIndex, sympy.Expr]:
        s, ps, U = self.coordinate_symbols
        return {
            MomentIndex.single(2, 0): s**2,
            MomentIndex.single(1, 1): s * ps,
            MomentIndex.single(0, 2): ps**2 + U / s**2,
        }

    def domain_violations(self, coords: Mapping[str, float]) -> List[str]:
        violations: List[str] = []
        require(coords["s"] > 0, "s must be positive", violations)
        return violations

    def sample(self, rng: np.random.Generator) -> Dict[str, float]:
        return {
            "s": rng.uniform(0.5, 2.0),
            "ps": rng.uniform(-1.0, 1.0),
            "U": rng.uniform(self.hbar**2 / 4, 2.0 + self.hbar**2 / 4),
        }

    def _inverse(self, targets: Mapping[str, float]) -> Dict[str, float]:
        qq, qp, pp = (targets[name] for name in self.target_names)
        if qq <= 0:
            raise ChartDomainError(self.name, ["Δ(q²) must be positive"])
        s = math.sqrt(qq)
        return {"s": s, "ps": qp / s, "U": qq * pp - qp * qp}


class N2S2Chart(MomentChart):
    name = "n2s2"
    N = 2
    order = 2
    canonical_names = ("s1", "s2", "s3", "s4")
    momentum_names = ("p1", "p2", "p3", "p4")
    casimir_names = ("U1", "U2")
    description = "two pairs, second order, faithful with Casimirs U1, U2"

    def _amplitude(self) -> sympy.Expr:
        p4 = self.symbols["p4"]
        U1, U2 = self.symbols["U1"], self.symbols["U2"]
        return sympy.sqrt(U2 - 8 * p4**2 * U1 + 16 * p4**4)

    def _phi(self, sign: int) -> sympy.Expr:
        # sign=+1 gives Φ (first pair), sign=-1 gives Γ (second pair)
        s3, s4, p3, p4, U1 = (self.symbols[n] for n in ("s3", "s4", "p3", "p4", "U1"))
        root = sympy.sqrt(s3 - 1)
        return (
            -(s3 + 1) / (s3 - 1) * p4**2
            - sign * 4 * s3 * root * p3 * p4
            + 4 * s3**2 * (s3 - 1) * p3**2
            + sympy.Rational(1, 2) * s3 / (s3 - 1) * U1
            - sympy.Rational(1, 2)
            * sympy.sqrt(s3)
            / (s3 - 1)
            * self._amplitude()
            * (sign * root * sympy.cos(s4) + sympy.sin(s4))
        )

    def forward_moments(self) -> Dict[MomentIndex, sympy.Expr]:
        s1, s2, s3, s4, p1, p2, p3, p4, U1, U2 = self.coordinate_symbols
        root3 = sympy.sqrt(s3)
        ratio = sympy.sqrt((s3 - 1) / s3)
        N = self.N
        pi1pi2 = (
            p1 * p2 / root3
            + ratio * (p2 / s1 - p1 / s2) * p4
            - 2 * root3 * (s3 - 1) * (p1 / s2 + p2 / s1) * p3
            + (3 * s3 - 1) / (s1 * s2 * root3 * (s3 - 1)) * p4**2
            - 4 * (s3 - 1) * s3 ** sympy.Rational(3, 2) / (s1 * s2) * p3**2
            - root3 / (2 * s1 * s2 * (s3 - 1)) * U1
            + s3 / (2 * s1 * s2 * (s3 - 1)) * sympy.sin(s4) * self._amplitude()
        )
        return {
            _moment(N, q=(0, 0)): s1**2,
            _moment(N, q=(0,), pi=(0,)): s1 * p1,
            _moment(N, pi=(0, 0)): p1**2 + self._phi(1) / s1**2,
            _moment(N, q=(1, 1)): s2**2,
            _moment(N, q=(1,), pi=(1,)): s2 * p2,
            _moment(N, pi=(1, 1)): p2**2 + self._phi(-1) / s2**2,
            _moment(N, pi=(0, 1)): pi1pi2,
            _moment(N, q=(0,), pi=(1,)): p2 * s1 / root3 - ratio * s1 / s2 * p4 - 2 * (s3 - 1) * root3 * s1 / s2 * p3,
            _moment(N, q=(1,), pi=(0,)): p1 * s2 / root3 + ratio * s2 / s1 * p4 - 2 * (s3 - 1) * root3 * s2 / s1 * p3,
            _moment(N, q=(0, 1)): s1 * s2 / root3,
        }

    def domain_violations(self, coords: Mapping[str, float]) -> List[str]:
        violations: List[str] = []
        require(coords["s1"] > 0, "s1 must be positive", violations)
        require(coords["s2"] > 0, "s2 must be positive", violations)
        require(coords["s3"] > 1, "s3 must exceed 1", violations)
        p4 = coords["p4"]
        radicand = coords["U2"] - 8 * p4**2 * coords["U1"] + 16 * p4**4
        require(radicand >= 0, "U2 - 8 p4^2 U1 + 16 p4^4 must be non-negative", violations)
        return violations

    def sample(self, rng: np.random.Generator) -> Dict[str, float]:
        U1 = rng.uniform(0.5, 2.0)
        p4 = rng.uniform(-0.5, 0.5)
        amplitude = rng.uniform(0.2, 2.0)
        return {
            "s1": rng.uniform(0.5, 2.0),
            "s2": rng.uniform(0.5, 2.0),
            "s3": rng.uniform(1.2, 3.0),
            "s4": rng.uniform(-math.pi + 0.1, math.pi - 0.1),
            "p1": rng.uniform(-1.0, 1.0),
            "p2": rng.uniform(-1.0, 1.0),
            "p3": rng.uniform(-1.0, 1.0),
            "p4": p4,
            "U1": U1,
            "U2": amplitude**2 + 8 * p4**2 * U1 - 16 * p4**4,
        }

    def _inverse(self, targets: Mapping[str, float]) -> Dict[str, float]:
        N = self.N

        def d(**kwargs) -> float:
            return targets[str(_moment(N, **kwargs))]

        q1q1, q1p1, p1p1 = d(q=(0, 0)), d(q=(0,), pi=(0,)), d(pi=(0, 0))
        q2q2, q2p2, p2p2 = d(q=(1, 1)), d(q=(1,), pi=(1,)), d(pi=(1, 1))
        q1q2, q1p2, q2p1, p1p2 = d(q=(0, 1)), d(q=(0,), pi=(1,)), d(q=(1,), pi=(0,)), d(pi=(0, 1))

        violations: List[str] = []
        require(q1q1 > 0, "Δ(q1²) must be positive", violations)
        require(q2q2 > 0, "Δ(q2²) must be positive", violations)
        require(q1q2 != 0, "Δ(q1 q2) must not vanish", violations)
        if violations:
            raise ChartDomainError(self.name, violations)

        # Step 1 - first pair and second pair
        s1, s2 = math.sqrt(q1q1), math.sqrt(q2q2)
        p1, p2 = q1p1 / s1, q2p2 / s2

        # Step 2 - functions Poisson commuting with both pairs
        f1 = q1q1 * p1p1 - q1p1**2
        f2 = q2q2 * p2p2 - q2p2**2
        f3 = q1p2 * q2p1 - q1q2 * p1p2
        f4 = q1q1 * q2p1 / q1q2 - q1p1
        f5 = q2q2 * q1p2 / q1q2 - q2p2
        f6 = q1q1 * q2q2 / q1q2**2
        if f6 <= 1:
            raise ChartDomainError(self.name, [f"f6 = {f6:g} must exceed 1"])

        # Step 3 - third pair and the quadratic Casimir
        s3 = f6
        p3 = (f4 + f5) / (4 * s3 * (1 - s3))
        shift = (f4 + f5) ** 2 / (4 * (1 - f6))
        twist = 0.5 * (f4 + f5) * (f4 - f5) / (1 - f6)
        g1 = f1 + shift + twist
        g2 = f2 + shift - twist
        g3 = f3 + shift
        g4 = 0.5 * (f4 - f5)
        U1 = g1 + g2 - 2 * g3

        # Step 4 - fourth pair and the second Casimir
        p4 = g4 / math.sqrt(s3 - 1)
        h2 = (g1 - g2) * math.sqrt((s3 - 1) / s3)
        h3 = ((1 - s3) * (g1 + g2) + s3 * U1 + 2 * (1 + s3) / (1 - s3) * g4**2) / math.sqrt(s3)
        s4 = math.atan2(h3, -h2)
        U2 = h2**2 + h3**2 + 8 * p4**2 * U1 - 16 * p4**4
        return {
            "s1": s1,
            "s2": s2,
            "s3": s3,
            "s4": s4,
            "p1": p1,
            "p2": p2,
            "p3": p3,
            "p4": p4,
            "U1": U1,
            "U2": U2,
        }


def parameter_free_momenta(
    s: List[sympy.Expr], p: List[sympy.Expr], U1: sympy.Expr, U2: sympy.Expr
) -> List[sympy.Expr]:
    """P_i of the canonical transformation (S_i = s_i)."""
    s1, s2, s3, s4 = s
    p1, p2, p3, p4 = p
    return [
        p1 + sympy.Rational(1, 2) * s2 * U1 * (1 / s2**2 - 1 / s1**2),
        p2 + sympy.Rational(1, 2) * s1 * U1 * (1 / s1**2 - 1 / s2**2),
        p3 + sympy.Rational(1, 2) * s4 * U2 * (1 / s4**2 - 1 / s3**2),
        p4 + sympy.Rational(1, 2) * s3 * U2 * (1 / s3**2 - 1 / s4**2),
    ]


def quadratic_to_parameter_free(coords: Mapping[str, float]) -> Dict[str, float]:
    s = [coords[f"s{i}"] for i in range(1, 5)]
    p = [coords[f"p{i}"] for i in range(1, 5)]
    if any(x == 0 for x in s):
        raise ChartDomainError(QuadraticChart.name, ["s1..s4 must not vanish"])
    momenta = parameter_free_momenta(s, p, coords["U1"], coords["U2"])
    result = {f"S{i}": float(s[i - 1]) for i in range(1, 5)}
    result.update({f"P{i}": float(momenta[i - 1]) for i in range(1, 5)})
    return result


def parameter_free_moments(S: List[sympy.Expr], P: List[sympy.Expr], N: int = 2) -> Dict[MomentIndex, sympy.Expr]:
    S1, S2, S3, S4 = S
    P1, P2, P3, P4 = P
    return {
        _moment(N, q=(0, 0)): S1**2 + S3**2,
        _moment(N, q=(0,), pi=(0,)): S1 * P1 + S3 * P3,
        _moment(N, pi=(0, 0)): P1**2 + P3**2,
        _moment(N, q=(1, 1)): S2**2 + S4**2,
        _moment(N, q=(1,), pi=(1,)): S2 * P2 + S4 * P4,
        _moment(N, pi=(1, 1)): P2**2 + P4**2,
        _moment(N, q=(0, 1)): S1 * S2 + S3 * S4,
        _moment(N, q=(0,), pi=(1,)): S1 * P2 + S3 * P4,
        _moment(N, q=(1,), pi=(0,)): S2 * P1 + S4 * P3,
        _moment(N, pi=(0, 1)): P1 * P2 + P3 * P4,
    }


class QuadraticChart(MomentChart):
    name = "n2s2-quadratic"
    N = 2
    order = 2
    faithful = False
    canonical_names = ("s1", "s2", "s3", "s4")
    momentum_names = ("p1", "p2", "p3", "p4")
    casimir_names = ("U1", "U2")
    description = "two pairs, second order, quadratic in momenta; not faithful"

    def forward_moments(self) -> Dict[MomentIndex, sympy.Expr]:
        s = [self.symbols[f"s{i}"] for i in range(1, 5)]
        p = [self.symbols[f"p{i}"] for i in range(1, 5)]
        momenta = parameter_free_momenta(s, p, self.symbols["U1"], self.symbols["U2"])
        return {idx: sympy.expand(expr) for idx, expr in parameter_free_moments(s, momenta, self.N).items()}

    def domain_violations(self, coords: Mapping[str, float]) -> List[str]:
        violations: List[str] = []
        for i in range(1, 5):
            require(coords[f"s{i}"] != 0, f"s{i} must not vanish", violations)
        return violations

    def sample(self, rng: np.random.Generator) -> Dict[str, float]:
        coords = {f"s{i}": rng.uniform(0.5, 2.0) for i in range(1, 5)}
        coords.update({f"p{i}": rng.uniform(-1.0, 1.0) for i in range(1, 5)})
        coords.update({"U1": rng.uniform(0.2, 2.0), "U2": rng.uniform(0.2, 2.0)})
        return coords

"""Third-order chart for a single pair.

Two readings of the printed realization are possible: the factor multiplying
√s2 in Δ(q²π) (``s3`` or ``p3``) and the sign inside the fourth root.
:func:`adjudicate_third_order_variant` picks the one passing verification.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
import sympy
from scipy.optimize import root_scalar

from ..brackets import bracket_truncated
from ..exceptions import BracketConsistencyError, ChartDomainError
from ..moments import MomentExpression, MomentIndex
from .base import MomentChart, require

logger = logging.getLogger(__name__)

Q2 = MomentIndex.single(2, 0)
QP = MomentIndex.single(1, 1)
P2 = MomentIndex.single(0, 2)
Q3 = MomentIndex.single(3, 0)
Q2P = MomentIndex.single(2, 1)
QP2 = MomentIndex.single(1, 2)
P3 = MomentIndex.single(0, 3)
THIRD_ORDER_BASIS = (Q3, Q2P, QP2, P3)


@dataclass(frozen=True)
class ThirdOrderVariant:
    q2pi_factor: str = "s3"
    casimir_sign: int = -1

    def __post_init__(self) -> None:
        if self.q2pi_factor not in ("s3", "p3"):
            raise ValueError(f"q2pi_factor must be 's3' or 'p3', got {self.q2pi_factor!r}")
        if self.casimir_sign not in (1, -1):
            raise ValueError(f"casimir_sign must be +1 or -1, got {self.casimir_sign}")

    def __str__(self) -> str:
        return f"q2pi_factor={self.q2pi_factor}, casimir_sign={self.casimir_sign:+d}"


PRINTED_VARIANT = ThirdOrderVariant(q2pi_factor="p3", casimir_sign=1)


def quartic_casimir(a: float, b: float, c: float, d: float) -> float:
    """U_1 in terms of (Δ(q³), Δ(q²π), Δ(qπ²), Δ(π³))."""
    return 4 * (c * c - b * d) * (b * b - a * c) - (b * c - a * d) ** 2


def quartic_casimir_expression() -> MomentExpression:
    a, b, c, d = (MomentExpression.of(idx) for idx in THIRD_ORDER_BASIS)
    return 4 * (c * c - b * d) * (b * b - a * c) - (b * c - a * d) ** 2


class N1S3Chart(MomentChart):
    name = "n1s3"
    N = 1
    order = 3
    canonical_names = ("s1", "s2", "s3")
    momentum_names = ("p1", "p2", "p3")
    casimir_names = ("U1",)
    description = "single pair, third order, quartic Casimir U1"

    def __init__(self, hbar: float = 1.0, variant: Optional[ThirdOrderVariant] = None) -> None:
        super().__init__(hbar)
        self.variant = variant or ThirdOrderVariant()

    def _f1(self) -> sympy.Expr:
        s2, s3, p2, p3 = (self.symbols[n] for n in ("s2", "s3", "p2", "p3"))
        return (
            -3 * sympy.sqrt(s2) * (4 * s3**2 - 1) * p3
            + sympy.Rational(1, 2) * (7 - 10 * s3**2) * s2
            - 16 * s2**2 * p2**2
        )

    def forward_moments(self) -> Dict[MomentIndex, sympy.Expr]:
        s1, s2, s3, p1, p2, p3, U1 = self.coordinate_symbols
        root = sympy.sqrt(s2)
        scale = (self.variant.casimir_sign * U1 / (16 * s2 * s3**2 - 4 * s2)) ** sympy.Rational(1, 4)
        factor = s3 if self.variant.q2pi_factor == "s3" else p3
        phi = (
            p1**3 * s1**3
            + 3 * p1**2 * s1**2 * root * s3
            + 3 * p1 * s1 * s2 * (s3**2 + 4 * s1 * p1 * p2 - 1)
            + 64 * p2**3 * s2**3
            + s2 ** sympy.Rational(3, 2) * s3 * (s3**2 + 24 * s1 * p1 * p2 - 7)
            + 48 * p2**2 * s2 ** sympy.Rational(5, 2) * s3
            + 12 * p2 * s2**2 * (s3**2 + 4 * s1 * p1 * p2 - 1)
        )
        return {
            Q2: s1**2,
            QP: s1 * p1,
            P2: p1**2 + self._f1() / s1**2,
            Q3: s1**3 / root * scale,
            Q2P: (p1 * s1**2 + s1 * (factor * root + 4 * s2 * p2)) / root * scale,
            QP2: (p1 * s1 + (s3 - 1) * root + 4 * s2 * p2) * (p1 * s1 + (s3 + 1) * root + 4 * s2 * p2) / (s1 * root) * scale,
            P3: phi / (root * s1**3) * scale,
        }

    def domain_violations(self, coords: Mapping[str, float]) -> List[str]:
        violations: List[str] = []
        s2, s3 = coords["s2"], coords["s3"]
        require(coords["s1"] > 0, "s1 must be positive", violations)
        require(s2 > 0, "s2 must be positive", violations)
        require(4 * s3**2 > 1, "4 s3^2 must exceed 1", violations)
        if not violations:
            radicand = self.variant.casimir_sign * coords["U1"] / (16 * s2 * s3**2 - 4 * s2)
            require(radicand > 0, "fourth-root radicand must be positive", violations)
        return violations

    def sample(self, rng: np.random.Generator) -> Dict[str, float]:
        return {
            "s1": rng.uniform(0.5, 2.0),
            "s2": rng.uniform(0.5, 2.0),
            "s3": rng.choice([-1.0, 1.0]) * rng.uniform(0.6, 2.0),
            "p1": rng.uniform(-1.0, 1.0),
            "p2": rng.uniform(-1.0, 1.0),
            "p3": rng.uniform(-1.0, 1.0),
            "U1": self.variant.casimir_sign * rng.uniform(0.2, 2.0),
        }

    def _inverse(self, targets: Mapping[str, float]) -> Dict[str, float]:
        qq, qp, pp, a, b, c, d = (targets[name] for name in self.target_names)
        violations: List[str] = []
        require(qq > 0, "Δ(q²) must be positive", violations)
        require(a != 0, "Δ(q³) must not vanish", violations)
        require(b * b - c * a != 0, "Δ(q²π)² − Δ(qπ²)Δ(q³) must not vanish", violations)
        if violations:
            raise ChartDomainError(self.name, violations)

        # Step 1 - first pair
        s1 = math.sqrt(qq)
        p1 = qp / s1

        # Step 2 - functions Poisson commuting with (s1, p1)
        f1 = qq * pp - qp * qp
        f2 = qq * b / a - qp
        f3 = qq**2 / a**2 * (b * b - c * a)
        f4 = 2 * qp + qq * (a * d - c * b) / (b * b - c * a)

        # Step 3 - remaining pairs
        s2 = f3
        if s2 <= 0:
            raise ChartDomainError(self.name, [f"s2 = {s2:g} must be positive"])
        p2 = (6 * f2 + f4) / (16 * s2)
        g1 = f1 + (6 * f2 + f4) ** 2 / 16
        g2 = -0.5 * f2 - 0.25 * f4
        s3 = g2 / math.sqrt(s2)
        if 4 * s3**2 <= 1:
            raise ChartDomainError(self.name, [f"4 s3^2 = {4 * s3 ** 2:g} must exceed 1"])
        p3 = self._solve_p3(f1, s2, s3, p2, g1)
        return {"s1": s1, "s2": s2, "s3": s3, "p1": p1, "p2": p2, "p3": p3, "U1": quartic_casimir(a, b, c, d)}

    def _solve_p3(self, f1: float, s2: float, s3: float, p2: float, g1: float) -> float:
        closed = -(2 * g1 - 7 * s2 + 10 * s3**2 * s2) / (6 * math.sqrt(s2) * (4 * s3**2 - 1))

        def residual(p3: float) -> float:
            return -3 * math.sqrt(s2) * (4 * s3**2 - 1) * p3 + 0.5 * (7 - 10 * s3**2) * s2 - 16 * s2**2 * p2**2 - f1

        result = root_scalar(residual, x0=0.0, x1=1.0, method="secant", xtol=1e-14)
        if not result.converged:
            logger.warning("p3 root finding did not converge (%s); using closed form", result.flag)
            return closed
        if abs(result.root - closed) > 1e-9 * max(1.0, abs(closed)):
            logger.debug("p3 root %.17g differs from closed form %.17g", result.root, closed)
        return float(result.root)


def third_order_action_matrices() -> Dict[str, sympy.Matrix]:
    """Action of A=−Δ(π²)/2, B=Δ(q²)/2, C=Δ(qπ) on (Δ(q³), Δ(q²π), Δ(qπ²), Δ(π³)) and its Casimir K."""
    generators = {
        "A": MomentExpression.of(P2, "-1/2"),
        "B": MomentExpression.of(Q2, "1/2"),
        "C": MomentExpression.of(QP),
    }
    matrices: Dict[str, sympy.Matrix] = {}
    for name, generator in generators.items():
        matrix = sympy.zeros(4, 4)
        for column, target in enumerate(THIRD_ORDER_BASIS):
            image = bracket_truncated(generator, target, 1, 3)
            for row, basis in enumerate(THIRD_ORDER_BASIS):
                value = image.coefficient((basis,))
                matrix[row, column] = sympy.Rational(value.numerator, value.denominator)
            if len(image) != sum(1 for basis in THIRD_ORDER_BASIS if image.coefficient((basis,))):
                raise BracketConsistencyError(f"{{{name}, {target}}} leaves the third-order span: {image}")
        matrices[name] = matrix
    A, B, C = matrices["A"], matrices["B"], matrices["C"]
    matrices["K"] = -sympy.Rational(1, 2) * (A * B + B * A) - sympy.Rational(1, 4) * C * C
    return matrices


def adjudicate_third_order_variant(
    samples: int = 20, seed: int = 0, tol: float = 1e-9, hbar: float = 1.0
) -> Tuple[ThirdOrderVariant, Dict[ThirdOrderVariant, bool]]:
    """Return the first variant whose verification passes at every sample."""
    from .verification import verify_chart_samples

    outcomes: Dict[ThirdOrderVariant, bool] = {}
    for factor, sign in itertools.product(("s3", "p3"), (-1, 1)):
        variant = ThirdOrderVariant(q2pi_factor=factor, casimir_sign=sign)
        summary = verify_chart_samples(N1S3Chart(hbar=hbar, variant=variant), samples=samples, seed=seed, tol=tol)
        outcomes[variant] = summary.passed
        logger.info("third-order variant %s: %s", variant, "pass" if summary.passed else "fail")
    for variant, passed in outcomes.items():
        if passed:
            logger.info("adopting third-order variant %s", variant)
            return variant, outcomes
    raise BracketConsistencyError("no third-order chart variant passes verification")

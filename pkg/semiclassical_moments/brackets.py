"""Poisson brackets of moments.

``{Δ_A, Δ_B}`` is the expectation value of the commutator divided by ``iħ``,
extended to products by the Leibniz rule. The closed single-pair formula is
:func:`bracket_single_pair`; :func:`bracket_general` works for any ``N`` by
expanding central moments into Weyl-ordered expectation values and bracketing
those through the Moyal bracket of their Weyl symbols.
"""
import itertools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import DefaultDict, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from .exceptions import BracketConsistencyError, DimensionMismatchError
from .moments import (
    BasicVariable,
    Factor,
    MomentExpression,
    MomentIndex,
    PhasePoint,
    coordinate_layout,
    symbol_for,
)

logger = logging.getLogger(__name__)

Exponents = Tuple[int, ...]
Bracketable = Union[MomentExpression, MomentIndex, BasicVariable]

DEFAULT_RANK_TOL = 1e-10


def tau_matrix(N: int) -> np.ndarray:
    """τ_ij = {x_i, x_j} for x = (q_1..q_N, π_1..π_N)."""
    tau = np.zeros((2 * N, 2 * N), dtype=np.int64)
    for j in range(N):
        tau[j, N + j] = 1
        tau[N + j, j] = -1
    return tau


@lru_cache(maxsize=None)
def kernel_coefficient(n: int, a: int, b: int, c: int, d: int) -> int:
    return sum(
        (-1) ** m
        * math.factorial(m)
        * math.factorial(n - m)
        * math.comb(a, m)
        * math.comb(b, n - m)
        * math.comb(c, n - m)
        * math.comb(d, m)
        for m in range(n + 1)
    )


def _single(q: int, pi: int) -> MomentIndex:
    return MomentIndex((q,), (pi,))


def bracket_single_pair(A: MomentIndex, B: MomentIndex) -> MomentExpression:
    """Closed bracket of Δ(q^b π^a) and Δ(q^d π^c) for one canonical pair."""
    if A.N != 1 or B.N != 1:
        raise DimensionMismatchError("bracket_single_pair needs N=1 moments")
    b, a = A.k[0], A.l[0]
    d, c = B.k[0], B.l[0]
    result = MomentExpression()
    if a and d:
        result += MomentExpression.of(_single(b, a - 1)) * MomentExpression.of(_single(d - 1, c)) * (a * d)
    if b and c:
        result -= MomentExpression.of(_single(b - 1, a)) * MomentExpression.of(_single(d, c - 1)) * (b * c)
    for n in range(1, min(a + c, b + d) + 1, 2):
        K = kernel_coefficient(n, a, b, c, d)
        if not K:
            continue
        # (iħ/2)^(n−1) with n odd is real
        coefficient = Fraction((-1) ** ((n - 1) // 2) * K, 2 ** (n - 1))
        result += MomentExpression({((_single(b + d - n, a + c - n),), n - 1): coefficient})
    return result


@lru_cache(maxsize=None)
def moyal_bracket(beta: Exponents, gamma: Exponents) -> Tuple[Tuple[Exponents, int, Fraction], ...]:
    """Moyal bracket of the Weyl symbols x^β and x^γ as (exponents, ħ power, coefficient) terms."""
    if len(beta) != len(gamma) or len(beta) % 2:
        raise DimensionMismatchError(f"incompatible exponent vectors {beta}, {gamma}")
    N = len(beta) // 2
    m_ranges = [range(min(beta[k], gamma[N + k]) + 1) for k in range(N)]
    r_ranges = [range(min(beta[N + k], gamma[k]) + 1) for k in range(N)]
    terms: Dict[Tuple[Exponents, int], Fraction] = {}
    for ms in itertools.product(*m_ranges):
        for rs in itertools.product(*r_ranges):
            n = sum(ms) + sum(rs)
            if n % 2 == 0:
                continue
            coefficient = Fraction((-1) ** ((n - 1) // 2), 2 ** (n - 1))
            exponents = [0] * (2 * N)
            for k in range(N):
                m, r = ms[k], rs[k]
                coefficient *= Fraction(
                    (-1) ** r
                    * math.perm(beta[k], m)
                    * math.perm(beta[N + k], r)
                    * math.perm(gamma[N + k], m)
                    * math.perm(gamma[k], r),
                    math.factorial(m) * math.factorial(r),
                )
                exponents[k] = beta[k] - m + gamma[k] - r
                exponents[N + k] = beta[N + k] - r + gamma[N + k] - m
            if coefficient:
                key = (tuple(exponents), n - 1)
                terms[key] = terms.get(key, Fraction(0)) + coefficient
    return tuple((exps, h, c) for (exps, h), c in sorted(terms.items()) if c)


def _is_unit(exponents: Exponents) -> bool:
    return sum(exponents) == 1


def _unit(N: int, slot: int) -> Exponents:
    return tuple(1 if i == slot else 0 for i in range(2 * N))


def _central_expansion(exponents: Exponents) -> List[Tuple[Tuple[Exponents, ...], Fraction]]:
    """Δ(x^A) = Σ_β C(A,β) (−x̄)^{A−β} E(x^β) with x̄_i written as E(e_i)."""
    N = len(exponents) // 2
    expansion = []
    for beta in itertools.product(*[range(e + 1) for e in exponents]):
        coefficient = Fraction((-1) ** (sum(exponents) - sum(beta)))
        factors: List[Exponents] = []
        for slot, (top, bottom) in enumerate(zip(exponents, beta)):
            coefficient *= math.comb(top, bottom)
            factors.extend([_unit(N, slot)] * (top - bottom))
        if sum(beta):
            factors.append(tuple(beta))
        expansion.append((tuple(sorted(factors)), coefficient))
    return expansion


def _recollect(
    factor: Exponents, shift: Sequence[Fraction]
) -> Dict[Tuple[Exponents, ...], Fraction]:
    """E(x^δ) = Σ_ε C(δ,ε) x̄^{δ−ε} Δ(x^ε) at basic values ``shift``."""
    result: Dict[Tuple[Exponents, ...], Fraction] = {}
    for epsilon in itertools.product(*[range(e + 1) for e in factor]):
        if sum(epsilon) == 1:
            continue
        coefficient = Fraction(1)
        for top, bottom, value in zip(factor, epsilon, shift):
            if top - bottom and not value:
                coefficient = Fraction(0)
                break
            coefficient *= math.comb(top, bottom) * value ** (top - bottom)
        if coefficient:
            key = (tuple(epsilon),) if sum(epsilon) else ()
            result[key] = result.get(key, Fraction(0)) + coefficient
    return result


def weyl_moment_bracket(
    A: MomentIndex, B: MomentIndex, shift: Optional[Sequence[Union[int, Fraction]]] = None
) -> MomentExpression:
    """{Δ_A, Δ_B} by the Weyl-symbol route, recollected at basic values ``shift``.

    The bracket of central moments does not depend on the basic expectation
    values; ``shift`` only selects where the non-central expansion is
    recollected (zero by default).
    """
    if A.N != B.N:
        raise DimensionMismatchError(f"moments of different N: {A}, {B}")
    N = A.N
    shift = tuple(Fraction(x) for x in shift) if shift is not None else (Fraction(0),) * (2 * N)
    at_origin = not any(shift)

    # Step 1 - bracket of the non-central expansions by Leibniz over E factors
    raw: Dict[Tuple[Tuple[Exponents, ...], int], Fraction] = {}
    for factors_a, coefficient_a in _central_expansion(A.exponents):
        for factors_b, coefficient_b in _central_expansion(B.exponents):
            for i, f in enumerate(factors_a):
                rest_a = factors_a[:i] + factors_a[i + 1 :]
                if at_origin and any(_is_unit(x) for x in rest_a):
                    continue
                for j, g in enumerate(factors_b):
                    rest_b = factors_b[:j] + factors_b[j + 1 :]
                    if at_origin and any(_is_unit(x) for x in rest_b):
                        continue
                    for delta, hbar_power, coefficient in moyal_bracket(f, g):
                        product = rest_a + rest_b + ((delta,) if sum(delta) else ())
                        key = (tuple(sorted(product)), hbar_power)
                        raw[key] = raw.get(key, Fraction(0)) + coefficient_a * coefficient_b * coefficient

    # Step 2 - recollect every E factor into central moments
    result: Dict[Tuple[Tuple[MomentIndex, ...], int], Fraction] = {}
    for (factors, hbar_power), coefficient in raw.items():
        if not coefficient:
            continue
        partial: Dict[Tuple[Exponents, ...], Fraction] = {(): coefficient}
        for factor in factors:
            expansion = _recollect(factor, shift)
            grown: DefaultDict[Tuple[Exponents, ...], Fraction] = defaultdict(Fraction)
            for key, value in partial.items():
                for extra, weight in expansion.items():
                    grown[tuple(sorted(key + extra))] += value * weight
            partial = {key: value for key, value in grown.items() if value}
            if not partial:
                break
        for key, value in partial.items():
            moment_key = (tuple(MomentIndex.from_exponents(e) for e in key), hbar_power)
            result[moment_key] = result.get(moment_key, Fraction(0)) + value
    return MomentExpression(result)


def check_translation_invariance(
    A: MomentIndex, B: MomentIndex, shift: Sequence[Union[int, Fraction]]
) -> MomentExpression:
    """Raise if recollecting at ``shift`` changes the bracket."""
    reference = weyl_moment_bracket(A, B)
    shifted = weyl_moment_bracket(A, B, shift)
    if reference != shifted:
        raise BracketConsistencyError(
            f"bracket of {A} and {B} depends on basic values: {reference} vs {shifted}"
        )
    return reference


@lru_cache(maxsize=None)
def _moment_bracket(A: MomentIndex, B: MomentIndex) -> MomentExpression:
    return weyl_moment_bracket(A, B)


def _elementary(f: Factor, g: Factor, N: int, s: Optional[int]) -> MomentExpression:
    if isinstance(f, BasicVariable) and isinstance(g, BasicVariable):
        value = int(tau_matrix(N)[f.position(N), g.position(N)])
        return MomentExpression.constant(value)
    if isinstance(f, BasicVariable) or isinstance(g, BasicVariable):
        return MomentExpression()
    if s is not None and f.order + g.order - 2 > s:
        # elementary brackets are homogeneous of order o_f + o_g − 2
        return MomentExpression()
    return _moment_bracket(f, g)


def _lift(value: Bracketable) -> MomentExpression:
    if isinstance(value, MomentExpression):
        return value
    return MomentExpression.of(value)


def _check_dimension(expression: MomentExpression, N: int) -> None:
    for factor in expression.factors():
        if isinstance(factor, MomentIndex) and factor.N != N:
            raise DimensionMismatchError(f"{factor} does not belong to N={N}")
        if isinstance(factor, BasicVariable) and factor.index >= N:
            raise DimensionMismatchError(f"{factor} does not belong to N={N}")


def _leibniz(A: MomentExpression, B: MomentExpression, N: int, s: Optional[int]) -> MomentExpression:
    _check_dimension(A, N)
    _check_dimension(B, N)
    terms: Dict = {}
    for (factors_a, hbar_a), coefficient_a in A.terms():
        for (factors_b, hbar_b), coefficient_b in B.terms():
            for i, f in enumerate(factors_a):
                rest_a = factors_a[:i] + factors_a[i + 1 :]
                for j, g in enumerate(factors_b):
                    rest_b = factors_b[:j] + factors_b[j + 1 :]
                    for (factors_e, hbar_e), coefficient_e in _elementary(f, g, N, s).terms():
                        key = (rest_a + rest_b + factors_e, hbar_a + hbar_b + hbar_e)
                        terms[key] = terms.get(key, 0) + coefficient_a * coefficient_b * coefficient_e
    return MomentExpression(terms)


def bracket_general(A: Bracketable, B: Bracketable, N: int) -> MomentExpression:
    return _leibniz(_lift(A), _lift(B), N, None)


def bracket_truncated(A: Bracketable, B: Bracketable, N: int, s: int) -> MomentExpression:
    """Bracket on P_s: elementary brackets truncated at order ``s``, Leibniz on products."""
    return _leibniz(_lift(A), _lift(B), N, s)


def jacobi_defect(A: Bracketable, B: Bracketable, C: Bracketable, N: int, s: int) -> MomentExpression:
    def br(x, y):
        return bracket_truncated(x, y, N, s)

    return (br(A, br(B, C)) + br(B, br(C, A)) + br(C, br(A, B))).truncate(s)


@dataclass(frozen=True)
class PoissonMatrix:
    basis: Tuple[Factor, ...]
    entries: np.ndarray

    def antisymmetry_defect(self) -> float:
        return float(np.max(np.abs(self.entries + self.entries.T), initial=0.0))

    def rank(self, tol: float = DEFAULT_RANK_TOL) -> int:
        return rank_and_kernel(self, tol)[0]

    def kernel(self, tol: float = DEFAULT_RANK_TOL) -> List[np.ndarray]:
        return rank_and_kernel(self, tol)[1]


def poisson_matrix(basis: Sequence[Factor], point: PhasePoint, s: int) -> PoissonMatrix:
    size = len(basis)
    entries = np.zeros((size, size))
    for i in range(size):
        for j in range(i + 1, size):
            value = bracket_truncated(basis[i], basis[j], point.N, s).evaluate(point)
            entries[i, j] = value
            entries[j, i] = -value
    return PoissonMatrix(basis=tuple(basis), entries=entries)


def rank_and_kernel(
    matrix: Union[PoissonMatrix, np.ndarray], tol: float = DEFAULT_RANK_TOL
) -> Tuple[int, List[np.ndarray]]:
    """Numerical rank by singular values above ``tol`` times the largest one."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    entries = matrix.entries if isinstance(matrix, PoissonMatrix) else np.asarray(matrix, dtype=float)
    size = entries.shape[0]
    if size == 0:
        return 0, []
    _, singular, vh = np.linalg.svd(entries)
    largest = singular[0] if singular.size else 0.0
    if largest == 0.0:
        return 0, [row for row in np.eye(size)]
    rank = int(np.sum(singular > tol * largest))
    if rank % 2:
        logger.warning("odd numerical rank %d (tol=%g); singular values %s", rank, tol, singular)
    return rank, [vh[i].copy() for i in range(rank, size)]


@lru_cache(maxsize=None)
def poisson_tensor(N: int, s: int, include_basic: bool = True) -> sympy.ImmutableMatrix:
    """Symbolic Poisson tensor of P_s over :func:`coordinate_layout`."""
    layout = coordinate_layout(N, s, include_basic)
    size = len(layout)
    rows = [[sympy.Integer(0)] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            entry = bracket_truncated(layout[i], layout[j], N, s).to_sympy()
            rows[i][j] = entry
            rows[j][i] = -entry
    return sympy.ImmutableMatrix(rows)


def function_bracket(F: sympy.Expr, G: sympy.Expr, N: int, s: int) -> sympy.Expr:
    """{F, G} for arbitrary differentiable functions of the P_s coordinates (chain rule)."""
    layout = coordinate_layout(N, s)
    symbols = [symbol_for(f) for f in layout]
    tensor = poisson_tensor(N, s)
    grad_f = [sympy.diff(F, x) for x in symbols]
    grad_g = [sympy.diff(G, x) for x in symbols]
    total = sympy.Integer(0)
    for i, df in enumerate(grad_f):
        if df == 0:
            continue
        for j, dg in enumerate(grad_g):
            if dg != 0 and tensor[i, j] != 0:
                total += df * tensor[i, j] * dg
    return total

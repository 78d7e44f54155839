"""Moment indexing, truncation order and the exact moment expression algebra.

Central moments are labelled by :class:`MomentIndex` ``(k, l)`` standing for
``Δ(q_1^{k_1}…q_N^{k_N} π_1^{l_1}…π_N^{l_N})``. Basic expectation values are
:class:`BasicVariable` instances. A :class:`MomentExpression` is a finite sum of
products of both kinds of factors times powers of ``ħ`` with exact rational
coefficients; ``ħ`` is substituted only on evaluation.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import (
    Dict,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np
import sympy

from .exceptions import DimensionMismatchError, MissingMomentError

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]


def _as_fraction(value: Union[Number, str]) -> Fraction:
    if isinstance(value, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, (float, np.floating)):
        # decimal reading keeps 0.1 as 1/10
        return Fraction(repr(float(value)))
    if isinstance(value, (np.integer,)):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"unsupported coefficient type {type(value).__name__}")


@dataclass(frozen=True)
class MomentIndex:
    k: Tuple[int, ...]
    l: Tuple[int, ...]

    def __post_init__(self) -> None:
        k = tuple(int(x) for x in self.k)
        l = tuple(int(x) for x in self.l)
        if not k or len(k) != len(l):
            raise ValueError(f"position and momentum powers must have equal length >= 1, got {k}, {l}")
        if any(x < 0 for x in k + l):
            raise ValueError(f"negative power in moment index {k}, {l}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "l", l)

    @classmethod
    def from_exponents(cls, exponents: Sequence[int]) -> "MomentIndex":
        """exponents in the basic-variable layout (q_1..q_N, π_1..π_N)"""
        if len(exponents) % 2:
            raise ValueError("exponent vector must have even length")
        n = len(exponents) // 2
        return cls(tuple(exponents[:n]), tuple(exponents[n:]))

    @classmethod
    def single(cls, q: int = 0, pi: int = 0) -> "MomentIndex":
        return cls((q,), (pi,))

    @property
    def N(self) -> int:
        return len(self.k)

    @property
    def order(self) -> int:
        return sum(self.k) + sum(self.l)

    @property
    def exponents(self) -> Tuple[int, ...]:
        return self.k + self.l

    def sort_key(self) -> Tuple:
        return (self.order, tuple(-e for e in self.exponents))

    def __str__(self) -> str:
        from .utils.parser import format_moment

        return format_moment(self)


@dataclass(frozen=True)
class BasicVariable:
    momentum: bool
    index: int

    @classmethod
    def q(cls, index: int = 0) -> "BasicVariable":
        return cls(False, index)

    @classmethod
    def pi(cls, index: int = 0) -> "BasicVariable":
        return cls(True, index)

    @property
    def name(self) -> str:
        return f"{'pi' if self.momentum else 'q'}{self.index + 1}"

    def position(self, N: int) -> int:
        """slot in x = (q_1..q_N, π_1..π_N)"""
        return self.index + (N if self.momentum else 0)

    def __str__(self) -> str:
        return self.name


Factor = Union[BasicVariable, MomentIndex]
Monomial = Tuple[Tuple[Factor, ...], int]


def factor_key(factor: Factor) -> Tuple:
    if isinstance(factor, BasicVariable):
        return (0, int(factor.momentum), factor.index)
    return (1,) + factor.sort_key()


def moment_order(idx: MomentIndex) -> int:
    return idx.order


def semiclassical_order(monomial: Monomial) -> int:
    factors, hbar_power = monomial
    return sum(f.order for f in factors if isinstance(f, MomentIndex)) + 2 * hbar_power


def enumerate_moments(N: int, s: int) -> List[MomentIndex]:
    """All moments with 2 <= order <= s, graded then lexicographically descending."""
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    if s < 2:
        raise ValueError(f"truncation order must be at least 2, got {s}")
    result = []
    for order in range(2, s + 1):
        for slots in itertools.combinations_with_replacement(range(2 * N), order):
            exponents = [0] * (2 * N)
            for slot in slots:
                exponents[slot] += 1
            result.append(MomentIndex.from_exponents(exponents))
    return sorted(result, key=MomentIndex.sort_key)


def basic_variables(N: int) -> List[BasicVariable]:
    return [BasicVariable.q(j) for j in range(N)] + [BasicVariable.pi(j) for j in range(N)]


def coordinate_layout(N: int, s: int, include_basic: bool = True) -> List[Factor]:
    """Coordinates of P_s: basic expectation values first, then moments."""
    layout: List[Factor] = basic_variables(N) if include_basic else []
    return layout + list(enumerate_moments(N, s))


def _normalize(factors: Iterable[Factor], hbar_power: int) -> Optional[Monomial]:
    if hbar_power < 0:
        raise ValueError("negative power of hbar")
    kept = []
    for factor in factors:
        if isinstance(factor, MomentIndex):
            if factor.order == 0:
                continue
            if factor.order == 1:
                return None
        kept.append(factor)
    return tuple(sorted(kept, key=factor_key)), hbar_power


class MomentExpression:
    """Exact polynomial in basic variables, moments and ħ."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, Union[Number, str]]] = None) -> None:
        collected: Dict[Monomial, Fraction] = {}
        for (factors, hbar_power), coefficient in (terms or {}).items():
            key = _normalize(factors, hbar_power)
            if key is None:
                continue
            collected[key] = collected.get(key, Fraction(0)) + _as_fraction(coefficient)
        self._terms: Dict[Monomial, Fraction] = {k: v for k, v in collected.items() if v != 0}

    @classmethod
    def constant(cls, value: Union[Number, str]) -> "MomentExpression":
        return cls({((), 0): value})

    @classmethod
    def of(cls, factor: Factor, coefficient: Union[Number, str] = 1) -> "MomentExpression":
        return cls({((factor,), 0): coefficient})

    @classmethod
    def moment(cls, k: Sequence[int], l: Sequence[int]) -> "MomentExpression":
        return cls.of(MomentIndex(tuple(k), tuple(l)))

    @classmethod
    def hbar(cls, power: int = 1, coefficient: Union[Number, str] = 1) -> "MomentExpression":
        return cls({((), power): coefficient})

    @classmethod
    def zero(cls) -> "MomentExpression":
        return cls()

    @staticmethod
    def _lift(other) -> "MomentExpression":
        if isinstance(other, MomentExpression):
            return other
        if isinstance(other, (MomentIndex, BasicVariable)):
            return MomentExpression.of(other)
        return MomentExpression.constant(other)

    def terms(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(sorted(self._terms.items(), key=_term_sort_key))

    def coefficient(self, factors: Sequence[Factor] = (), hbar_power: int = 0) -> Fraction:
        key = _normalize(factors, hbar_power)
        if key is None:
            return Fraction(0)
        return self._terms.get(key, Fraction(0))

    def factors(self) -> List[Factor]:
        seen = {f for (factors, _), _ in self._terms.items() for f in factors}
        return sorted(seen, key=factor_key)

    def moment_indices(self) -> List[MomentIndex]:
        return [f for f in self.factors() if isinstance(f, MomentIndex)]

    @property
    def N(self) -> Optional[int]:
        dims = {f.N for f in self.moment_indices()}
        if len(dims) > 1:
            raise DimensionMismatchError(f"expression mixes moment dimensions {sorted(dims)}")
        return dims.pop() if dims else None

    def max_order(self) -> int:
        return max((semiclassical_order(m) for m in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __add__(self, other) -> "MomentExpression":
        other = self._lift(other)
        terms = dict(self._terms)
        for key, value in other._terms.items():
            terms[key] = terms.get(key, Fraction(0)) + value
        return MomentExpression(terms)

    __radd__ = __add__

    def __neg__(self) -> "MomentExpression":
        return MomentExpression({k: -v for k, v in self._terms.items()})

    def __sub__(self, other) -> "MomentExpression":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "MomentExpression":
        return self._lift(other) - self

    def __mul__(self, other) -> "MomentExpression":
        other = self._lift(other)
        terms: Dict[Monomial, Fraction] = {}
        for (fa, ha), ca in self._terms.items():
            for (fb, hb), cb in other._terms.items():
                key = (tuple(sorted(fa + fb, key=factor_key)), ha + hb)
                terms[key] = terms.get(key, Fraction(0)) + ca * cb
        return MomentExpression(terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "MomentExpression":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = MomentExpression.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    __hash__ = None  # type: ignore[assignment]

    def truncate(self, s: int) -> "MomentExpression":
        return MomentExpression({k: v for k, v in self._terms.items() if semiclassical_order(k) <= s})

    def evaluate(self, point: "PhasePoint") -> float:
        total = 0.0
        for (factors, hbar_power), coefficient in self._terms.items():
            value = float(coefficient) * point.hbar**hbar_power
            for factor in factors:
                value *= point.value(factor)
            total += value
        return total

    def to_sympy(self, hbar: Optional[Number] = None) -> sympy.Expr:
        h = hbar_symbol() if hbar is None else sympy.nsimplify(hbar)
        result = sympy.Integer(0)
        for (factors, hbar_power), coefficient in self._terms.items():
            term = sympy.Rational(coefficient.numerator, coefficient.denominator) * h**hbar_power
            for factor in factors:
                term *= symbol_for(factor)
            result += term
        return result

    def __str__(self) -> str:
        from .utils.parser import format_expression

        return format_expression(self)

    def __repr__(self) -> str:
        return f"MomentExpression({self})"


def _term_sort_key(item: Tuple[Monomial, Fraction]) -> Tuple:
    (factors, hbar_power), _ = item
    return (
        semiclassical_order((factors, hbar_power)),
        len(factors),
        tuple(factor_key(f) for f in factors),
        hbar_power,
    )


def truncate(expression: MomentExpression, s: int) -> MomentExpression:
    return expression.truncate(s)


def evaluate(expression: MomentExpression, point: "PhasePoint") -> float:
    return expression.evaluate(point)


def hbar_symbol() -> sympy.Symbol:
    return sympy.Symbol("hbar", positive=True)


def moment_symbol(idx: MomentIndex) -> sympy.Symbol:
    return sympy.Symbol("D_" + "_".join(str(e) for e in idx.exponents), real=True)


def basic_symbol(var: BasicVariable) -> sympy.Symbol:
    return sympy.Symbol(var.name, real=True)


def symbol_for(factor: Factor) -> sympy.Symbol:
    if isinstance(factor, BasicVariable):
        return basic_symbol(factor)
    return moment_symbol(factor)


def factor_from_symbol(symbol: sympy.Symbol) -> Factor:
    name = symbol.name
    if name.startswith("D_"):
        return MomentIndex.from_exponents([int(e) for e in name[2:].split("_")])
    for prefix, momentum in (("pi", True), ("q", False)):
        if name.startswith(prefix) and name[len(prefix):].isdigit():
            return BasicVariable(momentum, int(name[len(prefix):]) - 1)
    raise ValueError(f"symbol {name} is not a phase-space coordinate")


@dataclass(frozen=True)
class PhasePoint:
    """Numeric point of P_s: basic expectation values plus every moment up to ``order``."""

    N: int
    order: int
    hbar: float
    basic: Tuple[float, ...] = ()
    moments: Mapping[MomentIndex, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.hbar <= 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        basic = tuple(float(x) for x in self.basic) or (0.0,) * (2 * self.N)
        if len(basic) != 2 * self.N:
            raise DimensionMismatchError(f"expected {2 * self.N} basic values, got {len(basic)}")
        moments = {idx: float(value) for idx, value in self.moments.items()}
        missing = [idx for idx in enumerate_moments(self.N, self.order) if idx not in moments]
        if missing:
            raise MissingMomentError(
                "phase point lacks moments " + ", ".join(str(idx) for idx in missing)
            )
        object.__setattr__(self, "basic", basic)
        object.__setattr__(self, "moments", MappingProxyType(moments))

    @classmethod
    def from_vector(
        cls, N: int, order: int, hbar: float, vector: Sequence[float], include_basic: bool = True
    ) -> "PhasePoint":
        values = [float(x) for x in vector]
        layout = coordinate_layout(N, order, include_basic)
        if len(values) != len(layout):
            raise DimensionMismatchError(f"expected {len(layout)} coordinates, got {len(values)}")
        basic = tuple(values[: 2 * N]) if include_basic else ()
        offset = 2 * N if include_basic else 0
        moments = dict(zip(layout[offset:], values[offset:]))
        return cls(N=N, order=order, hbar=hbar, basic=basic, moments=moments)

    @classmethod
    def from_moments(
        cls,
        moments: Mapping[MomentIndex, float],
        hbar: float,
        basic: Sequence[float] = (),
        order: Optional[int] = None,
    ) -> "PhasePoint":
        if not moments:
            raise MissingMomentError("no moments given")
        dims = {idx.N for idx in moments}
        if len(dims) != 1:
            raise DimensionMismatchError(f"moments of mixed dimension {sorted(dims)}")
        order = order or max(idx.order for idx in moments)
        return cls(N=dims.pop(), order=order, hbar=hbar, basic=tuple(basic), moments=moments)

    def value(self, factor: Factor) -> float:
        if isinstance(factor, BasicVariable):
            if factor.index >= self.N:
                raise DimensionMismatchError(f"{factor} outside N={self.N}")
            return self.basic[factor.position(self.N)]
        if factor.order == 0:
            return 1.0
        if factor.order == 1:
            return 0.0
        try:
            return self.moments[factor]
        except KeyError:
            raise MissingMomentError(f"moment {factor} not available at order {self.order}") from None

    def __getitem__(self, factor: Factor) -> float:
        return self.value(factor)

    @property
    def layout(self) -> List[Factor]:
        return coordinate_layout(self.N, self.order)

    def as_vector(self, include_basic: bool = True) -> np.ndarray:
        return np.array(
            [self.value(f) for f in coordinate_layout(self.N, self.order, include_basic)], dtype=float
        )

    def replace(
        self,
        basic: Optional[Sequence[float]] = None,
        moments: Optional[Mapping[MomentIndex, float]] = None,
    ) -> "PhasePoint":
        merged = dict(self.moments)
        merged.update(moments or {})
        return PhasePoint(
            N=self.N,
            order=self.order,
            hbar=self.hbar,
            basic=tuple(basic) if basic is not None else self.basic,
            moments=merged,
        )

    def substitutions(self) -> Dict[sympy.Symbol, float]:
        subs = {symbol_for(f): self.value(f) for f in self.layout}
        subs[hbar_symbol()] = self.hbar
        return subs


def _pair_indices(N: int, j: int) -> Tuple[MomentIndex, MomentIndex, MomentIndex]:
    def idx(q: int, pi: int) -> MomentIndex:
        k = [0] * N
        l = [0] * N
        k[j] = q
        l[j] = pi
        return MomentIndex(tuple(k), tuple(l))

    return idx(2, 0), idx(1, 1), idx(0, 2)


def uncertainty_defects(point: PhasePoint) -> List[float]:
    """Δ(q_j²)Δ(π_j²) − Δ(q_jπ_j)² − ħ²/4 for every pair j."""
    defects = []
    for j in range(point.N):
        qq, qp, pp = (point.value(i) for i in _pair_indices(point.N, j))
        defects.append(qq * pp - qp * qp - point.hbar**2 / 4)
    return defects


def is_physical(point: PhasePoint, tol: float = 1e-12) -> bool:
    scale = max(1.0, point.hbar**2 / 4)
    for j in range(point.N):
        qq, _, pp = (point.value(i) for i in _pair_indices(point.N, j))
        if qq <= 0 or pp <= 0:
            return False
    return all(d >= -tol * scale for d in uncertainty_defects(point))


def gaussian_point(
    N: int,
    s: int,
    widths: Sequence[float],
    hbar: float,
    center: Optional[Sequence[float]] = None,
    correlations: Optional[Sequence[float]] = None,
) -> PhasePoint:
    """Pure Gaussian moments of every order up to ``s``.

    ``widths`` are the position spreads σ_j, ``correlations`` the covariances
    Δ(q_jπ_j) (zero by default); the momentum spread saturates the
    uncertainty relation.
    """
    if len(widths) != N:
        raise DimensionMismatchError(f"expected {N} widths, got {len(widths)}")
    if any(w <= 0 for w in widths):
        raise ValueError("Gaussian widths must be positive")
    correlations = list(correlations) if correlations is not None else [0.0] * N
    if len(correlations) != N:
        raise DimensionMismatchError(f"expected {N} correlations, got {len(correlations)}")

    covariance = np.zeros((2 * N, 2 * N))
    for j, (sigma, c) in enumerate(zip(widths, correlations)):
        covariance[j, j] = sigma**2
        covariance[N + j, N + j] = (hbar**2 / 4 + c**2) / sigma**2
        covariance[j, N + j] = covariance[N + j, j] = c

    cache: Dict[Tuple[int, ...], float] = {}

    def wick(exponents: Tuple[int, ...]) -> float:
        if exponents in cache:
            return cache[exponents]
        total = sum(exponents)
        if total == 0:
            value = 1.0
        elif total % 2:
            value = 0.0
        else:
            # E[x_i x^γ] = Σ_j Σ_ij γ_j E[x^{γ − e_j}]
            i = next(n for n, e in enumerate(exponents) if e)
            rest = list(exponents)
            rest[i] -= 1
            value = 0.0
            for j, count in enumerate(rest):
                if count and covariance[i, j]:
                    lowered = list(rest)
                    lowered[j] -= 1
                    value += covariance[i, j] * count * wick(tuple(lowered))
        cache[exponents] = value
        return value

    moments = {idx: wick(idx.exponents) for idx in enumerate_moments(N, s)}
    basic = tuple(center) if center is not None else (0.0,) * (2 * N)
    return PhasePoint(N=N, order=s, hbar=hbar, basic=basic, moments=moments)


def binomial_vector(top: Sequence[int], bottom: Sequence[int]) -> int:
    return math.prod(math.comb(a, b) for a, b in zip(top, bottom))

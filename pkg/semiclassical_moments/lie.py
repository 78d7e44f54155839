"""Lie-algebra data of the second-order truncation.

Second-order moments Δ(x_i x_j) close under the bracket with structure
constants built from τ. This module computes those constants, the Cartan
metric, adjoint matrices, the root system and its Cartan matrix (which
identifies the algebra as sp(2N, R), root system C_N), and the trace Casimirs
U_{2m} = tr((τΔ)^{2m}).
"""
import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy.polys.matrices import DomainMatrix

from .brackets import bracket_general, tau_matrix
from .exceptions import ClassificationError, DimensionMismatchError
from .moments import MomentExpression, MomentIndex, PhasePoint
from .schemas.reports import ClassificationReport

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


def second_order_pairs(N: int) -> List[Pair]:
    """Pairs (i <= j) in the same order as ``enumerate_moments(N, 2)``."""
    return [(i, j) for i in range(2 * N) for j in range(i, 2 * N)]


def block_ordered_pairs(N: int) -> List[Pair]:
    """Per-pair blocks (π_j², π_jq_j, q_j²), then cross terms (π_jπ_k, π_jq_k, π_kq_j, q_jq_k)."""
    pairs: List[Pair] = []
    for j in range(N):
        pairs += [(N + j, N + j), (j, N + j), (j, j)]
    for j, k in itertools.combinations(range(N), 2):
        pairs += [(N + j, N + k), (k, N + j), (j, N + k), (j, k)]
    return pairs


def pair_moment(N: int, pair: Pair) -> MomentIndex:
    exponents = [0] * (2 * N)
    for slot in pair:
        exponents[slot] += 1
    return MomentIndex.from_exponents(exponents)


def moment_pair(idx: MomentIndex) -> Pair:
    if idx.order != 2:
        raise ValueError(f"{idx} is not a second-order moment")
    slots = [slot for slot, e in enumerate(idx.exponents) for _ in range(e)]
    return slots[0], slots[1]


@dataclass(frozen=True)
class StructureConstants:
    N: int
    tau: np.ndarray
    pairs: Tuple[Pair, ...]
    # twice the symmetrized f^{(mn)}_{ij;kl}, indexed [i, j, k, l, m, n]
    doubled: np.ndarray
    # coefficient of Δ_R in {Δ_P, Δ_Q}, indexed [P, Q, R] over ``pairs``
    table: np.ndarray

    def index(self, pair: Pair) -> int:
        return self.pairs.index(tuple(sorted(pair)))

    def bracket(self, P: Pair, Q: Pair) -> MomentExpression:
        row = self.table[self.index(P), self.index(Q)]
        result = MomentExpression()
        for R, coefficient in enumerate(row):
            if coefficient:
                result += MomentExpression.of(pair_moment(self.N, self.pairs[R]), int(coefficient))
        return result


@lru_cache(maxsize=None)
def structure_constants(N: int) -> StructureConstants:
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    tau = tau_matrix(N)
    if not np.array_equal(tau @ tau, -np.eye(2 * N, dtype=np.int64)):
        raise ClassificationError("τ does not square to −1")
    eye = np.eye(2 * N, dtype=np.int64)
    f = (
        np.einsum("ik,jm,ln->ijklmn", tau, eye, eye)
        + np.einsum("il,jm,kn->ijklmn", tau, eye, eye)
        + np.einsum("jk,im,ln->ijklmn", tau, eye, eye)
        + np.einsum("jl,im,kn->ijklmn", tau, eye, eye)
    )
    doubled = f + f.transpose(0, 1, 2, 3, 5, 4)
    pairs = tuple(second_order_pairs(N))
    table = np.zeros((len(pairs), len(pairs), len(pairs)), dtype=np.int64)
    for P, (i, j) in enumerate(pairs):
        for Q, (k, l) in enumerate(pairs):
            for R, (m, n) in enumerate(pairs):
                value = doubled[i, j, k, l, m, n]
                table[P, Q, R] = value // 2 if m == n else value
    return StructureConstants(N=N, tau=tau, pairs=pairs, doubled=doubled, table=table)


def cartan_metric(N: int, ordering: Optional[Sequence[Pair]] = None) -> np.ndarray:
    """g_{ij;kl} = Σ f^{(op)}_{ij;mn} f^{(mn)}_{kl;op} over the pair basis."""
    constants = structure_constants(N)
    quadrupled = np.einsum("ijmnop,klopmn->ijkl", constants.doubled, constants.doubled)
    if np.any(quadrupled % 4):
        raise ClassificationError("Cartan metric is not integral")
    g = quadrupled // 4
    pairs = list(ordering) if ordering is not None else list(constants.pairs)
    return np.array([[g[i, j, k, l] for (k, l) in pairs] for (i, j) in pairs], dtype=np.int64)


def expected_cartan_metric(N: int, ordering: Optional[Sequence[Pair]] = None) -> np.ndarray:
    """4(N+1)(τ_il τ_kj + τ_ik τ_lj)"""
    tau = tau_matrix(N)
    pairs = list(ordering) if ordering is not None else second_order_pairs(N)
    return np.array(
        [
            [4 * (N + 1) * (tau[i, l] * tau[k, j] + tau[i, k] * tau[l, j]) for (k, l) in pairs]
            for (i, j) in pairs
        ],
        dtype=np.int64,
    )


def adjoint_matrix(generator: MomentIndex, N: int) -> np.ndarray:
    """Matrix of {generator, ·} on the second-order basis (columns are inputs)."""
    if generator.N != N:
        raise DimensionMismatchError(f"{generator} does not belong to N={N}")
    constants = structure_constants(N)
    P = constants.index(moment_pair(generator))
    return constants.table[P].T.copy()


def c_series_cartan_matrix(N: int) -> np.ndarray:
    matrix = 2 * np.eye(N, dtype=np.int64)
    for i in range(N - 1):
        matrix[i, i + 1] = -1
        matrix[i + 1, i] = -1
    if N > 1:
        matrix[N - 1, N - 2] = -2
    return matrix


def c_series_roots(N: int) -> Counter:
    roots: Counter = Counter()
    for i in range(N):
        for sign in (1, -1):
            vector = [0] * N
            vector[i] = 2 * sign
            roots[tuple(vector)] += 1
    for i, j in itertools.combinations(range(N), 2):
        for si, sj in itertools.product((1, -1), repeat=2):
            vector = [0] * N
            vector[i], vector[j] = si, sj
            roots[tuple(vector)] += 1
    return roots


@dataclass
class RootData:
    N: int
    cartan_basis: List[MomentIndex]
    roots: List[Tuple[int, ...]]
    root_moments: Dict[MomentIndex, Tuple[int, ...]]
    simple_roots: List[Tuple[int, ...]]
    simple_root_moments: List[MomentIndex]
    cartan_matrix: List[List[int]]
    cartan_gram: List[List[int]] = field(default_factory=list)
    classification: str = ""


def root_system(N: int) -> RootData:
    constants = structure_constants(N)
    cartan_pairs = [(j, N + j) for j in range(N)]
    cartan_basis = [pair_moment(N, pair) for pair in cartan_pairs]
    adjoints = [adjoint_matrix(h, N) for h in cartan_basis]
    for h, ad in zip(cartan_basis, adjoints):
        if np.any(ad - np.diag(np.diag(ad))):
            raise ClassificationError(f"ad({h}) is not diagonal on the pair basis")

    root_moments: Dict[MomentIndex, Tuple[int, ...]] = {}
    for P, pair in enumerate(constants.pairs):
        if pair in cartan_pairs:
            continue
        root_moments[pair_moment(N, pair)] = tuple(int(ad[P, P]) for ad in adjoints)
    roots = list(root_moments.values())

    simple_pairs = [(j + 1, N + j) for j in range(N - 1)] + [(2 * N - 1, 2 * N - 1)]
    simple_moments = [pair_moment(N, pair) for pair in simple_pairs]
    simple_roots = [root_moments[idx] for idx in simple_moments]

    metric = cartan_metric(N)
    cartan_indices = [constants.index(pair) for pair in cartan_pairs]
    gram = metric[np.ix_(cartan_indices, cartan_indices)]
    inverse = sympy.Matrix(gram.tolist()).inv()

    def inner(a: Sequence[int], b: Sequence[int]) -> Fraction:
        value = (sympy.Matrix([a]) * inverse * sympy.Matrix(b))[0, 0]
        return Fraction(int(value.p), int(value.q))

    cartan = []
    for a in simple_roots:
        row = []
        for b in simple_roots:
            entry = 2 * inner(a, b) / inner(b, b)
            if entry.denominator != 1:
                raise ClassificationError(f"non-integral Cartan matrix entry {entry}")
            row.append(int(entry))
        cartan.append(row)

    data = RootData(
        N=N,
        cartan_basis=cartan_basis,
        roots=roots,
        root_moments=root_moments,
        simple_roots=simple_roots,
        simple_root_moments=simple_moments,
        cartan_matrix=cartan,
        cartan_gram=gram.tolist(),
    )
    if Counter(roots) != c_series_roots(N):
        raise ClassificationError(f"roots {sorted(roots)} do not form C_{N}")
    if not np.array_equal(np.array(cartan), c_series_cartan_matrix(N)):
        raise ClassificationError(f"Cartan matrix {cartan} is not of type C_{N}")
    data.classification = f"C_{N}"
    logger.debug("N=%d classified as %s", N, data.classification)
    return data


def off_cartan_generators(N: int) -> List[MomentIndex]:
    cartan_pairs = {(j, N + j) for j in range(N)}
    return [pair_moment(N, pair) for pair in second_order_pairs(N) if pair not in cartan_pairs]


def nilpotency_index(generator: MomentIndex, N: int) -> Optional[int]:
    """Smallest k with ad(generator)^k = 0, or None if ad is not nilpotent."""
    ad = adjoint_matrix(generator, N)
    power = np.eye(len(ad), dtype=ad.dtype)
    for k in range(1, len(ad) + 1):
        power = power @ ad
        if not np.any(power):
            return k
    return None


def metric_determinant(N: int) -> int:
    """Exact determinant of the Cartan metric; nonzero for a semisimple algebra."""
    return int(DomainMatrix.from_Matrix(sympy.Matrix(cartan_metric(N).tolist())).det())


def _second_order_matrix(point: PhasePoint) -> np.ndarray:
    N = point.N
    matrix = np.zeros((2 * N, 2 * N))
    for i, j in second_order_pairs(N):
        matrix[i, j] = matrix[j, i] = point.value(pair_moment(N, (i, j)))
    return matrix


def _check_casimir_degree(m: int, N: int) -> None:
    if m < 1 or m > N:
        raise ValueError(f"trace Casimir degree m must satisfy 1 <= m <= N={N}, got {m}")


def casimir_trace(m: int, point: PhasePoint) -> float:
    """U_{2m} = tr((τΔ)^{2m})"""
    _check_casimir_degree(m, point.N)
    product = tau_matrix(point.N) @ _second_order_matrix(point)
    return float(np.trace(np.linalg.matrix_power(product, 2 * m)))


def casimir_gradient(m: int, point: PhasePoint) -> Dict[MomentIndex, float]:
    _check_casimir_degree(m, point.N)
    N = point.N
    tau = tau_matrix(N)
    product = tau @ _second_order_matrix(point)
    X = 2 * m * (np.linalg.matrix_power(product, 2 * m - 1) @ tau)
    gradient = {}
    for i, j in second_order_pairs(N):
        gradient[pair_moment(N, (i, j))] = float(X[j, i] + X[i, j] if i != j else X[i, i])
    return gradient


def casimir_bracket_defect(m: int, point: PhasePoint) -> float:
    """max_r |{U_{2m}, Δ_r}| from the gradient and the structure constants."""
    constants = structure_constants(point.N)
    values = np.array([point.value(pair_moment(point.N, pair)) for pair in constants.pairs])
    gradient = casimir_gradient(m, point)
    grad = np.array([gradient[pair_moment(point.N, pair)] for pair in constants.pairs])
    brackets = constants.table @ values
    return float(np.max(np.abs(grad @ brackets)))


def casimir_expression(m: int, N: int) -> MomentExpression:
    _check_casimir_degree(m, N)
    tau = tau_matrix(N)
    size = 2 * N
    delta = [[MomentExpression.of(pair_moment(N, (min(i, j), max(i, j)))) for j in range(size)] for i in range(size)]
    base = [
        [sum((delta[k][j] * int(tau[i, k]) for k in range(size) if tau[i, k]), MomentExpression()) for j in range(size)]
        for i in range(size)
    ]
    power = base
    for _ in range(2 * m - 1):
        power = [
            [sum((power[i][k] * base[k][j] for k in range(size)), MomentExpression()) for j in range(size)]
            for i in range(size)
        ]
    return sum((power[i][i] for i in range(size)), MomentExpression())


Generators = Dict[str, List[List[object]]]


def _relation_violations(
    generators: Generators,
    bracket: Callable[[object, object], object],
    factor: object,
    is_zero: Callable[[object], bool],
) -> List[str]:
    A, B, C = generators["A"], generators["B"], generators["C"]
    N = len(A)
    indices = list(itertools.product(range(N), repeat=4))
    violations = []

    def delta(a: int, b: int) -> int:
        return int(a == b)

    def check(name: str, value: object, expected: object) -> None:
        if not is_zero(value - factor * expected):
            violations.append(name)

    for i, j, a, b in indices:
        label = f"({i + 1}{j + 1};{a + 1}{b + 1})"
        check("{A,A}" + label, bracket(A[i][j], A[a][b]), 0)
        check("{B,B}" + label, bracket(B[i][j], B[a][b]), 0)
        check(
            "{B,A}" + label,
            bracket(B[i][j], A[a][b]),
            C[b][j] * delta(i, a) + C[a][j] * delta(i, b) + C[b][i] * delta(j, a) + C[a][i] * delta(j, b),
        )
        check("{C,A}" + label, bracket(C[i][j], A[a][b]), A[i][b] * delta(j, a) + A[i][a] * delta(j, b))
        check("{C,B}" + label, bracket(C[i][j], B[a][b]), -B[j][b] * delta(i, a) - B[j][a] * delta(i, b))
        check("{C,C}" + label, bracket(C[i][j], C[a][b]), C[i][b] * delta(a, j) - C[a][j] * delta(i, b))
    return violations


def sp2n_generator_expressions(N: int) -> Generators:
    """A_ij = Δ(π_iπ_j), B_ij = Δ(q_iq_j), C_ij = Δ(q_iπ_j)."""

    def moment(i: int, j: int) -> MomentExpression:
        return MomentExpression.of(pair_moment(N, (min(i, j), max(i, j))))

    return {
        "A": [[moment(N + i, N + j) for j in range(N)] for i in range(N)],
        "B": [[moment(i, j) for j in range(N)] for i in range(N)],
        "C": [[moment(i, N + j) for j in range(N)] for i in range(N)],
    }


def sp2n_isomorphism(point: PhasePoint) -> Dict[str, np.ndarray]:
    N = point.N
    generators = sp2n_generator_expressions(N)
    return {name: np.array([[e.evaluate(point) for e in row] for row in rows]) for name, rows in generators.items()}


def sp2n_relation_violations(N: int) -> List[str]:
    """Relations checked on moment generators with the real bracket.

    The relation table is written for C'_ij = Δ(π_i q_j), the transpose of
    the C returned by :func:`sp2n_isomorphism`.
    """
    generators = sp2n_generator_expressions(N)
    transposed = {**generators, "C": [list(row) for row in zip(*generators["C"])]}
    return _relation_violations(
        transposed,
        lambda x, y: bracket_general(x, y, N),
        1,
        lambda value: MomentExpression._lift(value).is_zero(),
    )


def boson_symbols(N: int, n: int) -> Tuple[List[List[sympy.Symbol]], List[List[sympy.Symbol]]]:
    b = [[sympy.Symbol(f"b_{i + 1}_{a + 1}") for a in range(n)] for i in range(N)]
    bc = [[sympy.Symbol(f"bc_{i + 1}_{a + 1}") for a in range(n)] for i in range(N)]
    return b, bc


def bosonic_generator_expressions(N: int, n: int) -> Generators:
    b, bc = boson_symbols(N, n)
    return {
        "A": [[sum(bc[i][a] * bc[j][a] for a in range(n)) for j in range(N)] for i in range(N)],
        "B": [[sum(b[i][a] * b[j][a] for a in range(n)) for j in range(N)] for i in range(N)],
        "C": [
            [sympy.Rational(1, 2) * sum(bc[i][a] * b[j][a] + b[j][a] * bc[i][a] for a in range(n)) for j in range(N)]
            for i in range(N)
        ],
    }


def boson_bracket(F: sympy.Expr, G: sympy.Expr, N: int, n: int) -> sympy.Expr:
    """Classical bracket with {b*_{iα}, b_{jβ}} = i δ_ij δ_αβ."""
    b, bc = boson_symbols(N, n)
    total = sympy.Integer(0)
    for i in range(N):
        for a in range(n):
            total += sympy.diff(F, bc[i][a]) * sympy.diff(G, b[i][a]) - sympy.diff(F, b[i][a]) * sympy.diff(
                G, bc[i][a]
            )
    return sympy.I * total


def nonfaithful_bosonic_generators(N: int, n: int, bosons: Sequence[Sequence[complex]]) -> Dict[str, np.ndarray]:
    values = np.asarray(bosons, dtype=complex)
    if values.shape != (N, n):
        raise DimensionMismatchError(f"expected boson array of shape {(N, n)}, got {values.shape}")
    conj = values.conj()
    return {
        "A": conj @ conj.T,
        "B": values @ values.T,
        "C": conj @ values.T,
    }


def bosonic_relation_violations(N: int, n: int) -> List[str]:
    """Classical brackets of the boson realization equal −i times the relation table."""
    return _relation_violations(
        bosonic_generator_expressions(N, n),
        lambda x, y: boson_bracket(sympy.sympify(x), sympy.sympify(y), N, n),
        -sympy.I,
        lambda value: sympy.expand(value) == 0,
    )


def complex_sp2_generators(s: float, p: float, k: float) -> Dict[str, complex]:
    """sp(2) generators A, B, C built from the su(1,1) realization; not real."""
    radius = np.sqrt(complex(4 * k + s * s + p * p))
    return {
        "A": 0.5 * (p + 1j * s) * radius,
        "B": 0.5 * (p - 1j * s) * radius,
        "C": 1j * (2 * k + s * s + p * p),
    }


def holstein_primakoff_generators(b: complex, k: float) -> Dict[str, complex]:
    root = np.sqrt(complex(np.conj(b) * b + 2 * k))
    return {
        "A": 1j * np.conj(b) * root,
        "B": -1j * b * root,
        "C": 2j * (np.conj(b) * b + k),
    }


def reality_violation(generators: Mapping[str, complex]) -> float:
    """Largest imaginary part among generators meant to be real moments."""
    return float(max(abs(complex(value).imag) for value in generators.values()))


def classification_report(N: int) -> ClassificationReport:
    data = root_system(N)
    return ClassificationReport(
        N=N,
        dimension=N * (2 * N + 1),
        classification=data.classification,
        cartan_matrix=data.cartan_matrix,
        simple_roots=[list(root) for root in data.simple_roots],
        simple_root_moments=[str(idx) for idx in data.simple_root_moments],
        roots=sorted(list(root) for root in data.roots),
        cartan_metric=cartan_metric(N).tolist(),
        metric_determinant=metric_determinant(N),
    )

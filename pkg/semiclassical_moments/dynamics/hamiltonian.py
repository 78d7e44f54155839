import itertools
import logging
from typing import List, Tuple

from ..brackets import bracket_truncated
from ..moments import (
    BasicVariable,
    Factor,
    MomentExpression,
    MomentIndex,
    basic_variables,
    binomial_vector,
    coordinate_layout,
)
from ..schemas.hamiltonian import HamiltonianSpec

logger = logging.getLogger(__name__)


def effective_hamiltonian(h: HamiltonianSpec, s: int) -> MomentExpression:
    """⟨H⟩ expanded around the expectation values up to semiclassical order ``s``.

    A Weyl-ordered monomial x^P becomes Σ_α C(P, α) x̄^{P−α} Δ(x^α); the
    sum is finite for polynomial H, so the expansion is exact when ``s`` is at
    least the degree.
    """
    if s < 2:
        raise ValueError(f"truncation order must be at least 2, got {s}")
    variables = basic_variables(h.N)
    terms = {}
    for term in h.terms:
        powers = tuple(term.q) + tuple(term.pi)
        for alpha in itertools.product(*[range(p + 1) for p in powers]):
            order = sum(alpha)
            if order == 1 or order > s:
                continue
            factors: List[Factor] = []
            for variable, top, bottom in zip(variables, powers, alpha):
                factors.extend([variable] * (top - bottom))
            if order:
                factors.append(MomentIndex.from_exponents(alpha))
            key = (tuple(factors), 0)
            terms[key] = terms.get(key, 0) + term.exact_coefficient * binomial_vector(powers, alpha)
    return MomentExpression(terms)


def equations_of_motion(heff: MomentExpression, N: int, s: int) -> List[Tuple[Factor, MomentExpression]]:
    """(variable, d variable / dt) for every coordinate of P_s."""
    return [(variable, bracket_truncated(variable, heff, N, s)) for variable in coordinate_layout(N, s)]


def classical_part(heff: MomentExpression) -> MomentExpression:
    return MomentExpression(
        {
            key: value
            for key, value in heff.terms()
            if all(isinstance(f, BasicVariable) for f in key[0])
        }
    )

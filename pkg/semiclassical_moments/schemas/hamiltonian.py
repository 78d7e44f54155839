from fractions import Fraction
from typing import Annotated, Any, List, Literal, Optional

import sympy
from pydantic import AliasChoices, BaseModel, BeforeValidator, ConfigDict, Field, model_validator

from ..moments import BasicVariable, basic_symbol
from ..utils.validator import as_list

Powers = Annotated[List[Annotated[int, Field(ge=0)]], BeforeValidator(as_list)]


class HamiltonianTerm(BaseModel):
    """coefficient · q^k π^l, Weyl ordered."""

    model_config = ConfigDict(extra="forbid")

    q: Annotated[Powers, Field(validation_alias=AliasChoices("q", "q_powers", "k"))]
    pi: Annotated[Powers, Field(validation_alias=AliasChoices("pi", "p", "pi_powers", "l"))]
    coefficient: Annotated[float, Field(validation_alias=AliasChoices("coefficient", "c"))]

    @model_validator(mode="after")
    def _check_lengths(self) -> "HamiltonianTerm":
        if len(self.q) != len(self.pi):
            raise ValueError(f"q and pi powers differ in length: {self.q}, {self.pi}")
        return self

    @property
    def degree(self) -> int:
        return sum(self.q) + sum(self.pi)

    @property
    def exact_coefficient(self) -> Fraction:
        return Fraction(repr(float(self.coefficient)))


class HamiltonianSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    N: Annotated[int, Field(ge=1, validation_alias=AliasChoices("N", "n"))] = 1
    terms: List[HamiltonianTerm] = []
    hbar: Annotated[float, Field(gt=0, validation_alias=AliasChoices("hbar", "h_bar"))] = 1.0
    mass: Annotated[float, Field(gt=0)] = 1.0
    preset: Optional[Literal["harmonic", "free_particle", "quartic"]] = None
    omega: Annotated[float, Field(ge=0)] = 1.0
    coupling: float = 0.25

    @model_validator(mode="before")
    @classmethod
    def _expand_preset(cls, data: Any) -> Any:
        if not isinstance(data, dict) or not data.get("preset") or data.get("terms"):
            return data
        data = dict(data)
        N = data.get("N", data.get("n", 1))
        mass = float(data.get("mass", 1.0))
        omega = float(data.get("omega", 0.0 if data["preset"] == "quartic" else 1.0))
        coupling = float(data.get("coupling", 0.25))
        data["terms"] = _preset_terms(data["preset"], N, mass, omega, coupling)
        return data

    @model_validator(mode="after")
    def _check_terms(self) -> "HamiltonianSpec":
        if not self.terms:
            raise ValueError("Hamiltonian has no terms")
        for term in self.terms:
            if len(term.q) != self.N:
                raise ValueError(f"term {term.q}/{term.pi} does not match N={self.N}")
        return self

    @classmethod
    def harmonic(cls, N: int = 1, mass: float = 1.0, omega: float = 1.0, hbar: float = 1.0) -> "HamiltonianSpec":
        return cls(N=N, mass=mass, omega=omega, hbar=hbar, preset="harmonic")

    @classmethod
    def free_particle(cls, N: int = 1, mass: float = 1.0, hbar: float = 1.0) -> "HamiltonianSpec":
        return cls(N=N, mass=mass, hbar=hbar, omega=0.0, preset="free_particle")

    @classmethod
    def quartic(
        cls, coupling: float = 0.25, mass: float = 1.0, omega: float = 0.0, hbar: float = 1.0, N: int = 1
    ) -> "HamiltonianSpec":
        """π²/2m + mω²q²/2 + coupling·q⁴ per pair."""
        return cls(N=N, mass=mass, omega=omega, coupling=coupling, hbar=hbar, preset="quartic")

    @property
    def degree(self) -> int:
        return max(term.degree for term in self.terms)

    def to_sympy(self) -> sympy.Expr:
        """Classical Hamiltonian in the basic-variable symbols."""
        q = [basic_symbol(BasicVariable.q(j)) for j in range(self.N)]
        pi = [basic_symbol(BasicVariable.pi(j)) for j in range(self.N)]
        total = sympy.Integer(0)
        for term in self.terms:
            c = term.exact_coefficient
            monomial = sympy.Rational(c.numerator, c.denominator)
            for j in range(self.N):
                monomial *= q[j] ** term.q[j] * pi[j] ** term.pi[j]
            total += monomial
        return total


def _preset_terms(preset: str, N: int, mass: float, omega: float, coupling: float) -> List[dict]:
    terms = []
    for j in range(N):
        unit = [0] * N

        def powers(index: int, power: int) -> List[int]:
            vector = list(unit)
            vector[index] = power
            return vector

        terms.append({"q": list(unit), "pi": powers(j, 2), "coefficient": 1 / (2 * mass)})
        if preset in ("harmonic", "quartic") and omega:
            terms.append({"q": powers(j, 2), "pi": list(unit), "coefficient": mass * omega**2 / 2})
        if preset == "quartic" and coupling:
            terms.append({"q": powers(j, 4), "pi": list(unit), "coefficient": coupling})
    return terms

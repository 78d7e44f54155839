from typing import Annotated, Any, Dict, List, Literal, Mapping, Optional

from pydantic import AliasChoices, BaseModel, BeforeValidator, ConfigDict, Field, model_validator

from ..utils.validator import as_list, moment_names
from .hamiltonian import HamiltonianSpec

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
DEFAULT_RANK_TOL = 1e-10
DEFAULT_VERIFY_TOL = 1e-9
DEFAULT_ORACLE_BASIS = 256
DEFAULT_CONVERGENCE_TOL = 1e-8

FloatList = Annotated[List[float], BeforeValidator(as_list)]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GaussianState(StrictModel):
    """Squeezed Gaussian per pair: centre (q0, pi0), position width σ, covariance c."""

    q0: FloatList = [0.0]
    pi0: Annotated[FloatList, Field(validation_alias=AliasChoices("pi0", "p0"))] = [0.0]
    widths: Annotated[FloatList, Field(validation_alias=AliasChoices("widths", "sigma"))] = [1.0]
    correlations: Optional[FloatList] = None

    @model_validator(mode="after")
    def _check(self) -> "GaussianState":
        n = len(self.widths)
        if len(self.q0) != n or len(self.pi0) != n:
            raise ValueError("q0, pi0 and widths must have one entry per pair")
        if self.correlations is not None and len(self.correlations) != n:
            raise ValueError("correlations must have one entry per pair")
        if any(w <= 0 for w in self.widths):
            raise ValueError("widths must be positive")
        return self

    @property
    def N(self) -> int:
        return len(self.widths)

    @property
    def center(self) -> List[float]:
        return list(self.q0) + list(self.pi0)


class MomentState(StrictModel):
    moments: Annotated[Dict[str, float], BeforeValidator(moment_names())]
    q: FloatList = []
    pi: FloatList = []


class ChartState(StrictModel):
    chart: str
    coordinates: Dict[str, float]
    q: FloatList = []
    pi: FloatList = []


class InitialState(StrictModel):
    gaussian: Optional[GaussianState] = None
    moments: Optional[MomentState] = None
    chart: Optional[ChartState] = None

    @model_validator(mode="before")
    @classmethod
    def _lift_flat_state(cls, data: Any) -> Any:
        """Accept ``{"moments": {...}, "q": .., "pi": ..}`` and ``{"chart": name, "coordinates": ...}``."""
        if not isinstance(data, dict):
            return data
        moments, chart = data.get("moments"), data.get("chart")
        if isinstance(moments, Mapping) and "moments" not in moments:
            data = dict(data)
            data["moments"] = {"moments": moments, **{key: data.pop(key) for key in ("q", "pi") if key in data}}
        elif isinstance(chart, str):
            data = dict(data)
            data["chart"] = {
                "chart": chart,
                **{key: data.pop(key) for key in ("coordinates", "q", "pi") if key in data},
            }
        return data

    @model_validator(mode="after")
    def _exactly_one(self) -> "InitialState":
        given = [name for name in ("gaussian", "moments", "chart") if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"initial state needs exactly one of gaussian, moments, chart; got {given or 'none'}")
        return self


class Tolerances(StrictModel):
    rtol: Annotated[float, Field(gt=0)] = DEFAULT_RTOL
    atol: Annotated[float, Field(gt=0)] = DEFAULT_ATOL
    rank: Annotated[float, Field(gt=0)] = DEFAULT_RANK_TOL
    verify: Annotated[float, Field(gt=0)] = DEFAULT_VERIFY_TOL


class OutputPaths(StrictModel):
    csv: Optional[str] = None
    summary: Optional[str] = None


class OracleOptions(StrictModel):
    enabled: bool = False
    basis: Annotated[int, Field(ge=8)] = DEFAULT_ORACLE_BASIS
    omega_basis: Optional[Annotated[float, Field(gt=0)]] = None
    check_convergence: bool = True
    convergence_tol: Annotated[float, Field(gt=0)] = DEFAULT_CONVERGENCE_TOL


class RunConfig(StrictModel):
    command: Literal["evolve"] = "evolve"
    N: Annotated[int, Field(ge=1, validation_alias=AliasChoices("N", "n"))] = 1
    order: Annotated[int, Field(ge=2, validation_alias=AliasChoices("order", "s"))] = 2
    hbar: Annotated[float, Field(gt=0, validation_alias=AliasChoices("hbar", "h_bar"))] = 1.0
    t_final: Annotated[float, Field(ge=0)] = 1.0
    steps: Annotated[int, Field(ge=1)] = 100
    seed: int = 0
    chart_samples: Annotated[int, Field(ge=0)] = 0
    hamiltonian: HamiltonianSpec
    initial: InitialState
    chart_dynamics: bool = False
    tolerances: Tolerances = Tolerances()
    output: OutputPaths = OutputPaths()
    oracle: OracleOptions = OracleOptions()

    @model_validator(mode="before")
    @classmethod
    def _share_dimensions(cls, data):
        if isinstance(data, dict) and isinstance(data.get("hamiltonian"), dict):
            hamiltonian = dict(data["hamiltonian"])
            for key, aliases in (("N", ("N", "n")), ("hbar", ("hbar", "h_bar"))):
                run_value = next((data[a] for a in aliases if a in data), None)
                if run_value is not None and not any(a in hamiltonian for a in aliases):
                    hamiltonian[key] = run_value
            data = {**data, "hamiltonian": hamiltonian}
        return data

    @model_validator(mode="after")
    def _check_consistency(self) -> "RunConfig":
        if self.hamiltonian.N != self.N:
            raise ValueError(f"hamiltonian N={self.hamiltonian.N} differs from run N={self.N}")
        if self.hamiltonian.hbar != self.hbar:
            raise ValueError(f"hamiltonian hbar={self.hamiltonian.hbar} differs from run hbar={self.hbar}")
        if self.initial.gaussian is not None and self.initial.gaussian.N != self.N:
            raise ValueError(f"Gaussian state has {self.initial.gaussian.N} pairs, run has N={self.N}")
        if (self.chart_dynamics or self.chart_samples) and self.initial.chart is None:
            raise ValueError("chart_dynamics and chart_samples need a chart initial state")
        if self.oracle.enabled and (self.N != 1 or self.initial.gaussian is None):
            raise ValueError("the quantum oracle needs N=1 and a Gaussian initial state")
        return self

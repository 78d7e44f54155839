from typing import Annotated, Any, Dict, List, Optional

from pydantic import BaseModel, Field, computed_field

SCHEMA_VERSION = "semiclassical-moments/1"


class VersionedSchema(BaseModel):
    schema_version: Annotated[str, Field(alias="schema", serialization_alias="schema")] = SCHEMA_VERSION

    model_config = {"populate_by_name": True}


class ChartReport(VersionedSchema):
    chart: str
    coordinates: Dict[str, float]
    tolerance: float
    pushforward_defect: float
    canonical_defect: Optional[float] = None
    casimir_defect: Optional[float] = None
    round_trip_defect: Optional[float] = None
    jacobian_rank: int
    poisson_rank: int
    expected_jacobian_rank: int
    expected_poisson_rank: int
    faithful: bool
    status: str

    @computed_field
    @property
    def passed(self) -> bool:
        return self.status != "fail"


class ChartSampleSummary(VersionedSchema):
    chart: str
    samples: int
    seed: int
    tolerance: float
    max_pushforward_defect: float
    max_canonical_defect: Optional[float] = None
    max_casimir_defect: Optional[float] = None
    max_round_trip_defect: Optional[float] = None
    jacobian_ranks: List[int]
    statuses: List[str]
    reports: Annotated[List[ChartReport], Field(exclude=True)] = []

    @computed_field
    @property
    def passed(self) -> bool:
        return all(status != "fail" for status in self.statuses)


class BracketReport(VersionedSchema):
    left: str
    right: str
    N: int
    order: Optional[int] = None
    result: str
    terms: List[Dict[str, Any]] = []


class ClassificationReport(VersionedSchema):
    N: int
    dimension: int
    classification: str
    cartan_matrix: List[List[int]]
    simple_roots: List[List[int]]
    simple_root_moments: List[str]
    roots: List[List[int]]
    cartan_metric: List[List[int]]
    metric_determinant: int


class DriftReport(BaseModel):
    name: str
    initial: float
    max_abs_drift: float
    max_rel_drift: float


class ComparisonReport(BaseModel):
    quantities: List[str]
    max_abs_error: Dict[str, float]
    rms_error: Dict[str, float]
    t_start: float
    t_end: float

    @computed_field
    @property
    def worst(self) -> float:
        return max(self.max_abs_error.values(), default=0.0)


class EvolutionSummary(VersionedSchema):
    N: int
    order: int
    hbar: float
    steps: int
    t_final: float
    energy: DriftReport
    casimirs: List[DriftReport] = []
    min_uncertainty_product: float
    uncertainty_margin: float
    oracle: Optional[ComparisonReport] = None
    chart: Optional[ChartReport] = None
    chart_samples: Optional[ChartSampleSummary] = None
    csv: Optional[str] = None

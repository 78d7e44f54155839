from .config import (
    DEFAULT_ATOL,
    DEFAULT_CONVERGENCE_TOL,
    DEFAULT_ORACLE_BASIS,
    DEFAULT_RANK_TOL,
    DEFAULT_RTOL,
    DEFAULT_VERIFY_TOL,
    ChartState,
    GaussianState,
    InitialState,
    MomentState,
    OracleOptions,
    OutputPaths,
    RunConfig,
    Tolerances,
)
from .hamiltonian import HamiltonianSpec, HamiltonianTerm
from .reports import (
    SCHEMA_VERSION,
    BracketReport,
    ChartReport,
    ChartSampleSummary,
    ClassificationReport,
    ComparisonReport,
    DriftReport,
    EvolutionSummary,
)

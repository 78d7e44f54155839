from . import charts, dynamics, lie, schemas, utils
from .brackets import (
    bracket_general,
    bracket_single_pair,
    bracket_truncated,
    function_bracket,
    jacobi_defect,
    poisson_matrix,
    poisson_tensor,
    rank_and_kernel,
    tau_matrix,
)
from .charts import CHARTS, Chart, get_chart, verify_chart
from .dynamics import HamiltonianSpec, Trajectory, effective_hamiltonian, equations_of_motion, integrate
from .moments import (
    BasicVariable,
    MomentExpression,
    MomentIndex,
    PhasePoint,
    enumerate_moments,
    evaluate,
    gaussian_point,
    moment_order,
    truncate,
)

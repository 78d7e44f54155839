from ..schemas.hamiltonian import HamiltonianSpec, HamiltonianTerm
from .compare import compare
from .hamiltonian import classical_part, effective_hamiltonian, equations_of_motion
from .integrator import default_casimirs, harmonic_closed_form, integrate, integrate_in_chart
from .oracle import OscillatorBasis, quantum_oracle
from .run import EvolutionRun, check_initial_chart, evolve, initial_point
from .trajectory import Trajectory, column_name, from_points

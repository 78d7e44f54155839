"""Reference quantum evolution for a single degree of freedom.

The Hamiltonian is represented in a truncated harmonic-oscillator basis; the
initial Gaussian is the ground state of its own annihilation operator and
central moments are read off with Weyl-ordered operator products.
"""
import logging
import math
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh

from ..exceptions import ConvergenceError, DimensionMismatchError
from ..moments import BasicVariable, coordinate_layout
from ..schemas.config import DEFAULT_CONVERGENCE_TOL, DEFAULT_ORACLE_BASIS, GaussianState
from ..schemas.hamiltonian import HamiltonianSpec
from .trajectory import Trajectory

logger = logging.getLogger(__name__)


class OscillatorBasis:
    """Q and Π in the lowest ``size`` oscillator states of frequency ``omega``."""

    def __init__(self, size: int, mass: float, omega: float, hbar: float) -> None:
        if size < 2:
            raise ValueError(f"basis needs at least two states, got {size}")
        self.size = size
        lowering = np.diag(np.sqrt(np.arange(1, size, dtype=float)), k=1).astype(complex)
        raising = lowering.conj().T
        self.Q = math.sqrt(hbar / (2 * mass * omega)) * (lowering + raising)
        self.Pi = 1j * math.sqrt(hbar * mass * omega / 2) * (raising - lowering)
        self.identity = np.eye(size, dtype=complex)

    def weyl(self, Q: np.ndarray, Pi: np.ndarray, k: int, l: int) -> np.ndarray:
        """W(Q^k Π^l) = 2^{−k} Σ_j C(k, j) Q^{k−j} Π^l Q^j"""
        power = np.linalg.matrix_power
        middle = power(Pi, l)
        total = sum(math.comb(k, j) * power(Q, k - j) @ middle @ power(Q, j) for j in range(k + 1))
        return total / 2**k


def _truncated_hamiltonian(h: HamiltonianSpec, size: int, omega: float, padding: int) -> np.ndarray:
    basis = OscillatorBasis(size + padding, h.mass, omega, h.hbar)
    H = np.zeros_like(basis.identity)
    for term in h.terms:
        H += term.coefficient * basis.weyl(basis.Q, basis.Pi, term.q[0], term.pi[0])
    H = H[:size, :size]
    return (H + H.conj().T) / 2


def _gaussian_state(state: GaussianState, basis: OscillatorBasis, hbar: float) -> np.ndarray:
    q0, pi0, sigma = state.q0[0], state.pi0[0], state.widths[0]
    c = state.correlations[0] if state.correlations else 0.0
    # b ψ = 0 for b = (Π − π0) − λ(Q − q0)
    lam = c / sigma**2 + 1j * hbar / (2 * sigma**2)
    b = (basis.Pi - pi0 * basis.identity) - lam * (basis.Q - q0 * basis.identity)
    _, vectors = eigh(b.conj().T @ b)
    return vectors[:, 0]


def _weyl_operators(basis: OscillatorBasis, s: int) -> Dict[Tuple[int, int], np.ndarray]:
    return {
        (k, l): basis.weyl(basis.Q, basis.Pi, k, l)
        for k in range(s + 1)
        for l in range(s + 1 - k)
        if k + l
    }


def _moments(psi: np.ndarray, operators: Dict[Tuple[int, int], np.ndarray], s: int) -> Dict[object, float]:
    """Basic values and central moments; W is linear, so centring expands binomially."""
    raw = {key: float(np.real(np.vdot(psi, op @ psi))) for key, op in operators.items()}
    raw[(0, 0)] = 1.0
    q_mean, pi_mean = raw[(1, 0)], raw[(0, 1)]
    values: Dict[object, float] = {BasicVariable.q(): q_mean, BasicVariable.pi(): pi_mean}
    for factor in coordinate_layout(1, s, include_basic=False):
        k, l = factor.exponents
        values[factor] = sum(
            math.comb(k, i) * math.comb(l, j) * (-q_mean) ** (k - i) * (-pi_mean) ** (l - j) * raw[(i, j)]
            for i in range(k + 1)
            for j in range(l + 1)
        )
    return values


def _check_confining(h: HamiltonianSpec) -> None:
    potential = [t for t in h.terms if t.pi[0] == 0 and t.q[0] > 0]
    if not potential:
        return
    top = max(potential, key=lambda t: t.q[0])
    if top.q[0] % 2 or top.coefficient <= 0:
        logger.warning("potential term %g q^%d is not confining; oracle results depend on the basis", top.coefficient, top.q[0])


def _evolve(
    h: HamiltonianSpec, state: GaussianState, times: np.ndarray, s: int, size: int, omega: float
) -> np.ndarray:
    padding = max(h.degree, s) + 1
    H = _truncated_hamiltonian(h, size, omega, padding)
    energies, vectors = eigh(H)
    operators = _weyl_operators(OscillatorBasis(size + padding, h.mass, omega, h.hbar), s)
    psi0 = _gaussian_state(state, OscillatorBasis(size, h.mass, omega, h.hbar), h.hbar)
    amplitudes = vectors.conj().T @ psi0
    layout = coordinate_layout(1, s)
    rows = []
    for t in times:
        psi = vectors @ (np.exp(-1j * energies * t / h.hbar) * amplitudes)
        padded = np.concatenate([psi, np.zeros(padding, dtype=complex)])
        values = _moments(padded, operators, s)
        rows.append([values[f] for f in layout])
    return np.array(rows)


def quantum_oracle(
    h: HamiltonianSpec,
    state: GaussianState,
    times: Sequence[float],
    s: int = 2,
    basis: int = DEFAULT_ORACLE_BASIS,
    omega_basis: Optional[float] = None,
    check_convergence: bool = True,
    tol: float = DEFAULT_CONVERGENCE_TOL,
) -> Trajectory:
    """Moments of the exact quantum evolution of a Gaussian state (N = 1).

    The basis frequency defaults to ħ/(2mσ²) so the oscillator ground state
    has the width of the initial Gaussian. With ``check_convergence`` the run
    is repeated in a basis of twice the size and must agree within ``tol``.
    """
    if h.N != 1 or state.N != 1:
        raise DimensionMismatchError("the quantum oracle handles a single degree of freedom")
    _check_confining(h)
    times = np.asarray(times, dtype=float)
    omega = omega_basis or h.hbar / (2 * h.mass * state.widths[0] ** 2)
    logger.info("oracle: basis %d, omega_b=%g, %d times", basis, omega, len(times))
    states = _evolve(h, state, times, s, basis, omega)
    if check_convergence:
        reference = _evolve(h, state, times, s, 2 * basis, omega)
        scale = np.maximum(1.0, np.abs(reference))
        deviation = float(np.max(np.abs(states - reference) / scale))
        logger.info("oracle: basis doubling changes moments by %.3g", deviation)
        if deviation > tol:
            raise ConvergenceError(
                f"oracle moments moved by {deviation:.3g} when doubling the basis from {basis}", deviation
            )
    return Trajectory(N=1, order=s, hbar=h.hbar, layout=coordinate_layout(1, s), times=times, states=states)
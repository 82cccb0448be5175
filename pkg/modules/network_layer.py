"""Perceptron gate on a register of previous-layer qubits.

Amplitude index = (configuration << 1) | perceptron bit, with previous-layer
qubit 0 as the most significant bit. A previous qubit in |1> contributes
sigma_z = +1 to the potential and |0> contributes -1.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.linalg import expm

from config import X_MAX
from models.config_models import LayerSpec
from models.physics_models import Pulse, QubitState, RegisterState
from modules.propagation import _check_grid, final_unitaries
from modules.qubit_model import HADAMARD, SIGMA_X, SIGMA_Z, ground_state
from utils.logging_setup import get_logger

logger = get_logger("network")

ORACLE_MAX_PREV = 4


@dataclass(frozen=True)
class BranchFidelity:
    configuration: int
    x: float
    mass: float
    excitation: float
    fidelity: float
    out_of_range: bool


def _check_dimensions(layer: LayerSpec, state: RegisterState):
    if state.n_prev != layer.n_prev:
        raise ValueError(
            f"register holds {state.n_prev} previous qubits but the layer expects {layer.n_prev}"
        )


def configuration_spins(n_prev: int) -> np.ndarray:
    """sigma_z values of every configuration, shape (2**n_prev, n_prev)."""
    shifts = np.arange(n_prev - 1, -1, -1)
    bits = (np.arange(2 ** n_prev)[:, None] >> shifts) & 1
    return 2 * bits - 1


def configuration_potentials(layer: LayerSpec) -> np.ndarray:
    """x(sigma) = sum_k w_k sigma_k - b for every configuration."""
    spins = configuration_spins(layer.n_prev)
    return spins @ np.asarray(layer.weights, dtype=float) - layer.bias


def out_of_range_configurations(layer: LayerSpec, omega_f: float, x_max: float = X_MAX) -> List[int]:
    potentials = configuration_potentials(layer)
    return [int(i) for i in np.flatnonzero(np.abs(potentials) > x_max * omega_f * (1 + 1e-12))]


def product_register(previous: Sequence[complex], perceptron: QubitState) -> RegisterState:
    """|previous> (x) |perceptron> for a normalized previous-layer vector of length 2**n_prev."""
    previous = np.asarray(previous, dtype=complex)
    n_prev = int(np.log2(previous.size)) if previous.size else -1
    if n_prev < 0 or 2 ** n_prev != previous.size:
        raise ValueError("previous-layer vector length must be a power of two")
    return RegisterState(amplitudes=np.kron(previous, perceptron.as_array()), n_prev=n_prev)


def hadamard_perceptron(state: RegisterState) -> RegisterState:
    branches = state.branches() @ HADAMARD.T
    return RegisterState(amplitudes=branches.reshape(-1), n_prev=state.n_prev)


def perceptron_gate(pulse: Pulse, layer: LayerSpec, state: RegisterState, x_max: float = X_MAX) -> RegisterState:
    """Evolve every configuration branch under its own potential and reassemble."""
    _check_dimensions(layer, state)
    potentials = configuration_potentials(layer)
    flagged = out_of_range_configurations(layer, pulse.omega_f, x_max)
    if flagged:
        logger.warning(
            f"{len(flagged)} configuration(s) lie outside +/-{x_max:g} omega_f and leave the designed sigmoid range"
        )

    unitaries = final_unitaries(pulse, potentials)
    branches = np.einsum("cij,cj->ci", unitaries, state.branches())
    return RegisterState(amplitudes=branches.reshape(-1), n_prev=state.n_prev)


def phase_correction(state: RegisterState, layer: Optional[LayerSpec] = None) -> RegisterState:
    """Diagonal phase gate leaving every amplitude real and non-negative."""
    if layer is not None:
        _check_dimensions(layer, state)
    return RegisterState(amplitudes=np.abs(state.amplitudes).astype(complex), n_prev=state.n_prev)


def branch_fidelities(
    state: RegisterState,
    layer: LayerSpec,
    omega_f: float,
    x_max: float = X_MAX,
) -> List[BranchFidelity]:
    """Per-configuration overlap of the perceptron branch with the ideal sigmoid output.

    Branches carrying no probability report a NaN fidelity.
    """
    _check_dimensions(layer, state)
    potentials = configuration_potentials(layer)
    flagged = set(out_of_range_configurations(layer, omega_f, x_max))

    reports = []
    for index, (branch, x) in enumerate(zip(state.branches(), potentials)):
        mass = float(np.sum(np.abs(branch) ** 2))
        target = ground_state(float(x), omega_f)
        if mass > 0:
            overlap = abs(branch[0]) * abs(target.amp0) + abs(branch[1]) * abs(target.amp1)
            fidelity = float(min(1.0, overlap ** 2 / mass))
            excitation = float(abs(branch[1]) ** 2 / mass)
        else:
            fidelity = excitation = float("nan")
        reports.append(
            BranchFidelity(
                configuration=index,
                x=float(x),
                mass=mass,
                excitation=excitation,
                fidelity=fidelity,
                out_of_range=index in flagged,
            )
        )
    return reports


def _register_operators(layer: LayerSpec):
    """Diagonal coupling part and the Omega-driven part of the full register Hamiltonian."""
    n = layer.n_prev
    identity = np.eye(2, dtype=complex)
    z_perceptron = np.kron(np.eye(2 ** n), SIGMA_Z)
    x_perceptron = np.kron(np.eye(2 ** n), SIGMA_X)

    coupling = -layer.bias * z_perceptron
    for k, weight in enumerate(layer.weights):
        factors = [identity] * n
        factors[k] = SIGMA_Z
        z_k = factors[0]
        for factor in factors[1:]:
            z_k = np.kron(z_k, factor)
        coupling = coupling + weight * np.kron(z_k, SIGMA_Z)
    # H = -(1/2)(coupling + Omega x_perceptron)
    return -0.5 * coupling, -0.5 * x_perceptron


def full_evolution_oracle(pulse: Pulse, layer: LayerSpec, state: RegisterState) -> RegisterState:
    """Brute-force propagation of the whole register with expm at every midpoint field."""
    _check_dimensions(layer, state)
    if layer.n_prev > ORACLE_MAX_PREV:
        raise ValueError(f"full-register oracle supports at most {ORACLE_MAX_PREV} previous qubits")
    dt = _check_grid(pulse)
    static, drive = _register_operators(layer)

    psi = state.amplitudes.astype(complex)
    for omega in pulse.midpoint_omega():
        psi = expm(-1j * dt * (static + omega * drive)) @ psi
    return RegisterState(amplitudes=psi, n_prev=state.n_prev)

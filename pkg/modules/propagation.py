"""Time-dependent Schrodinger propagation under a sampled pulse.

Each grid step applies the exact 2x2 exponential of H at the midpoint field,
exp(-i H dt) = cos(a) I - i (sin(a)/|n|) n.sigma with H = n.sigma and a = |n| dt.
"""
from typing import Optional, Sequence, Union

import numpy as np

from config import X_MAX
from models.errors import PropagationError
from models.physics_models import DistanceReport, Pulse, QubitState, TransferCurve
from modules.qubit_model import dynamical_state, ground_state

StateLike = Union[QubitState, Sequence[complex], np.ndarray]

# Below this many potentials the per-x scalar loop beats the vectorized one
_SCALAR_LOOP_MAX = 4


def _as_vector(psi0: StateLike) -> np.ndarray:
    vec = psi0.as_array() if isinstance(psi0, QubitState) else np.asarray(psi0, dtype=complex)
    if vec.shape != (2,):
        raise PropagationError(f"initial state must have two amplitudes, got shape {vec.shape}")
    norm = float(np.vdot(vec, vec).real)
    if abs(norm - 1.0) > 1e-10:
        raise PropagationError(f"initial state is not normalized (|psi|^2 = {norm!r})")
    return vec


def _check_grid(pulse: Pulse) -> float:
    steps = np.diff(pulse.grid)
    if len(steps) == 0:
        raise PropagationError("pulse needs at least two samples")
    dt = float(steps[0])
    if dt <= 0 or np.max(np.abs(steps - dt)) > 1e-9 * max(dt, pulse.t_f):
        raise PropagationError("pulse grid must be uniform and increasing")
    return dt


def step_coefficients(omega_mid: np.ndarray, x, dt: float):
    """(u00, u01, u11) of the symmetric step unitaries; u10 = u01."""
    n_z = 0.5 * np.asarray(x, dtype=float)
    n_x = -0.5 * omega_mid
    norm = np.hypot(n_z, n_x)
    angle = norm * dt
    # sin(a)/|n| written through sinc so that |n| = 0 is regular
    k = dt * np.sinc(angle / np.pi)
    cos_a = np.cos(angle)
    return cos_a - 1j * k * n_z, -1j * k * n_x, cos_a + 1j * k * n_z


def propagate(pulse: Pulse, x: float, psi0: StateLike) -> np.ndarray:
    """Trajectory of amplitudes on the pulse grid, shape (len(grid), 2)."""
    vec = _as_vector(psi0)
    dt = _check_grid(pulse)
    u00, u01, u11 = step_coefficients(pulse.midpoint_omega(), x, dt)

    trajectory = np.empty((len(pulse.grid), 2), dtype=complex)
    trajectory[0] = vec
    a0, a1 = complex(vec[0]), complex(vec[1])
    for i, (c00, c01, c11) in enumerate(zip(u00.tolist(), u01.tolist(), u11.tolist()), start=1):
        a0, a1 = c00 * a0 + c01 * a1, c01 * a0 + c11 * a1
        trajectory[i, 0] = a0
        trajectory[i, 1] = a1
    return trajectory


def final_states(pulse: Pulse, xs: Sequence[float], psi0: StateLike) -> np.ndarray:
    """Final amplitudes for every potential in xs, shape (len(xs), 2)."""
    xs = np.asarray(xs, dtype=float)
    if xs.size <= _SCALAR_LOOP_MAX:
        return np.array([propagate(pulse, x, psi0)[-1] for x in xs]).reshape(xs.size, 2)

    vec = _as_vector(psi0)
    dt = _check_grid(pulse)
    a0 = np.full(xs.size, vec[0], dtype=complex)
    a1 = np.full(xs.size, vec[1], dtype=complex)
    for omega in pulse.midpoint_omega():
        c00, c01, c11 = step_coefficients(omega, xs, dt)
        a0, a1 = c00 * a0 + c01 * a1, c01 * a0 + c11 * a1
    return np.stack([a0, a1], axis=-1)


def final_unitaries(pulse: Pulse, xs: Sequence[float]) -> np.ndarray:
    """Full evolution operators U(t_f; x), shape (len(xs), 2, 2)."""
    xs = np.asarray(xs, dtype=float)
    dt = _check_grid(pulse)
    # columns evolve independently: (a0, a1) for |0> and (b0, b1) for |1>
    a0 = np.ones(xs.size, dtype=complex)
    a1 = np.zeros(xs.size, dtype=complex)
    b0 = np.zeros(xs.size, dtype=complex)
    b1 = np.ones(xs.size, dtype=complex)
    for omega in pulse.midpoint_omega():
        c00, c01, c11 = step_coefficients(omega, xs, dt)
        a0, a1 = c00 * a0 + c01 * a1, c01 * a0 + c11 * a1
        b0, b1 = c00 * b0 + c01 * b1, c01 * b0 + c11 * b1
    return np.stack([np.stack([a0, b0], axis=-1), np.stack([a1, b1], axis=-1)], axis=-2)


def protocol_initial_state(pulse: Optional[Pulse] = None) -> QubitState:
    """State the pulse was designed to start from; |+> (up to phase) without a pulse."""
    if pulse is None:
        return dynamical_state(np.pi / 2, np.pi)
    return dynamical_state(pulse.theta0, pulse.beta0)


def default_x_grid(omega_f: float, x_max: float = X_MAX, step: float = 0.1) -> np.ndarray:
    n = int(round(2 * x_max / step)) + 1
    return np.linspace(-x_max, x_max, n) * omega_f


def transfer_function(
    pulse: Pulse,
    x_grid: Optional[Sequence[float]] = None,
    x_max: float = X_MAX,
    bias: float = 0.0,
) -> TransferCurve:
    xs = default_x_grid(pulse.omega_f, x_max) if x_grid is None else np.asarray(x_grid, dtype=float)
    limit = x_max * pulse.omega_f * (1 + 1e-12)
    if np.any(np.abs(xs) > limit):
        raise ValueError(f"x_grid must lie within +/- {x_max} * omega_f")
    finals = final_states(pulse, xs - bias, protocol_initial_state(pulse))
    excitation = np.abs(finals[:, 1]) ** 2
    return TransferCurve(x_over_omega_f=xs / pulse.omega_f, excitation=excitation)


def distance_C(pulse: Pulse, x_max_scaled: float = X_MAX, bias: float = 0.0) -> DistanceReport:
    """F0 = |<0|psi(t_f; -x_max)>|^2, F1 = |<1|psi(t_f; +x_max)>|^2, C = 2 - F0 - F1."""
    if not x_max_scaled > 0:
        raise ValueError("x_max_scaled must be positive")
    edge = x_max_scaled * pulse.omega_f
    finals = final_states(pulse, [-edge - bias, edge - bias], protocol_initial_state(pulse))
    return DistanceReport(F0=float(abs(finals[0, 0]) ** 2), F1=float(abs(finals[1, 1]) ** 2))


def final_ground_fidelity(pulse: Pulse, x: float) -> float:
    """Overlap with the Omega_f ground state after the relative phase is removed."""
    final = propagate(pulse, x, protocol_initial_state(pulse))[-1]
    target = ground_state(x, pulse.omega_f)
    overlap = abs(final[0]) * abs(target.amp0) + abs(final[1]) * abs(target.amp1)
    norm = float(np.vdot(final, final).real)
    return float(min(1.0, overlap ** 2 / norm))

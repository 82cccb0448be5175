"""Closed-form physics of the driven perceptron qubit.

H = -(1/2)(x sigma_z + Omega sigma_x) with hbar = 1 and time in units of t0.
Matrices act on (amp0, amp1) arrays; since |1> = (1, 0)^T in the column
convention, sigma_z reads diag(-1, +1) in this ordering.
"""
import numpy as np

from models.physics_models import Eigensystem2, Hamiltonian2, QubitState

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def sigmoid(x):
    """f(x) = (1/2)(1 + x / sqrt(1 + x^2)), evaluated without cancellation for x < 0."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("sigmoid argument must be finite")
    r = np.sqrt(1.0 + arr * arr)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = np.where(arr >= 0, 0.5 * (1.0 + arr / r), 0.5 / (r * (r - arr)))
    return float(value) if value.ndim == 0 else value


def ground_state(x: float, omega: float) -> QubitState:
    if not omega > 0:
        raise ValueError(f"ground_state needs omega > 0 (got {omega})")
    ratio = x / omega
    # 1 - f(u) = f(-u) keeps both amplitudes accurate in the tails
    return QubitState(complex(np.sqrt(sigmoid(-ratio))), complex(np.sqrt(sigmoid(ratio))))


def hamiltonian(x: float, omega: float) -> Hamiltonian2:
    return Hamiltonian2(diag_z=x, coupling_x=omega)


def _half_angle_squares(x: float, omega: float, gap: float) -> tuple:
    # cos^2(alpha/2) = (R - x) / 2R and sin^2(alpha/2) = (R + x) / 2R
    if x > 0:
        cos_sq = omega * omega / (2 * gap * (gap + x))
        sin_sq = (gap + x) / (2 * gap)
    else:
        cos_sq = (gap - x) / (2 * gap)
        sin_sq = omega * omega / (2 * gap * (gap - x))
    return cos_sq, sin_sq


def eigensystem(x: float, omega: float) -> Eigensystem2:
    gap = float(np.hypot(x, omega))
    if gap == 0.0:
        raise ValueError("eigensystem undefined at zero gap (x = omega = 0)")
    alpha = float(np.arccos(np.clip(-x / gap, -1.0, 1.0)))
    cos_sq, sin_sq = _half_angle_squares(x, omega, gap)
    c, s = np.sqrt(cos_sq), np.sqrt(sin_sq)
    sign = 1.0 if omega >= 0 else -1.0
    return Eigensystem2(
        energy_ground=-gap / 2,
        energy_excited=gap / 2,
        state_ground=QubitState.normalized(sign * c, s),
        state_excited=QubitState.normalized(s, -sign * c),
        mixing_angle=alpha,
    )


def bloch_state(theta: float, beta: float) -> QubitState:
    """Direct evaluation of cos(theta/2) e^{i beta/2}|0> + sin(theta/2) e^{-i beta/2}|1>."""
    return QubitState(
        complex(np.cos(theta / 2) * np.exp(0.5j * beta)),
        complex(np.sin(theta / 2) * np.exp(-0.5j * beta)),
    )


def dynamical_states(theta, beta) -> np.ndarray:
    """Ansatz states in the frame of the synthesized pulse, shape (..., 2).

    The pulse Omega = theta_dot / sin(beta) drives sigma_z applied to the raw
    ansatz state, so amp0 picks up a minus sign.
    """
    theta = np.asarray(theta, dtype=float)
    beta = np.asarray(beta, dtype=float)
    amp0 = -np.cos(theta / 2) * np.exp(0.5j * beta)
    amp1 = np.sin(theta / 2) * np.exp(-0.5j * beta)
    return np.stack([amp0, amp1], axis=-1)


def dynamical_state(theta: float, beta: float) -> QubitState:
    return QubitState.from_array(dynamical_states(theta, beta))


def plus_state() -> QubitState:
    return QubitState.normalized(1.0, 1.0)

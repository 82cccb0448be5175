from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from models.config_models import Provenance

NORM_TOL = 1e-12


@dataclass(frozen=True)
class QubitState:
    """Amplitudes over (|0>, |1>).

    The basis follows |0> = (0, 1)^T, |1> = (1, 0)^T, so sigma_z|1> = +|1> and
    sigma_z|0> = -|0>. Arrays built from a state keep the (amp0, amp1) order.
    """
    amp0: complex
    amp1: complex

    def __post_init__(self):
        norm = abs(self.amp0) ** 2 + abs(self.amp1) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"qubit state is not normalized (|psi|^2 = {norm!r})")

    @classmethod
    def normalized(cls, amp0: complex, amp1: complex) -> "QubitState":
        norm = np.sqrt(abs(amp0) ** 2 + abs(amp1) ** 2)
        return cls(complex(amp0 / norm), complex(amp1 / norm))

    @classmethod
    def from_array(cls, vec: np.ndarray) -> "QubitState":
        return cls(complex(vec[0]), complex(vec[1]))

    def as_array(self) -> np.ndarray:
        return np.array([self.amp0, self.amp1], dtype=complex)

    @property
    def excitation(self) -> float:
        return abs(self.amp1) ** 2

    def overlap(self, other: "QubitState") -> float:
        """|<self|other>|^2, insensitive to global phase."""
        inner = np.conj(self.amp0) * other.amp0 + np.conj(self.amp1) * other.amp1
        return float(abs(inner) ** 2)


@dataclass(frozen=True)
class Hamiltonian2:
    """H = -(1/2)(x sigma_z + Omega sigma_x) in the fixed basis."""
    diag_z: float
    coupling_x: float

    def matrix(self) -> np.ndarray:
        # rows/columns ordered (amp0, amp1); <0|H|0> = +x/2, <1|H|1> = -x/2
        x, omega = self.diag_z, self.coupling_x
        return np.array([[x / 2, -omega / 2], [-omega / 2, -x / 2]], dtype=complex)

    def apply(self, state: QubitState) -> np.ndarray:
        return self.matrix() @ state.as_array()


@dataclass(frozen=True)
class Eigensystem2:
    energy_ground: float
    energy_excited: float
    state_ground: QubitState
    state_excited: QubitState
    mixing_angle: float

    @property
    def gap(self) -> float:
        return self.energy_excited - self.energy_ground


@dataclass(frozen=True, eq=False)
class ThetaAnsatz:
    """Polynomial polar angle theta(t) = sum_i coeffs[i] t^i on [0, t_f]."""
    coeffs: np.ndarray
    t_f: float

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def theta(self, t):
        return np.polynomial.polynomial.polyval(t, self.coeffs)

    def theta_dot(self, t):
        return np.polynomial.polynomial.polyval(t, np.polynomial.polynomial.polyder(self.coeffs))

    def boundary_values(self) -> tuple:
        return (
            float(self.theta(0.0)),
            float(self.theta(self.t_f)),
            float(self.theta_dot(0.0)),
            float(self.theta_dot(self.t_f)),
        )


@dataclass(frozen=True, eq=False)
class BetaTrajectory:
    grid: np.ndarray
    beta: np.ndarray
    epsilon_achieved: float


@dataclass(frozen=True, eq=False)
class Pulse:
    """Control field sampled on a uniform grid over [0, t_f].

    theta0/beta0 fix the protocol initial state the pulse was designed for.
    """
    grid: np.ndarray
    omega: np.ndarray
    provenance: Provenance
    omega_f: float
    theta0: float = np.pi / 2
    beta0: float = np.pi
    config_hash: str = ""
    clamped: bool = False

    @property
    def t_f(self) -> float:
        return float(self.grid[-1])

    @property
    def dt(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def midpoint_omega(self) -> np.ndarray:
        return 0.5 * (self.omega[1:] + self.omega[:-1])


@dataclass(frozen=True)
class SynthesisDiagnostics:
    epsilon_achieved: float
    omega_0: float
    omega_max: float
    clamped: bool
    theta_boundaries: tuple
    config_hash: str


@dataclass(frozen=True, eq=False)
class SynthesisResult:
    pulse: Pulse
    theta: ThetaAnsatz
    beta: BetaTrajectory
    diagnostics: SynthesisDiagnostics


@dataclass(frozen=True, eq=False)
class TransferCurve:
    x_over_omega_f: np.ndarray
    excitation: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.x_over_omega_f) <= 0):
            raise ValueError("transfer curve grid must be strictly increasing")
        if np.any(self.excitation < -1e-9) or np.any(self.excitation > 1 + 1e-9):
            raise ValueError("excitation probabilities must lie in [0, 1]")


@dataclass(frozen=True)
class DistanceReport:
    F0: float
    F1: float

    @property
    def C(self) -> float:
        return 2.0 - self.F0 - self.F1


@dataclass(frozen=True)
class SweepRecord:
    params: Dict[str, float]
    C: float
    config_hash: str
    epsilon_achieved: Optional[float] = None
    omega_0: Optional[float] = None
    failed: bool = False
    note: str = ""
    extra: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class RegisterState:
    """Previous-layer qubits most significant, perceptron qubit least significant."""
    amplitudes: np.ndarray
    n_prev: int

    def __post_init__(self):
        if self.amplitudes.shape != (2 ** (self.n_prev + 1),):
            raise ValueError(
                f"register of {self.n_prev} previous qubits needs {2 ** (self.n_prev + 1)} amplitudes"
            )
        norm = float(np.vdot(self.amplitudes, self.amplitudes).real)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"register state is not normalized (|psi|^2 = {norm!r})")

    def branches(self) -> np.ndarray:
        """View as (2**n_prev, 2): one perceptron amplitude pair per configuration."""
        return self.amplitudes.reshape(2 ** self.n_prev, 2)


@dataclass(frozen=True, eq=False)
class SweepOutcome:
    records: List[SweepRecord]
    best: SweepRecord
    swept: List[str]


@dataclass(frozen=True, eq=False)
class TimeOptimalResult:
    t_f: float
    best: SweepRecord
    witness: "SynthesisResult"
    evaluated: List[SweepRecord]

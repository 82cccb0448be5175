"""Inverse-engineering pulse synthesis.

theta(t) is a polynomial pinned by four boundary values, beta(t) follows from
beta_dot = theta_dot cot(theta) cot(beta) - y integrated backward from
beta(t_f) = pi/2, and the field is Omega = theta_dot / sin(beta).
"""
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from config import BETA_ATOL, BETA_RTOL, COT_THETA_CAP
from models.config_models import Provenance, SynthesisConfig
from models.errors import SynthesisFailure
from models.physics_models import (
    BetaTrajectory,
    Pulse,
    SynthesisDiagnostics,
    SynthesisResult,
    ThetaAnsatz,
)
from modules.qubit_model import sigmoid
from utils.hashing import config_hash
from utils.logging_setup import get_logger

logger = get_logger("ie_synthesis")

Boundary = Tuple[float, float, float, float]


def boundary_conditions(cfg: SynthesisConfig) -> Boundary:
    """(theta(0), theta(t_f), theta_dot(0), theta_dot(t_f)) for the design potential y."""
    theta_0 = 2 * np.arcsin(np.sqrt(sigmoid(cfg.y / cfg.kappa)))
    theta_f = 2 * np.arcsin(np.sqrt(sigmoid(cfg.y / cfg.omega_f)))
    # beta(0) = pi - epsilon with Omega(0) = kappa; beta(t_f) = pi/2
    theta_dot_0 = cfg.kappa * np.sin(cfg.epsilon)
    theta_dot_f = cfg.omega_f * np.sin(np.pi / 2)
    return float(theta_0), float(theta_f), float(theta_dot_0), float(theta_dot_f)


def _boundary_matrix(t_f: float, degree: int) -> np.ndarray:
    powers = np.arange(degree + 1)
    rows = np.zeros((4, degree + 1))
    rows[0, 0] = 1.0
    rows[1] = t_f ** powers
    rows[2, 1] = 1.0
    rows[3, 1:] = powers[1:] * t_f ** (powers[1:] - 1)
    return rows


def solve_theta(
    boundary: Sequence[float],
    t_f: float,
    degree: int = 3,
    free_coeffs: Sequence[float] = (),
) -> ThetaAnsatz:
    """Fit theta = sum a_i t^i; a_2..a_{s-2} are given, a_0, a_1, a_{s-1}, a_s are solved."""
    if degree < 3:
        raise ValueError("the ansatz needs degree >= 3 to meet four boundary values")
    if len(free_coeffs) != degree - 3:
        raise ValueError(f"degree {degree} takes {degree - 3} free coefficients, got {len(free_coeffs)}")
    if t_f <= 0:
        raise SynthesisFailure("singular boundary system: t_f must be positive", time=0.0)

    matrix = _boundary_matrix(t_f, degree)
    rhs = np.asarray(boundary, dtype=float)
    solved = [0, 1, degree - 1, degree]
    free = list(range(2, degree - 1))

    coeffs = np.zeros(degree + 1)
    coeffs[free] = np.asarray(free_coeffs, dtype=float)
    try:
        coeffs[solved] = np.linalg.solve(matrix[:, solved], rhs - matrix[:, free] @ coeffs[free])
    except np.linalg.LinAlgError as exc:
        raise SynthesisFailure(f"singular boundary system: {exc}", time=0.0) from exc

    ansatz = ThetaAnsatz(coeffs=coeffs, t_f=float(t_f))
    residual = np.max(np.abs(np.asarray(ansatz.boundary_values()) - rhs))
    if residual > 1e-10 * max(1.0, np.max(np.abs(rhs))):
        logger.warning(f"theta boundary residual {residual:.3e} for t_f={t_f}, degree={degree}")
    return ansatz


def _beta_rhs(theta: ThetaAnsatz, y: float):
    poly = theta.coeffs
    dpoly = np.polynomial.polynomial.polyder(poly)
    polyval = np.polynomial.polynomial.polyval

    def rhs(t, beta):
        th = polyval(t, poly)
        return [polyval(t, dpoly) * np.cos(th) / np.sin(th) * np.cos(beta[0]) / np.sin(beta[0]) - y]

    return rhs


def _leaves_interval_low(t, beta):
    return beta[0]


def _leaves_interval_high(t, beta):
    return np.pi - beta[0]


_leaves_interval_low.terminal = True
_leaves_interval_high.terminal = True


def integrate_beta(
    theta: ThetaAnsatz,
    y: float,
    t_f: float,
    n_time: int = 20_000,
    method: str = "RK45",
) -> BetaTrajectory:
    grid = np.linspace(0.0, t_f, n_time)

    sin_theta = np.abs(np.sin(theta.theta(grid[1:-1])))
    if np.any(sin_theta < 1.0 / COT_THETA_CAP):
        where = grid[1:-1][np.argmax(sin_theta < 1.0 / COT_THETA_CAP)]
        raise SynthesisFailure("theta reaches 0 or pi inside the interval (cot theta diverges)", time=float(where))

    solution = solve_ivp(
        _beta_rhs(theta, y),
        (t_f, 0.0),
        [np.pi / 2],
        method=method,
        dense_output=True,
        atol=BETA_ATOL,
        rtol=BETA_RTOL,
        events=(_leaves_interval_low, _leaves_interval_high),
    )
    if solution.status == 1:
        hit = [ev[0] for ev in solution.t_events if len(ev)]
        raise SynthesisFailure("beta left (0, pi) during backward integration", time=float(max(hit)))
    if solution.status != 0:
        raise SynthesisFailure(f"beta integration failed: {solution.message}", time=float(solution.t[-1]))

    beta = solution.sol(grid)[0]
    beta[-1] = np.pi / 2
    if not np.all(np.isfinite(beta)) or np.any(np.sin(beta) <= 0):
        bad = int(np.argmax(~np.isfinite(beta) | (np.sin(beta) <= 0)))
        raise SynthesisFailure("beta crossed a branch point of cot(beta)", time=float(grid[bad]))
    return BetaTrajectory(grid=grid, beta=beta, epsilon_achieved=float(np.pi - beta[0]))


def extract_pulse(
    theta: ThetaAnsatz,
    beta: BetaTrajectory,
    omega_cap: float,
    provenance: Provenance = Provenance.IE_CUBIC,
    omega_f: Optional[float] = None,
    config_digest: str = "",
) -> Pulse:
    theta_dot = theta.theta_dot(beta.grid)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        omega = theta_dot / np.sin(beta.beta)
    omega[-1] = theta_dot[-1]

    overflow = ~np.isfinite(omega) | (np.abs(omega) > omega_cap)
    if np.any(overflow):
        logger.warning(
            f"pulse exceeds the cap {omega_cap:g} at {int(overflow.sum())} samples; clamping and flagging"
        )
        omega = np.where(np.isnan(omega), omega_cap, omega)
        omega = np.clip(omega, -omega_cap, omega_cap)

    return Pulse(
        grid=beta.grid,
        omega=omega,
        provenance=provenance,
        omega_f=float(omega_f if omega_f is not None else theta_dot[-1]),
        theta0=float(theta.theta(0.0)),
        beta0=float(beta.beta[0]),
        config_hash=config_digest,
        clamped=bool(np.any(overflow)),
    )


def synthesize(cfg: SynthesisConfig) -> SynthesisResult:
    if cfg.t_f <= 0:
        raise SynthesisFailure("t_f must be positive", time=0.0)

    digest = config_hash(cfg)
    logger.debug(f"Synthesizing {cfg.provenance.value} pulse t_f={cfg.t_f} y={cfg.y} ({digest})")
    boundary = boundary_conditions(cfg)
    theta = solve_theta(boundary, cfg.t_f, cfg.degree, cfg.free_coeffs)
    beta = integrate_beta(theta, cfg.y, cfg.t_f, cfg.n_time, cfg.ode_method)
    pulse = extract_pulse(theta, beta, cfg.cap, cfg.provenance, cfg.omega_f, digest)

    diagnostics = SynthesisDiagnostics(
        epsilon_achieved=beta.epsilon_achieved,
        omega_0=float(pulse.omega[0]),
        omega_max=float(np.max(np.abs(pulse.omega))),
        clamped=pulse.clamped,
        theta_boundaries=boundary,
        config_hash=digest,
    )
    logger.debug(
        f"Done: epsilon_achieved={diagnostics.epsilon_achieved:.3e} Omega(0)={diagnostics.omega_0:.4g}"
    )
    return SynthesisResult(pulse=pulse, theta=theta, beta=beta, diagnostics=diagnostics)

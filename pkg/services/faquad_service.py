"""Fast quasi-adiabatic (FAQUAD) baseline pulses.

The field is ramped from omega_start down to omega_f so that the adiabaticity
parameter mu = |<phi0|d_t phi1>| / (E1 - E0) stays constant at the worst-case
potential x_star. With the fixed eigenvector gauge,
|<phi0|d_Omega phi1>| = |x| / (2 (Omega^2 + x^2)).
"""
import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import minimize_scalar

from config import FAQUAD_RTOL, KAPPA, WORST_CASE_RATIO
from models.config_models import FaquadConfig, Provenance
from models.errors import QuadratureError
from models.physics_models import Pulse
from modules.qubit_model import eigensystem
from utils.hashing import config_hash
from utils.logging_setup import get_logger

logger = get_logger("faquad")


def coupling_matrix_element(x, omega):
    """|<phi0|d_Omega phi1>| in closed form."""
    x = np.asarray(x, dtype=float)
    omega = np.asarray(omega, dtype=float)
    gap_sq = omega * omega + x * x
    if np.any(gap_sq == 0):
        raise ValueError("matrix element undefined at zero gap")
    return np.abs(x) / (2 * gap_sq)


def coupling_matrix_element_fd(x: float, omega: float, step: float = 1e-5) -> float:
    """Central finite difference of the gauge-fixed excited eigenvector."""
    h = step * max(1.0, abs(omega))
    ground = eigensystem(x, omega).state_ground.as_array()
    upper = eigensystem(x, omega + h).state_excited.as_array()
    lower = eigensystem(x, omega - h).state_excited.as_array()
    return float(abs(np.vdot(ground, (upper - lower) / (2 * h))))


def adiabaticity(x, omega, omega_dot):
    """mu = |omega_dot| |<phi0|d_Omega phi1>| / (E1 - E0)."""
    gap = np.hypot(x, omega)
    value = np.abs(omega_dot) * coupling_matrix_element(x, omega) / gap
    return float(value) if np.ndim(value) == 0 else value


def _ctilde_integrand(omega: float, x: float) -> float:
    gap = np.hypot(x, omega)
    return abs(x) / (2 * gap ** 3)


def faquad_ctilde(x: float, omega_start: float, omega_f: float) -> float:
    """c~ = c t_f, the integral of |<phi0|d_Omega phi1>| / gap over [omega_f, omega_start].

    The integrand decays like Omega^-3, so the range is cut into log-spaced panels.
    """
    if x == 0:
        raise ValueError("c~ vanishes at x = 0")
    n_panels = max(1, int(np.ceil(4 * np.log10(omega_start / omega_f))))
    edges = np.geomspace(omega_f, omega_start, n_panels + 1)
    total, error = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        value, err = quad(_ctilde_integrand, lo, hi, args=(x,), epsabs=0.0, epsrel=FAQUAD_RTOL, limit=200)
        total += value
        error += err
    if not np.isfinite(total) or error > 1e-8 * abs(total):
        raise QuadratureError(f"c~ quadrature did not converge (value {total!r}, error {error!r})")
    return total


def numerical_worst_case_x(omega_f: float, omega_start: float = KAPPA) -> float:
    """Potential x > 0 maximizing c~(x), i.e. the slowest-to-satisfy input."""
    result = minimize_scalar(
        lambda x: -faquad_ctilde(x, omega_start, omega_f),
        bounds=(0.05 * omega_f, 20.0 * omega_f),
        method="bounded",
        options={"xatol": 1e-7 * omega_f},
    )
    return float(result.x)


def worst_case_x(omega_f: float, omega_start: float = KAPPA, report: bool = False) -> float:
    if not omega_f > 0:
        raise ValueError("omega_f must be positive")
    x_star = WORST_CASE_RATIO * omega_f
    if report:
        numeric = numerical_worst_case_x(omega_f, omega_start)
        logger.info(f"Worst-case x: using {x_star:.6g}, numerical maximizer of c~ is {numeric:.6g}")
    return x_star


def faquad_closed_form(s, x: float, omega_start: float, omega_f: float) -> np.ndarray:
    """Exact Omega~(s) from the antiderivative F(Omega) = Omega / (2 |x| sqrt(Omega^2 + x^2))."""
    ax = abs(x)

    def antiderivative(omega):
        return omega / (2 * ax * np.hypot(omega, ax))

    f_start, f_end = antiderivative(omega_start), antiderivative(omega_f)
    q = 2 * ax * (f_start - (f_start - f_end) * np.asarray(s, dtype=float))
    return ax * q / np.sqrt(1 - q * q)


def synthesize_faquad(cfg: FaquadConfig) -> Pulse:
    x_star = cfg.x_star if cfg.x_star is not None else worst_case_x(cfg.omega_f, cfg.omega_start)
    ctilde = faquad_ctilde(x_star, cfg.omega_start, cfg.omega_f)
    logger.debug(f"FAQUAD x_star={x_star:.6g} c~={ctilde:.10g} t_f={cfg.t_f}")

    def rhs(s, omega):
        return [-ctilde / (coupling_matrix_element(x_star, omega[0]) / np.hypot(x_star, omega[0]))]

    solution = solve_ivp(
        rhs,
        (0.0, 1.0),
        [cfg.omega_start],
        method="RK45",
        dense_output=True,
        rtol=FAQUAD_RTOL,
        atol=1e-10 * cfg.omega_f,
    )
    if solution.status != 0:
        raise QuadratureError(f"FAQUAD ramp integration failed: {solution.message}")

    s = np.linspace(0.0, 1.0, cfg.n_s)
    omega = solution.sol(s)[0]
    mismatch = abs(omega[-1] - cfg.omega_f) / cfg.omega_f
    if mismatch > 1e-4:
        raise QuadratureError(f"FAQUAD ramp ends at {omega[-1]:.8g} instead of omega_f={cfg.omega_f:.8g}")
    omega[0] = cfg.omega_start

    return Pulse(
        grid=s * cfg.t_f,
        omega=omega,
        provenance=Provenance.FAQUAD,
        omega_f=cfg.omega_f,
        theta0=np.pi / 2,
        beta0=np.pi,
        config_hash=config_hash(cfg, x_star=x_star),
    )


def measured_adiabaticity(pulse: Pulse, x: float) -> np.ndarray:
    """mu(t) along a sampled pulse, with Omega_dot from second-order differences."""
    omega_dot = np.gradient(pulse.omega, pulse.grid)
    return adiabaticity(x, pulse.omega, omega_dot)

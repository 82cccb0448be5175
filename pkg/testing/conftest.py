import numpy as np
import pytest

from models.config_models import FaquadConfig, Provenance, SynthesisConfig
from models.physics_models import Pulse
from services.faquad_service import synthesize_faquad
from services.ie_synthesis import synthesize


def make_pulse(omega_fn, t_f=0.5, n=401, omega_f=1.0, provenance=Provenance.IE_CUBIC):
    grid = np.linspace(0.0, t_f, n)
    return Pulse(grid=grid, omega=omega_fn(grid), provenance=provenance, omega_f=omega_f)


@pytest.fixture
def smooth_pulse():
    """Short hand-made pulse for tests that only need some time-dependent field."""
    return make_pulse(lambda t: 1.0 + 3.0 * np.sin(4 * t) ** 2)


@pytest.fixture(scope="session")
def cubic_t1():
    return synthesize(SynthesisConfig(t_f=1.0))


@pytest.fixture(scope="session")
def cubic_015():
    return synthesize(SynthesisConfig(t_f=0.15))


@pytest.fixture(scope="session")
def quintic_015():
    return synthesize(SynthesisConfig(t_f=0.15, degree=5, free_coeffs=[-50.0, -3980.0]))


@pytest.fixture(scope="session")
def faquad_015():
    return synthesize_faquad(FaquadConfig.matched_to(SynthesisConfig(t_f=0.15)))

import numpy as np
import pytest

from models.physics_models import QubitState
from modules.qubit_model import (
    bloch_state,
    dynamical_state,
    dynamical_states,
    eigensystem,
    ground_state,
    hamiltonian,
    plus_state,
    sigmoid,
)


def test_sigmoid_reference_values():
    assert sigmoid(0.0) == 0.5
    assert sigmoid(12.0) == pytest.approx(0.5 * (1 + 12 / np.sqrt(145)), abs=1e-15)
    assert 0 < sigmoid(-1e8) < 1e-16


def test_sigmoid_is_symmetric_and_vectorized():
    xs = np.linspace(-50, 50, 101)
    values = sigmoid(xs)
    assert values.shape == xs.shape
    assert np.allclose(values + sigmoid(-xs), 1.0, atol=1e-15)
    assert np.all(np.diff(values) > 0)


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_sigmoid_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        sigmoid(bad)


def test_ground_state_populations():
    state = ground_state(12.0, 1.0)
    assert state.excitation == pytest.approx(sigmoid(12.0), abs=1e-14)
    assert abs(state.amp0) ** 2 == pytest.approx(sigmoid(-12.0), abs=1e-14)

    balanced = ground_state(0.0, 1.0)
    assert balanced.amp0 == pytest.approx(1 / np.sqrt(2))
    assert balanced.amp1 == pytest.approx(1 / np.sqrt(2))


@pytest.mark.parametrize("omega", [0.0, -1.0])
def test_ground_state_needs_positive_field(omega):
    with pytest.raises(ValueError):
        ground_state(1.0, omega)


@pytest.mark.parametrize("x, omega", [(12.0, 1.0), (-12.0, 1.0), (0.5, -3.0), (-2.0, 0.0), (3.0, 0.0), (0.0, 2000.0)])
def test_eigensystem_diagonalizes_hamiltonian(x, omega):
    eig = eigensystem(x, omega)
    matrix = hamiltonian(x, omega).matrix()
    ground = eig.state_ground.as_array()
    excited = eig.state_excited.as_array()

    assert np.allclose(matrix @ ground, eig.energy_ground * ground, atol=1e-12)
    assert np.allclose(matrix @ excited, eig.energy_excited * excited, atol=1e-12)
    assert eig.gap == pytest.approx(np.hypot(x, omega))
    assert abs(np.vdot(ground, excited)) < 1e-12


def test_eigensystem_matches_ground_state_for_positive_field():
    eig = eigensystem(-4.0, 2.0)
    assert eig.state_ground.overlap(ground_state(-4.0, 2.0)) == pytest.approx(1.0, abs=1e-14)


def test_eigensystem_rejects_zero_gap():
    with pytest.raises(ValueError):
        eigensystem(0.0, 0.0)


def test_hamiltonian_is_hermitian():
    matrix = hamiltonian(1.3, -0.7).matrix()
    assert np.allclose(matrix, matrix.conj().T)


def test_bloch_state_at_equator():
    state = bloch_state(np.pi / 2, np.pi)
    assert state.amp0 == pytest.approx(1j / np.sqrt(2))
    assert state.amp1 == pytest.approx(-1j / np.sqrt(2))


def test_dynamical_state_is_plus_up_to_phase():
    assert dynamical_state(np.pi / 2, np.pi).overlap(plus_state()) == pytest.approx(1.0, abs=1e-15)


def test_dynamical_states_keep_populations():
    thetas = np.linspace(0.1, 3.0, 7)
    betas = np.linspace(0.2, 2.9, 7)
    states = dynamical_states(thetas, betas)
    assert states.shape == (7, 2)
    assert np.allclose(np.abs(states[:, 1]) ** 2, np.sin(thetas / 2) ** 2)
    assert np.allclose(np.sum(np.abs(states) ** 2, axis=1), 1.0)


def test_unnormalized_state_is_rejected():
    with pytest.raises(ValueError):
        QubitState(1.0, 1.0)

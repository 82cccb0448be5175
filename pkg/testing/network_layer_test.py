import numpy as np
import pytest
from pydantic import ValidationError

from models.config_models import LayerSpec
from models.physics_models import QubitState, RegisterState
from modules.network_layer import (
    branch_fidelities,
    configuration_potentials,
    full_evolution_oracle,
    hadamard_perceptron,
    out_of_range_configurations,
    perceptron_gate,
    phase_correction,
    product_register,
)
from modules.propagation import propagate, transfer_function
from modules.qubit_model import plus_state

ZERO = QubitState(1.0, 0.0)


def _random_register(rng, n_prev):
    amplitudes = rng.normal(size=2 ** (n_prev + 1)) + 1j * rng.normal(size=2 ** (n_prev + 1))
    return RegisterState(amplitudes=amplitudes / np.linalg.norm(amplitudes), n_prev=n_prev)


def test_layer_spec_invariants():
    assert LayerSpec(weights=[1.0, 2.0]).n_prev == 2
    with pytest.raises(ValidationError):
        LayerSpec(weights=[1.0], n_prev=2)
    with pytest.raises(ValidationError):
        LayerSpec(weights=[1.0] * 13)


def test_configuration_potentials_ordering():
    layer = LayerSpec(weights=[1.0, 10.0], bias=0.5)
    # configuration index bits: qubit 0 most significant, bit 1 -> sigma_z = +1
    assert np.allclose(configuration_potentials(layer), [-11.5, 8.5, -9.5, 10.5])


def test_out_of_range_configurations_are_flagged():
    layer = LayerSpec(weights=[8.0, 8.0])
    assert out_of_range_configurations(layer, omega_f=1.0) == [0, 3]


def test_hadamard_acts_on_perceptron_only():
    state = product_register([0.6, 0.8j], ZERO)
    once = hadamard_perceptron(state)
    assert np.allclose(once.branches(), [[0.6 / np.sqrt(2)] * 2, [0.8j / np.sqrt(2)] * 2])
    assert np.allclose(hadamard_perceptron(once).amplitudes, state.amplitudes, atol=1e-12)


def test_gate_matches_single_qubit_propagation(smooth_pulse):
    layer = LayerSpec(weights=[12.0])
    state = hadamard_perceptron(product_register([0.0, 1.0], ZERO))
    out = perceptron_gate(smooth_pulse, layer, state)
    expected = propagate(smooth_pulse, 12.0, plus_state())[-1]
    assert np.allclose(out.branches()[1], expected, atol=1e-12)
    assert np.allclose(out.branches()[0], 0.0)


def test_superposed_input_splits_into_transfer_values(smooth_pulse):
    layer = LayerSpec(weights=[12.0])
    state = hadamard_perceptron(product_register([1 / np.sqrt(2), 1 / np.sqrt(2)], ZERO))
    out = perceptron_gate(smooth_pulse, layer, state)
    curve = transfer_function(smooth_pulse, [-12.0, 12.0])

    reports = branch_fidelities(out, layer, smooth_pulse.omega_f)
    assert [r.x for r in reports] == [-12.0, 12.0]
    assert np.allclose([r.excitation for r in reports], curve.excitation, atol=1e-10)
    assert np.allclose([r.mass for r in reports], 0.5)


def test_zero_weights_give_product_state(smooth_pulse):
    layer = LayerSpec(weights=[0.0, 0.0])
    previous = np.array([0.5, 0.5j, -0.5, 0.5])
    out = perceptron_gate(smooth_pulse, layer, hadamard_perceptron(product_register(previous, ZERO)))
    perceptron = propagate(smooth_pulse, 0.0, plus_state())[-1]
    assert np.allclose(out.amplitudes, np.kron(previous, perceptron), atol=1e-12)


def test_gate_conserves_configuration_populations(smooth_pulse):
    rng = np.random.default_rng(3)
    layer = LayerSpec(weights=[2.0, -5.0, 3.0], bias=1.0)
    state = _random_register(rng, 3)
    out = perceptron_gate(smooth_pulse, layer, state)
    before = np.sum(np.abs(state.branches()) ** 2, axis=1)
    after = np.sum(np.abs(out.branches()) ** 2, axis=1)
    assert np.allclose(before, after, atol=1e-10)


def test_gate_is_linear(smooth_pulse):
    rng = np.random.default_rng(11)
    layer = LayerSpec(weights=[4.0, -1.5])
    u = _random_register(rng, 2).amplitudes
    v = _random_register(rng, 2).amplitudes
    v = v - np.vdot(u, v) * u
    v = v / np.linalg.norm(v)
    alpha, beta = 0.6, 0.8j

    def gate(amplitudes):
        return perceptron_gate(smooth_pulse, layer, RegisterState(amplitudes=amplitudes, n_prev=2)).amplitudes

    assert np.allclose(gate(alpha * u + beta * v), alpha * gate(u) + beta * gate(v), atol=1e-10)


@pytest.mark.parametrize("n_prev", [0, 1, 2, 3, 4])
def test_decomposition_matches_full_register_evolution(smooth_pulse, n_prev):
    rng = np.random.default_rng(100 + n_prev)
    for _ in range(3):
        layer = LayerSpec(weights=list(rng.uniform(-6, 6, size=n_prev)), bias=float(rng.uniform(-2, 2)))
        state = _random_register(rng, n_prev)
        decomposed = perceptron_gate(smooth_pulse, layer, state)
        oracle = full_evolution_oracle(smooth_pulse, layer, state)
        assert np.max(np.abs(decomposed.amplitudes - oracle.amplitudes)) <= 1e-9
        assert np.linalg.norm(oracle.amplitudes) == pytest.approx(1.0, abs=1e-9)


def test_oracle_caps_register_size(smooth_pulse):
    layer = LayerSpec(weights=[1.0] * 5)
    with pytest.raises(ValueError):
        full_evolution_oracle(smooth_pulse, layer, _random_register(np.random.default_rng(0), 5))


def test_dimension_mismatch_is_rejected(smooth_pulse):
    with pytest.raises(ValueError):
        perceptron_gate(smooth_pulse, LayerSpec(weights=[1.0, 2.0]), product_register([1.0, 0.0], ZERO))


def test_phase_correction_strips_phases():
    state = product_register([1.0, 0.0], QubitState.normalized(0.6 * np.exp(0.4j), 0.8 * np.exp(-2.0j)))
    corrected = phase_correction(state)
    assert np.allclose(corrected.branches()[0], [0.6, 0.8])
    assert np.allclose(phase_correction(corrected).amplitudes, corrected.amplitudes)


def test_branch_fidelity_after_correction(cubic_t1):
    layer = LayerSpec(weights=[12.0])
    state = hadamard_perceptron(product_register([1 / np.sqrt(2), 1 / np.sqrt(2)], ZERO))
    out = phase_correction(perceptron_gate(cubic_t1.pulse, layer, state), layer)
    reports = branch_fidelities(out, layer, cubic_t1.pulse.omega_f)
    assert all(0.0 <= r.fidelity <= 1.0 for r in reports)
    assert reports[1].fidelity >= 0.99
    assert not any(r.out_of_range for r in reports)
    assert np.allclose(out.amplitudes.imag, 0.0)


def test_phase_correction_checks_register_size():
    with pytest.raises(ValueError):
        phase_correction(product_register([1.0, 0.0], ZERO), LayerSpec(weights=[1.0, 2.0]))

import numpy as np
import pytest

from ggvqe import ansatz, engine
from ggvqe import hamiltonian as ham
from ggvqe import lattice as lat
from ggvqe import statevector as sv

from conftest import dense_pauli_sum

KINDS = ("gz", "gzx", "gzxh", "cartan")


@pytest.mark.parametrize("kind", KINDS)
def test_engine_matches_reference(kind):
    lattice = lat.build_chain(6)
    spec = ansatz.build_ansatz(lattice, 2, kind)
    rng = np.random.default_rng(31)
    params = rng.uniform(0, 2 * np.pi, spec.param_count)
    fast = engine.run_circuit(spec, params)
    ref = ansatz.apply_circuit_reference(spec, params, sv.zero_state(6))
    assert np.abs(fast - ref.amplitudes).max() < 1e-12


def test_engine_matches_reference_on_toric():
    spec = ansatz.build_gzx(lat.build_toric_edge(1, 1), 2)
    rng = np.random.default_rng(37)
    params = rng.uniform(0, 2 * np.pi, spec.param_count)
    fast = engine.run_circuit(spec, params)
    ref = ansatz.apply_circuit_reference(spec, params, sv.zero_state(4))
    assert np.abs(fast - ref.amplitudes).max() < 1e-12


def test_run_circuit_custom_initial_state():
    spec = ansatz.build_gz(lat.build_chain(3), 1)
    rng = np.random.default_rng(41)
    params = rng.uniform(0, 2 * np.pi, spec.param_count)
    init = sv.random_statevector(3, rng)
    fast = engine.run_circuit(spec, params, init.amplitudes)
    ref = ansatz.apply_circuit_reference(spec, params, init.copy())
    assert np.abs(fast - ref.amplitudes).max() < 1e-12
    assert abs(np.linalg.norm(fast) - 1.0) < 1e-10


def test_run_circuit_param_shape_check():
    spec = ansatz.build_gz(lat.build_chain(3), 1)
    with pytest.raises(ValueError):
        engine.run_circuit(spec, np.zeros(spec.param_count - 1))


def test_tape_is_cached_and_consistent():
    spec = ansatz.build_gz(lat.build_chain(4), 2)
    assert engine.circuit_tape(spec) is engine.circuit_tape(spec)
    params = np.linspace(0, 1, spec.param_count)
    out1 = engine.run_circuit(spec, params)
    out2 = engine.run_circuit(spec, params)
    assert np.array_equal(out1, out2)


def test_pauli_apply_matches_dense():
    rng = np.random.default_rng(43)
    h = ham.heisenberg_j1j2(2, 4, 0.7)
    comp = ham.CompiledPauliSum(h)
    dense = dense_pauli_sum(h)
    psi = sv.random_statevector(8, rng).amplitudes
    assert np.abs(comp.apply(psi) - dense @ psi).max() < 1e-10


def test_pauli_expect_matches_reference():
    rng = np.random.default_rng(47)
    lattice = lat.build_toric_edge(1, 1)
    h = ham.toric_code_hamiltonian(lattice, 0.3)
    comp = ham.CompiledPauliSum(h)
    for _ in range(5):
        state = sv.random_statevector(4, rng)
        assert abs(comp.expect(state.amplitudes) - ham.expectation(state, h)) < 1e-12


def test_adjoint_gradient_energy_matches_expect():
    lattice = lat.build_chain(5)
    spec = ansatz.build_gzx(lattice, 2)
    h = ham.z_probe(5, 4)
    comp = ham.CompiledPauliSum(h)
    rng = np.random.default_rng(53)
    params = rng.uniform(0, 2 * np.pi, spec.param_count)
    energy, grad = engine.adjoint_gradient(spec, params, comp.flips, comp.signs, comp.prefs)
    assert abs(energy - comp.expect(engine.run_circuit(spec, params))) < 1e-12
    assert grad.shape == (spec.param_count,)

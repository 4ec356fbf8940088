import numpy as np
import pytest
from hypothesis import given

from qencode.circuit import Circuit, Gate
from qencode.simulate import (
    MAX_QUBITS,
    SimulationError,
    fidelity,
    phase_aligned_distance,
    run,
    unitary,
)

from conftest import dense_unitary, small_circuits


def test_lsb_ordering():
    assert np.argmax(abs(run(Circuit(3, (Gate("X", (0,)),))))) == 1
    assert np.argmax(abs(run(Circuit(3, (Gate("X", (1,)),))))) == 2
    c = Circuit(2, (Gate("X", (0,)), Gate("X", (1,), (0,))))
    assert np.argmax(abs(run(c))) == 3


def test_anti_control_fires_on_zero():
    c = Circuit(2, (Gate("X", (1,), (0,), ctrl_state=(0,)),))
    assert np.argmax(abs(run(c))) == 2


@given(small_circuits())
def test_kernels_match_dense_oracle(c):
    assert np.allclose(unitary(c), dense_unitary(c), atol=1e-10)


@given(small_circuits())
def test_unitary_is_unitary(c):
    u = unitary(c)
    assert np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-10)


def test_run_from_initial_state():
    psi = np.array([0, 1, 0, 0], dtype=complex)
    out = run(Circuit(2, (Gate("X", (1,), (0,)),)), psi)
    assert np.allclose(out, [0, 0, 0, 1])


def test_global_phase_is_applied():
    out = run(Circuit(1, (), 0.5))
    assert np.isclose(out[0], np.exp(0.5j))


def test_phase_aligned_distance():
    rng = np.random.default_rng(3)
    a = rng.normal(size=8) + 1j * rng.normal(size=8)
    a /= np.linalg.norm(a)
    assert phase_aligned_distance(a, np.exp(1.3j) * a) < 1e-14
    b = np.roll(a, 1)
    brute = min(np.linalg.norm(a - np.exp(1j * t) * b) for t in np.linspace(0, 2 * np.pi, 20001))
    assert phase_aligned_distance(a, b) == pytest.approx(brute, abs=1e-6)
    assert fidelity(a, np.exp(0.2j) * a) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        phase_aligned_distance(a, a[:4])


def test_size_cap():
    with pytest.raises(SimulationError):
        run(Circuit(MAX_QUBITS + 1))

"""Dense statevector execution and the phase-aligned comparison metric."""

from __future__ import annotations

import numpy as np

from .circuit import Circuit, Gate

MAX_QUBITS = 24

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)


class SimulationError(ValueError):
    pass


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(phi: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * phi), np.exp(0.5j * phi)])


def phase(lam: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * lam)])


def u3(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [[c, -np.exp(1j * lam) * s], [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]],
        dtype=complex,
    )


def gate_matrix(g: Gate) -> np.ndarray:
    """Matrix of the gate's base operation on its targets (controls excluded)."""
    k = g.kind
    if k == "X":
        return _X
    if k == "H":
        return _H
    if k == "RY":
        return ry(g.params[0])
    if k == "RZ":
        return rz(g.params[0])
    if k == "PHASE":
        return phase(g.params[0])
    if k == "U3":
        return u3(*g.params)
    if k == "SWAP":
        return np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
    if k == "UNITARY":
        return g.matrix
    if k == "BLOCK":
        return unitary(g.body)
    raise SimulationError(f"no matrix for {k}")


def _apply(psi: np.ndarray, n: int, g: Gate) -> np.ndarray:
    """Apply ``g`` to a state tensor of shape (2,)*n + (batch,); qubit q is axis n-1-q."""
    if g.kind == "BLOCK" and not g.controls:
        mapping = g.targets
        for inner in g.body.gates:
            psi = _apply(psi, n, inner.relabel(mapping))
        return psi * np.exp(1j * g.body.global_phase)
    idx: list = [slice(None)] * (n + 1)
    for c, v in zip(g.controls, g.control_values):
        idx[n - 1 - c] = v
    sub = psi[tuple(idx)]
    # axes of sub that survive: original axes minus the fixed control axes
    remaining = [a for a in range(n) if a not in {n - 1 - c for c in g.controls}]
    k = len(g.targets)
    # local matrix index: target[0] is the least-significant bit
    axes = [remaining.index(n - 1 - t) for t in reversed(g.targets)]
    mat = gate_matrix(g)
    moved = np.moveaxis(sub, axes, list(range(k)))
    shape = moved.shape
    flat = moved.reshape(2**k, -1)
    out = (mat @ flat).reshape(shape)
    psi[tuple(idx)] = np.moveaxis(out, list(range(k)), axes)
    return psi


def _evolve(circuit: Circuit, state: np.ndarray) -> np.ndarray:
    n = circuit.num_qubits
    if n > MAX_QUBITS:
        raise SimulationError(f"{n} qubits exceeds the simulator cap of {MAX_QUBITS}")
    batch = state.shape[1]
    psi = state.reshape((2,) * n + (batch,)).astype(complex, copy=True)
    for g in circuit.gates:
        psi = _apply(psi, n, g)
    return psi.reshape(2**n, batch) * np.exp(1j * circuit.global_phase)


def run(circuit: Circuit, initial: np.ndarray | None = None) -> np.ndarray:
    """Return U|0...0> (or U|initial>) including the circuit's global phase."""
    dim = 2**circuit.num_qubits
    if initial is None:
        state = np.zeros((dim, 1), dtype=complex)
        state[0, 0] = 1.0
    else:
        state = np.asarray(initial, dtype=complex).reshape(dim, 1)
    return _evolve(circuit, state)[:, 0]


def unitary(circuit: Circuit) -> np.ndarray:
    """Full 2^m x 2^m matrix; column i is U|i>."""
    dim = 2**circuit.num_qubits
    return _evolve(circuit, np.eye(dim, dtype=complex))


def phase_aligned_distance(a: np.ndarray, b: np.ndarray) -> float:
    """min over phi of ||a - exp(i phi) b||, using the closed-form optimal phase."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    overlap = np.vdot(b, a)
    mag = abs(overlap)
    rot = overlap / mag if mag > 0 else 1.0
    return float(np.linalg.norm(a - rot * b))


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    return float(abs(np.vdot(a, b)) ** 2)

"""Top-level ``encode``: dispatch, resource accounting and optional validation."""

from __future__ import annotations

import warnings

import numpy as np

from . import patterns as P
from .circuit import Circuit
from .simulate import phase_aligned_distance, run
from .synth.compose import partition_blocks, synth_partition, synth_sum, synth_tensor
from .synth.families import leaf_circuit
from .transpile import transpiled_counts

VALIDATION_MAX_QUBITS = 20


class ValidationError(RuntimeError):
    """Simulated state differs from the analytic vector by more than ``tol``."""

    def __init__(self, message: str, distance: float | None = None):
        super().__init__(message)
        self.distance = distance


def complexity(pattern, N: int) -> str:
    if isinstance(pattern, P.Sparse):
        return "O(s*m)"
    if isinstance(pattern, P.Square):
        w = pattern.k_e - pattern.k_s
        aligned = w & (w - 1) == 0 and pattern.k_s % w == 0
        return "O(m)" if pattern.k_s == 0 or aligned else "O(m^2)"
    if isinstance(pattern, P.Fourier):
        return "O(m^2)"
    if isinstance(pattern, P.Geometric):
        w = N - pattern.k_s
        aligned = w & (w - 1) == 0 and pattern.k_s % w == 0
        return "O(m)" if aligned else "O(m^2)"
    if isinstance(pattern, P.Dicke):
        return "O(k*(m-k))"
    if isinstance(pattern, P.Polynomial):
        d = pattern.degree
        return "O(m)" if d == 0 else f"O(m^{d + 1})"
    if isinstance(pattern, P.Sum):
        return "O(sum_j C_j)"
    if isinstance(pattern, P.Partition):
        return "O(L*m)"
    if isinstance(pattern, P.Tensor):
        return "O(sum_j C_j)"
    return "O(m)"


def synthesize(pattern, N: int) -> tuple[Circuit, float, int, list[str]]:
    """(circuit, success probability, ancilla count, warnings) without validation."""
    P.validate_params(pattern, N)
    notes: list[str] = []
    if isinstance(pattern, P.Sum):
        circ, p, overlap = synth_sum(pattern.terms, N)
        if overlap:
            msg = f"SUM components overlap; post-selection succeeds with probability {p:.6g}"
            warnings.warn(msg, UserWarning, stacklevel=3)
            notes.append(msg)
        return circ, p, circ.num_qubits - P.num_qubits(N), notes
    if isinstance(pattern, P.Partition):
        return synth_partition(pattern.parts, N), 1.0, 0, notes
    if isinstance(pattern, P.Tensor):
        return synth_tensor(pattern.parts, N), 1.0, 0, notes
    return leaf_circuit(pattern, N), 1.0, 0, notes


def data_state(state: np.ndarray, N: int) -> tuple[np.ndarray, float]:
    """Project onto ancilla |0...0> (ancillas are the high qubits); returns (normalized state, probability)."""
    sub = state[:N]
    p = float(np.vdot(sub, sub).real)
    return sub / np.sqrt(p), p


def encode(pattern, N: int, validate: bool = False, tol: float = 1e-6) -> tuple[Circuit, P.EncodingInfo]:
    circ, p, n_anc, notes = synthesize(pattern, N)
    m = P.num_qubits(N)
    tc = transpiled_counts(circ)
    info = P.EncodingInfo(
        pattern_name=pattern.name,
        N=N,
        m=m,
        params=pattern.params(),
        gate_count=len(circ),
        gate_count_1q=tc.gate_count_1q,
        gate_count_2q=tc.gate_count_2q,
        circuit_depth=tc.circuit_depth,
        complexity=complexity(pattern, N),
        success_probability=p,
        circuit_code=circ.listing(),
        num_ancillas=n_anc,
        warnings=notes,
    )
    if isinstance(pattern, P.Partition):
        info.params["num_blocks"] = len(partition_blocks(pattern.parts, N))
    if validate:
        validate_circuit(circ, pattern, N, tol, info)
    return circ, info


def validate_circuit(circ: Circuit, pattern, N: int, tol: float, info: P.EncodingInfo) -> float:
    if circ.num_qubits > VALIDATION_MAX_QUBITS:
        raise ValidationError(
            f"validation needs a {circ.num_qubits}-qubit statevector; cap is {VALIDATION_MAX_QUBITS}"
        )
    target = P.build_vector(pattern, N)
    state, _ = data_state(run(circ), N)
    dist = phase_aligned_distance(target, state)
    if not dist < tol:
        raise ValidationError(f"phase-aligned distance {dist:.3e} exceeds tol {tol:.1e}", dist)
    info.validated = True
    info.vector = target
    return dist

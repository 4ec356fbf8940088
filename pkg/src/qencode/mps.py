"""Approximate loading of arbitrary vectors through a truncated matrix product state.

The vector is split right-to-left into right-canonical site tensors, each
completed to a unitary acting on a bond register (top qubits) plus one
physical qubit.  Applied in order, the cascade leaves the bond register in
|0...0> deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import Circuit, Gate
from .encoding import VALIDATION_MAX_QUBITS, ValidationError, data_state
from .patterns import EncodingInfo
from .simulate import phase_aligned_distance, run
from .transpile import transpiled_counts

CANONICAL_TOL = 1e-8
ORTHONORMAL_TOL = 1e-10
DEPENDENT_TOL = 1e-8


class MpsError(ValueError):
    pass


@dataclass
class MpsTensors:
    """Site tensors of shape (chi_l, 2, chi_r); site 0 is the most significant bit."""

    sites: list[np.ndarray]
    bond_dim: int

    @property
    def num_sites(self) -> int:
        return len(self.sites)

    @property
    def max_bond(self) -> int:
        return max([1] + [a.shape[2] for a in self.sites])

    def check(self, tol: float = CANONICAL_TOL) -> None:
        if not self.sites:
            raise MpsError("no site tensors")
        prev = 1
        for j, a in enumerate(self.sites):
            if a.ndim != 3 or a.shape[1] != 2:
                raise MpsError(f"site {j} has shape {a.shape}, expected (chi_l, 2, chi_r)")
            if a.shape[0] != prev:
                raise MpsError(f"site {j} left bond {a.shape[0]} does not match previous right bond {prev}")
            prev = a.shape[2]
        if prev != 1:
            raise MpsError("last site must have right bond 1")
        for j, a in enumerate(self.sites):
            mat = a.reshape(a.shape[0], -1)
            err = np.max(np.abs(mat @ mat.conj().T - np.eye(a.shape[0])))
            if err > tol:
                raise MpsError(f"site {j} is not right-canonical (deviation {err:.2e})")

    def contract(self) -> np.ndarray:
        out = np.ones((1, 1), dtype=complex)
        for a in self.sites:
            out = np.einsum("pl,lir->pir", out, a).reshape(-1, a.shape[2])
        return out.ravel()


@dataclass
class MpsDiagnostics:
    bond_dim: int
    n_bond: int
    truncation_error_sq: float
    n_padded: int

    def as_dict(self) -> dict:
        return {
            "bond_dim": self.bond_dim,
            "n_bond": self.n_bond,
            "truncation_error_sq": self.truncation_error_sq,
            "n_padded": self.n_padded,
        }


def pad_vector(v) -> tuple[np.ndarray, int]:
    """Zero-pad to the next power of two (at least 2); returns (padded, zeros added)."""
    v = np.asarray(v, dtype=complex).ravel()
    if v.size == 0:
        raise MpsError("empty vector")
    n = max(2, 1 << max(0, (v.size - 1).bit_length()))
    return np.concatenate([v, np.zeros(n - v.size, dtype=complex)]), n - v.size


def _fix_signs(u: np.ndarray, vh: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Make the largest-magnitude entry of every left singular vector real positive."""
    idx = np.argmax(np.abs(u), axis=0)
    ph = u[idx, np.arange(u.shape[1])]
    ph = ph / np.where(np.abs(ph) > 0, np.abs(ph), 1.0)
    return u * ph.conj(), vh * ph[:, None]


def mps_decompose(v, chi: int) -> tuple[MpsTensors, float]:
    """Right-to-left truncated SVD sweep of a length-2^m vector (normalized internally)."""
    if chi < 1:
        raise MpsError("bond dimension must be a positive integer")
    v = np.asarray(v, dtype=complex).ravel()
    n = v.size
    if n < 2 or n & (n - 1):
        raise MpsError(f"length {n} is not a power of two >= 2; pad first")
    norm = np.linalg.norm(v)
    if norm == 0:
        raise MpsError("cannot encode the zero vector")
    m = n.bit_length() - 1
    rest = (v / norm).reshape(n // 2, 2)
    sites: list[np.ndarray] = []
    err = 0.0
    for _ in range(m - 1):
        u, s, vh = np.linalg.svd(rest, full_matrices=False)
        u, vh = _fix_signs(u, vh)
        k = min(chi, s.size)
        err += float(np.sum(s[k:] ** 2))
        r = rest.shape[1] // 2
        sites.append(vh[:k].reshape(k, 2, r))
        rest = (u[:, :k] * s[:k]).reshape(rest.shape[0] // 2, 2 * k)
    first = rest.reshape(1, 2, -1)
    sites.append(first / np.linalg.norm(first))
    sites.reverse()
    return MpsTensors(sites, chi), err


def complete_to_unitary(cols: np.ndarray, dim: int | None = None) -> np.ndarray:
    """Extend orthonormal columns to a square unitary by Gram-Schmidt on unit vectors."""
    cols = np.asarray(cols, dtype=complex)
    if cols.ndim == 1:
        cols = cols[:, None]
    d = cols.shape[0] if dim is None else dim
    if cols.shape[0] != d or cols.shape[1] > d:
        raise MpsError(f"cannot complete a {cols.shape} block to size {d}")
    gram = cols.conj().T @ cols
    if np.max(np.abs(gram - np.eye(cols.shape[1]))) > ORTHONORMAL_TOL:
        raise MpsError("columns are not orthonormal")
    basis = [cols[:, i] for i in range(cols.shape[1])]
    for i in range(d):
        if len(basis) == d:
            break
        w = np.zeros(d, dtype=complex)
        w[i] = 1.0
        for b in basis:
            w = w - np.vdot(b, w) * b
        nw = np.linalg.norm(w)
        if nw < DEPENDENT_TOL:
            continue
        basis.append(w / nw)
    return np.stack(basis, axis=1)


def site_unitary(a: np.ndarray, n_local: int) -> np.ndarray:
    """Unitary on (physical, bond_0, ..., bond_{n_local-1}) with local index phys + 2*bond.

    Maps |l>|0> to sum_{i,r} a[l, i, r] |r>|i>.
    """
    chi_l, _, chi_r = a.shape
    d = 2 << n_local
    iso = np.zeros((d, chi_l), dtype=complex)
    for l in range(chi_l):
        for r in range(chi_r):
            iso[2 * r, l] = a[l, 0, r]
            iso[2 * r + 1, l] = a[l, 1, r]
    full = complete_to_unitary(iso, d)
    # put the prescribed columns at the inputs |l>|phys=0>
    order = [2 * l for l in range(chi_l)]
    order += [i for i in range(d) if i not in set(order)]
    u = np.empty_like(full)
    u[:, order] = full
    return u


def mps_to_circuit(tensors: MpsTensors) -> Circuit:
    """Sequential cascade on m physical qubits (0..m-1) plus bond qubits on top."""
    tensors.check()
    m = tensors.num_sites
    n_bond = math.ceil(math.log2(tensors.max_bond))
    gates = []
    for j, a in enumerate(tensors.sites):
        need = max(a.shape[0], a.shape[2])
        n_local = math.ceil(math.log2(need)) if need > 1 else 0
        phys = m - 1 - j
        qubits = (phys,) + tuple(range(m, m + n_local))
        gates.append(Gate("UNITARY", qubits, matrix=site_unitary(a, n_local), label=f"site{j}"))
    return Circuit(m + n_bond, tuple(gates))


def _info(circ: Circuit, m: int, diag: MpsDiagnostics) -> EncodingInfo:
    tc = transpiled_counts(circ)
    return EncodingInfo(
        pattern_name="MPS",
        N=1 << m,
        m=m,
        params=diag.as_dict(),
        gate_count=len(circ),
        gate_count_1q=tc.gate_count_1q,
        gate_count_2q=tc.gate_count_2q,
        circuit_depth=tc.circuit_depth,
        complexity=f"O(m*chi^2) with chi={diag.bond_dim}",
        success_probability=1.0,
        circuit_code=circ.listing(),
        num_ancillas=diag.n_bond,
    )


def _validate(circ: Circuit, target: np.ndarray, tol: float, info: EncodingInfo) -> float:
    if circ.num_qubits > VALIDATION_MAX_QUBITS:
        raise ValidationError(
            f"validation needs a {circ.num_qubits}-qubit statevector; cap is {VALIDATION_MAX_QUBITS}"
        )
    state, _ = data_state(run(circ), target.size)
    dist = phase_aligned_distance(target, state)
    if not dist < tol:
        raise ValidationError(f"phase-aligned distance {dist:.3e} exceeds tol {tol:.1e}", dist)
    info.validated = True
    info.vector = target
    return dist


def encode_mps(v, bond_dim: int, validate: bool = False, tol: float = 1e-6) -> tuple[Circuit, EncodingInfo]:
    padded, n_pad = pad_vector(v)
    norm = np.linalg.norm(padded)
    if norm == 0:
        raise MpsError("cannot encode the zero vector")
    target = padded / norm
    tensors, err = mps_decompose(target, bond_dim)
    circ = mps_to_circuit(tensors)
    m = tensors.num_sites
    diag = MpsDiagnostics(bond_dim, circ.num_qubits - m, err, n_pad)
    info = _info(circ, m, diag)
    if validate:
        _validate(circ, target, tol, info)
    return circ, info


def encode_mps_from_tensors(
    tensors: MpsTensors | Sequence[np.ndarray], validate: bool = False, tol: float = 1e-6
) -> tuple[Circuit, EncodingInfo]:
    """Cascade for externally supplied right-canonical tensors (truncation error reported as 0)."""
    if not isinstance(tensors, MpsTensors):
        sites = [np.asarray(a, dtype=complex) for a in tensors]
        tensors = MpsTensors(sites, max([1] + [a.shape[2] for a in sites if a.ndim == 3]))
    circ = mps_to_circuit(tensors)
    m = tensors.num_sites
    diag = MpsDiagnostics(tensors.max_bond, circ.num_qubits - m, 0.0, 0)
    info = _info(circ, m, diag)
    if validate:
        _validate(circ, tensors.contract(), tol, info)
    return circ, info

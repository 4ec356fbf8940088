import cmath
import math
import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from qencode import patterns as P
from qencode.circuit import Circuit, Gate

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def record(criterion: int, ok: bool, detail: str = "") -> None:
    line = f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(autouse=True)
def _quiet_overlap_warnings():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="SUM components overlap")
        yield


# ---------------------------------------------------------------------------
# independent dense oracle: full 2^n matrices built with np.kron, qubit q = bit q

_I2 = np.eye(2, dtype=complex)


def base_matrix(kind, params):
    if kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "H":
        return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    if kind == "RY":
        (t,) = params
        return np.array([[math.cos(t / 2), -math.sin(t / 2)], [math.sin(t / 2), math.cos(t / 2)]], dtype=complex)
    if kind == "RZ":
        (t,) = params
        return np.diag([cmath.exp(-0.5j * t), cmath.exp(0.5j * t)])
    if kind == "PHASE":
        (t,) = params
        return np.diag([1, cmath.exp(1j * t)])
    if kind == "U3":
        t, p, l = params
        return np.array(
            [[math.cos(t / 2), -cmath.exp(1j * l) * math.sin(t / 2)],
             [cmath.exp(1j * p) * math.sin(t / 2), cmath.exp(1j * (p + l)) * math.cos(t / 2)]]
        )
    raise ValueError(kind)


def embed_1q(u, target, n):
    out = np.ones((1, 1), dtype=complex)
    for q in reversed(range(n)):
        out = np.kron(out, u if q == target else _I2)
    return out


def controlled_1q(u, target, controls, values, n):
    """Column j maps to u applied on the target bit when the control bits of j match."""
    dim = 1 << n
    mat = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        if not all(((j >> c) & 1) == v for c, v in zip(controls, values)):
            mat[j, j] = 1.0
            continue
        b = (j >> target) & 1
        for out in (0, 1):
            mat[(j & ~(1 << target)) | (out << target), j] = u[out, b]
    return mat


def dense_unitary(circ):
    """Reference matrix for circuits of X/H/RY/RZ/PHASE/U3/SWAP with controls."""
    n = circ.num_qubits
    total = np.eye(1 << n, dtype=complex)
    for g in circ.gates:
        vals = g.control_values
        if g.kind == "SWAP":
            a, b = g.targets
            seq = [(a, b), (b, a), (a, b)]
            for c, t in seq:
                total = controlled_1q(base_matrix("X", ()), t, g.controls + (c,), vals + (1,), n) @ total
            continue
        u = base_matrix(g.kind, g.params)
        if g.controls:
            total = controlled_1q(u, g.targets[0], g.controls, vals, n) @ total
        else:
            total = embed_1q(u, g.targets[0], n) @ total
    return total * cmath.exp(1j * circ.global_phase)


# ---------------------------------------------------------------------------
# documented example parameters, restricted to what is valid at size N


def example_cases(N: int) -> list:
    m = N.bit_length() - 1
    out = []
    cand = [
        P.Sparse([(19, 1.0)]),
        P.Sparse([(1, 3.0), (6, -4.0)]),
        P.Step(4, 1.0),
        P.Square(2, 6, 1.0),
        P.Fourier([(1, 1.0, 0.0)]),
        P.Walsh(2, 1.0, 4.0),
        P.Walsh(2, 1.0, -1.0),
        P.Geometric(0.5),
        P.Geometric(cmath.exp(0.7j)),
        P.Geometric(0.8, 5),
        P.Hamming(0.5),
        P.Staircase(0.5),
        P.Dicke(2),
        P.Polynomial([0.0, 1.0]),
        P.Polynomial([0.0, 4.0, -4.0]),
        P.Sum([(1.0, P.Square(0, N // 2)), (3.0, P.Square(N // 2, N))]),
        P.Sum([(1 + 1j, P.Square(0, N // 2)), (1 - 1j, P.Square(N // 2, N))]),
        P.Sum([(-1.0, P.Square(0, N // 2)), (2.0, P.Square(N // 2, N))]),
        P.Partition([P.Sparse([(2, 0.3), (5, 0.5), (7, 0.7)]), P.Geometric(0.8, 11)]),
        # scaled variants so every family shows up at small N
        P.Sparse([(19 % N, 1.0)]),
        P.Square(N // 4, N // 4 + N // 2 + 1, 1.0),
        P.Walsh(m - 1, 1.0, 4.0),
        P.Geometric(0.8, N // 2 + 1),
        P.Dicke(m // 2),
        P.Partition([P.Sparse([(0, 0.3), (1, 0.5)]), P.Geometric(0.8, 2)]),
    ]
    for p in cand:
        try:
            P.validate_params(p, N)
        except P.PatternError:
            continue
        out.append(p)
    if m >= 4:
        half = 1 << (m // 2)
        out.append(P.Tensor([(P.Fourier([(1, 1.0, 0.0)]), half), (P.Step(max(1, half // 2 + 1)), N // half)]))
    return out


_kinds = st.sampled_from(["X", "H", "RY", "RZ", "PHASE", "U3", "SWAP"])


@st.composite
def small_circuits(draw, max_qubits=4):
    n = draw(st.integers(2, max_qubits))
    gates = []
    for _ in range(draw(st.integers(0, 12))):
        kind = draw(_kinds)
        width = 2 if kind == "SWAP" else 1
        qs = draw(st.permutations(range(n)))
        targets = tuple(qs[:width])
        nctrl = draw(st.integers(0, n - width))
        ctrls = tuple(qs[width : width + nctrl])
        state = tuple(draw(st.integers(0, 1)) for _ in ctrls)
        nparam = {"RY": 1, "RZ": 1, "PHASE": 1, "U3": 3}.get(kind, 0)
        params = tuple(draw(st.floats(-4, 4)) for _ in range(nparam))
        gates.append(Gate(kind, targets, ctrls, params, ctrl_state=state))
    return Circuit(n, tuple(gates), draw(st.floats(-4, 4)))

"""Lowering to the {CX, U3} basis with single-qubit fusion.

Multi-controlled gates are decomposed without clean ancillas: an MCX borrows
idle qubits of the same circuit as dirty ancillas (restored afterwards), and
falls back to a square-root recursion only when the gate spans every qubit.
Dense UNITARY gates go through a quantum Shannon decomposition.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .circuit import Circuit, Gate, flatten
from .simulate import gate_matrix, phase, ry, rz

IDENTITY_TOL = 1e-12
_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class TranspiledCounts:
    gate_count_1q: int
    gate_count_2q: int
    circuit_depth: int


def _wrap(angle: float) -> float:
    """Map into (-pi, pi]."""
    a = math.fmod(angle, 2 * math.pi)
    if a <= -math.pi:
        a += 2 * math.pi
    elif a > math.pi:
        a -= 2 * math.pi
    return a


def zyz_angles(u: np.ndarray) -> tuple[float, float, float, float]:
    """Return (theta, phi, lam, gamma) with u = exp(i*gamma) * U3(theta, phi, lam)."""
    c, s = abs(u[0, 0]), abs(u[1, 0])
    theta = 2 * math.atan2(s, c)
    if c > 1e-14:
        gamma = float(np.angle(u[0, 0]))
        if s > 1e-14:
            phi = float(np.angle(u[1, 0])) - gamma
            lam = float(np.angle(-u[0, 1])) - gamma
        else:
            phi = 0.0
            lam = float(np.angle(u[1, 1])) - gamma
    else:
        phi = 0.0
        gamma = float(np.angle(u[1, 0]))
        lam = float(np.angle(-u[0, 1])) - gamma
    return _wrap(theta), _wrap(phi), _wrap(lam), gamma


def is_identity_up_to_phase(u: np.ndarray, tol: float = IDENTITY_TOL) -> tuple[bool, float]:
    g = float(np.angle(u[0, 0])) if abs(u[0, 0]) > 0.5 else 0.0
    ok = np.max(np.abs(u - np.exp(1j * g) * _I2)) <= tol
    return bool(ok), g


# multiplexed rotations cost 2^k CX; beyond this the MCX route is cheaper
UCR_MAX_CONTROLS = 6
MAX_ROUNDS = 50


class _Lowering:
    """Collects primitive ops ('u', q, mat) and ('cx', c, t)."""

    def __init__(self, num_qubits: int):
        self.n = num_qubits
        self.ops: list[tuple] = []
        self.phase = 0.0

    # primitives -------------------------------------------------------
    def u(self, q: int, mat: np.ndarray):
        self.ops.append(("u", q, mat))

    def cx(self, c: int, t: int):
        self.ops.append(("cx", c, t))

    def free_qubits(self, used: Sequence[int]) -> list[int]:
        s = set(used)
        return [q for q in range(self.n) if q not in s]

    # gates --------------------------------------------------------------
    def gate(self, g: Gate):
        k, ctrl = g.kind, list(g.controls)
        if k == "BLOCK":
            raise AssertionError("flatten before lowering")
        if g.ctrl_state and k in ("RY", "RZ") and len(ctrl) <= UCR_MAX_CONTROLS:
            angles = np.zeros(1 << len(ctrl))
            angles[sum(v << i for i, v in enumerate(g.ctrl_state))] = g.params[0]
            self.uniformly_controlled(ctrl, g.targets[0], angles, ry if k == "RY" else rz)
            return
        if g.ctrl_state:
            flips = [c for c, v in zip(ctrl, g.ctrl_state) if not v]
            for c in flips:
                self.u(c, _X)
            self.gate(Gate(k, g.targets, g.controls, g.params, g.matrix))
            for c in flips:
                self.u(c, _X)
            return
        if k == "UNITARY":
            if ctrl:
                raise NotImplementedError("controlled dense unitaries are not lowered")
            self.dense(g.matrix, list(g.targets))
            return
        if k == "SWAP":
            a, b = g.targets
            self.cx(b, a)
            if ctrl:
                self.mcx(ctrl + [a], b)
            else:
                self.cx(a, b)
            self.cx(b, a)
            return
        t = g.targets[0]
        if not ctrl:
            self.u(t, gate_matrix(g))
        elif k == "X":
            self.mcx(ctrl, t)
        elif k == "RY":
            self.mc_rotation(ctrl, t, g.params[0], ry)
        elif k == "RZ":
            self.mc_rotation(ctrl, t, g.params[0], rz)
        elif k == "PHASE":
            self.mc_phase(ctrl + [t], g.params[0])
        else:
            self.mc_u(ctrl, t, gate_matrix(g))

    def mc_rotation(self, ctrl: list[int], t: int, angle: float, rot):
        if len(ctrl) <= UCR_MAX_CONTROLS:
            angles = np.zeros(1 << len(ctrl))
            angles[-1] = angle
            self.uniformly_controlled(ctrl, t, angles, rot)
            return
        # R(a/2) X R(-a/2) X = R(a) for rotations about Y or Z
        self.u(t, rot(angle / 2))
        self.mcx(ctrl, t)
        self.u(t, rot(-angle / 2))
        self.mcx(ctrl, t)

    def mc_phase(self, qubits: list[int], lam: float):
        """Phase exp(i*lam) on the all-ones state of ``qubits``."""
        if len(qubits) == 1:
            self.u(qubits[0], phase(lam))
            return
        if len(qubits) == 2:
            c, t = qubits
            self.u(c, phase(lam / 2))
            self.cx(c, t)
            self.u(t, phase(-lam / 2))
            self.cx(c, t)
            self.u(t, phase(lam / 2))
            return
        *ctrl, t = qubits
        # C^k P(lam) = C^k RZ(lam) on t times C^{k-1} P(lam/2) on the controls
        self.mc_rotation(ctrl, t, lam, rz)
        self.mc_phase(ctrl, lam / 2)

    def mc_u(self, ctrl: list[int], t: int, mat: np.ndarray):
        theta, phi, lam, gamma = zyz_angles(mat)
        # u = e^{i alpha} RZ(beta) RY(gam) RZ(delta)
        alpha = gamma + (phi + lam) / 2
        beta, gam, delta = phi, theta, lam
        if 3 <= len(ctrl) <= UCR_MAX_CONTROLS:
            # three multiplexed rotations beat two multi-controlled X here
            for angle, rot in ((delta, rz), (gam, ry), (beta, rz)):
                if abs(math.remainder(angle, 4 * math.pi)) > 1e-12:
                    self.mc_rotation(ctrl, t, angle, rot)
            if abs(_wrap(alpha)) > 0:
                self.mc_phase(ctrl, alpha)
            return
        self.u(t, rz((delta - beta) / 2))
        self.mcx(ctrl, t)
        self.u(t, ry(-gam / 2) @ rz(-(delta + beta) / 2))
        self.mcx(ctrl, t)
        self.u(t, rz(beta) @ ry(gam / 2))
        if abs(_wrap(alpha)) > 0:
            self.mc_phase(ctrl, alpha)

    # multi-controlled X -----------------------------------------------------
    def toffoli(self, c1: int, c2: int, t: int):
        tg, tdg = phase(math.pi / 4), phase(-math.pi / 4)
        h = gate_matrix(Gate("H", (t,)))
        self.u(t, h)
        self.cx(c2, t)
        self.u(t, tdg)
        self.cx(c1, t)
        self.u(t, tg)
        self.cx(c2, t)
        self.u(t, tdg)
        self.cx(c1, t)
        self.u(c2, tg)
        self.u(t, tg)
        self.u(t, h)
        self.cx(c1, c2)
        self.u(c1, tg)
        self.u(c2, tdg)
        self.cx(c1, c2)

    def mcx(self, ctrl: list[int], t: int, free: list[int] | None = None):
        k = len(ctrl)
        if free is None:
            free = self.free_qubits(ctrl + [t])
        if k == 0:
            self.u(t, _X)
        elif k == 1:
            self.cx(ctrl[0], t)
        elif k == 2:
            self.toffoli(ctrl[0], ctrl[1], t)
        elif len(free) >= k - 2:
            self._mcx_dirty_linear(ctrl, free[: k - 2], t)
        elif free:
            a = free[0]
            k1 = (k + 1) // 2
            lo, hi = ctrl[:k1], ctrl[k1:]
            for _ in range(2):
                self.mcx(lo, a, hi + [t])
                self.mcx(hi + [a], t, lo)
        else:
            self._mcx_sqrt(ctrl, t)

    def _mcx_dirty_linear(self, x: list[int], a: list[int], t: int):
        """C^n X with n-2 borrowed ancillas, 4(n-2) Toffolis; ancillas restored."""
        n = len(x)
        inner = [(x[i - 1], a[i - 3], a[i - 2]) for i in range(3, n)]
        for _ in range(2):
            self.toffoli(x[n - 1], a[n - 3], t)
            for args in reversed(inner):
                self.toffoli(*args)
            self.toffoli(x[0], x[1], a[0])
            for args in inner:
                self.toffoli(*args)

    def _mcx_sqrt(self, ctrl: list[int], t: int):
        # C^k X = CV(c,t) C^{k-1}X(->c) CV^dag(c,t) C^{k-1}X(->c) C^{k-1}V(->t),  V^2 = X
        v = scipy.linalg.sqrtm(_X).astype(complex)
        *rest, c = ctrl
        self.mc_u([c], t, v)
        self.mcx(rest, c, [t])
        self.mc_u([c], t, v.conj().T)
        self.mcx(rest, c, [t])
        self.mc_u(rest, t, v)

    # dense unitaries -----------------------------------------------------------
    def _last_on(self, q: int, lookback: int = 64) -> tuple | None:
        for op in reversed(self.ops[-lookback:]):
            if q in op[1:2] or (op[0] == "cx" and op[2] == q):
                return op
        return None

    def uniformly_controlled(self, ctrl: list[int], t: int, angles: np.ndarray, rot):
        """Rotation rot(angles[j]) on t when the controls (ctrl[0] = LSB) read j; 2^k CX."""
        k = len(ctrl)
        if k == 0:
            self.u(t, rot(float(angles[0])))
            return
        n = 1 << k
        angles = np.asarray(angles, dtype=float)
        prev = self._last_on(t)
        mirror = prev is not None and prev[0] == "cx" and prev[1] in ctrl
        if mirror and prev[1] != ctrl[-1]:
            # move the matching control to the top so the mirrored sequence opens with it
            order = [c for c in ctrl if c != prev[1]] + [prev[1]]
            perm = np.empty_like(angles)
            for j in range(n):
                bit = {c: (j >> i) & 1 for i, c in enumerate(ctrl)}
                perm[sum(bit[c] << i for i, c in enumerate(order))] = angles[j]
            ctrl, angles = order, perm
        gray = [i ^ (i >> 1) for i in range(n)]
        # theta_i = 2^-k sum_j (-1)^{popcount(j & gray_i)} alpha_j
        sign = np.array([[(-1) ** bin(j & g).count("1") for j in range(n)] for g in gray])
        theta = sign @ angles / n
        seq: list[tuple] = []
        for i in range(n):
            seq.append(("u", t, rot(float(theta[i]))))
            pos = (gray[i] ^ gray[(i + 1) % n]).bit_length() - 1
            seq.append(("cx", ctrl[pos], t))
        # the rotations commute, so the reversed sequence is the same operator
        self.ops.extend(reversed(seq) if mirror else seq)

    def dense(self, mat: np.ndarray, qubits: list[int]):
        """Quantum Shannon decomposition; qubits[0] is the least-significant local bit."""
        n = len(qubits)
        if n == 1:
            self.u(qubits[0], mat)
            return
        half = mat.shape[0] // 2
        (u1, u2), theta, (v1, v2) = scipy.linalg.cossin(mat, p=half, q=half, separate=True)
        *rest, top = qubits
        self._demux(v1, v2, rest, top)
        self.uniformly_controlled(rest, top, 2 * theta, ry)
        self._demux(u1, u2, rest, top)

    def _demux(self, a: np.ndarray, b: np.ndarray, rest: list[int], top: int):
        # diag(a, b) = (I x V)(D (+) D^dag)(I x W) with a b^dag = V D^2 V^dag
        t_mat, v = scipy.linalg.schur(a @ b.conj().T, output="complex")
        d = np.sqrt(np.diag(t_mat).astype(complex))
        w = np.diag(d) @ v.conj().T @ b
        self.dense(w, rest)
        self.uniformly_controlled(rest, top, -2 * np.angle(d), rz)
        self.dense(v, rest)


def lower(circuit: Circuit) -> tuple[list[tuple], float]:
    low = _Lowering(circuit.num_qubits)
    for g in flatten(circuit).gates:
        low.gate(g)
    return low.ops, circuit.global_phase


def _commutes_with_x(u: np.ndarray) -> bool:
    return abs(u[0, 0] - u[1, 1]) < IDENTITY_TOL and abs(u[0, 1] - u[1, 0]) < IDENTITY_TOL


def _is_diagonal(u: np.ndarray) -> bool:
    return abs(u[0, 1]) < IDENTITY_TOL and abs(u[1, 0]) < IDENTITY_TOL


def _is_x(u: np.ndarray) -> bool:
    return abs(u[0, 0]) < IDENTITY_TOL and abs(u[1, 1]) < IDENTITY_TOL and abs(u[0, 1] - u[1, 0]) < IDENTITY_TOL


def _cancel_cx(out: list, history: list[list[int]], c: int, t: int) -> bool:
    """Drop an earlier CX(c, t) reachable through CXs sharing its control or its target."""
    hc, ht = history[c], history[t]
    if not hc or not ht:
        return False
    # (qubit whose last op must be the twin, other qubit, position the other qubit must share)
    for first, second, shared in ((ht, hc, 1), (hc, ht, 2)):
        j = first[-1]
        if out[j] != ("cx", c, t):
            continue
        k = len(second) - 1
        while k >= 0 and second[k] != j:
            op = out[second[k]]
            if op[0] != "cx" or op[shared] != (c if shared == 1 else t):
                break
            k -= 1
        if k >= 0 and second[k] == j:
            out[j] = None
            first.pop()
            del second[k]
            return True
    return False


def _fuse(ops: list[tuple], n: int, backward: bool = False) -> tuple[list[tuple], float]:
    """One sweep of 1q fusion, identity removal and CX cancellation.

    A single-qubit run may be carried across a CX it commutes with; if nothing
    merges into it later it drops back to the slot it was carried from, so
    carrying never lengthens the circuit.  X on both ends of a CX collapses to
    X on the control.  ``backward`` sweeps from the end of the circuit.
    """
    pending: dict[int, list] = {}  # q -> [matrix, reserved slot or None, merged]
    out: list[tuple | None] = []
    history: list[list[int]] = [[] for _ in range(n)]
    gphase = 0.0

    def flush(q: int):
        nonlocal gphase
        entry = pending.pop(q, None)
        if entry is None:
            return
        mat, slot, merged = entry
        ident, g = is_identity_up_to_phase(mat)
        if ident:
            gphase += g
            return
        if slot is not None and not merged:
            out[slot] = ("u", q, mat)
            bisect.insort(history[q], slot)
            return
        history[q].append(len(out))
        out.append(("u", q, mat))

    def carry(q: int):
        entry = pending[q]
        if entry[1] is None or entry[2]:
            entry[1] = len(out)
            entry[2] = False
            out.append(None)

    for op in reversed(ops) if backward else ops:
        if op[0] == "u":
            q = op[1]
            if q not in pending:
                pending[q] = [op[2], None, False]
            else:
                e = pending[q]
                e[0] = e[0] @ op[2] if backward else op[2] @ e[0]
                e[2] = True
            continue
        _, c, t = op
        pc, pt = pending.get(c), pending.get(t)
        moved: set[int] = set()
        if pc is not None and pt is not None and _is_x(pc[0]) and _is_x(pt[0]):
            # X_c X_t on one side of CX(c, t) equals X_c on the other
            gphase += float(np.angle(pc[0][0, 1] * pt[0][0, 1]))
            for q in (c, t):
                if pending[q][1] is not None:
                    out[pending[q][1]] = None
            pending[c] = [_X.copy(), None, True]
            del pending[t]
            moved.add(c)
        for q, ok in ((t, _commutes_with_x), (c, _is_diagonal)):
            if q in pending and q not in moved:
                if ok(pending[q][0]):
                    carry(q)
                else:
                    flush(q)
        if _cancel_cx(out, history, c, t):
            continue
        history[c].append(len(out))
        history[t].append(len(out))
        out.append(("cx", c, t))
    for q in list(pending):
        flush(q)
    res = [o for o in out if o is not None]
    return (res[::-1] if backward else res), gphase


def _ops_to_circuit(ops: list[tuple], n: int, gphase: float) -> Circuit:
    gates = []
    for op in ops:
        if op[0] == "cx":
            gates.append(Gate("X", (op[2],), (op[1],)))
        else:
            theta, phi, lam, g = zyz_angles(op[2])
            gphase += g
            gates.append(Gate("U3", (op[1],), (), (theta, phi, lam)))
    return Circuit(n, tuple(gates), gphase)


def _circuit_to_ops(c: Circuit) -> list[tuple]:
    ops = []
    for g in c.gates:
        if g.kind == "X" and len(g.controls) == 1:
            ops.append(("cx", g.controls[0], g.targets[0]))
        elif g.kind == "U3" and not g.controls:
            ops.append(("u", g.targets[0], gate_matrix(g)))
        else:
            return []
    return ops


def transpile(circuit: Circuit) -> Circuit:
    """Lower to CX + U3, fuse single-qubit runs and cancel CX pairs until stable."""
    if _is_basis(circuit):
        ops, gphase = _circuit_to_ops(circuit), circuit.global_phase
    else:
        ops, gphase = lower(circuit)
    n = circuit.num_qubits
    # rebuild the matrix-level list from U3 params so fusion is stable under repetition
    for _ in range(MAX_ROUNDS):
        before = len(ops)
        for backward in (False, True):
            ops, gp = _fuse(ops, n, backward)
            gphase += gp
        if len(ops) == before:
            break
    return _ops_to_circuit(ops, n, gphase)


def _is_basis(c: Circuit) -> bool:
    return all(
        (g.kind == "X" and len(g.controls) == 1 and not g.ctrl_state) or (g.kind == "U3" and not g.controls)
        for g in c.gates
    )


def depth(circuit: Circuit) -> int:
    """ASAP layering: each gate occupies one layer on every qubit it touches."""
    level = [0] * circuit.num_qubits
    best = 0
    for g in circuit.gates:
        qs = g.qubits
        d = max(level[q] for q in qs) + 1
        for q in qs:
            level[q] = d
        best = max(best, d)
    return best


def counts(transpiled: Circuit) -> TranspiledCounts:
    n2 = sum(1 for g in transpiled.gates if len(g.qubits) >= 2)
    return TranspiledCounts(len(transpiled.gates) - n2, n2, depth(transpiled))


def transpiled_counts(circuit: Circuit) -> TranspiledCounts:
    return counts(transpile(circuit))

"""Synthesizers for the ten leaf pattern families."""

from __future__ import annotations

import cmath
import math
from typing import Sequence

import numpy as np

from ..circuit import Circuit, Gate, block
from ..patterns import COMPLEX_TOL, Fourier, Polynomial, _poly_grid, _popcount, fourier_coefficients, num_qubits
from .builders import draper_add, dyadic_decompose, inverse_qft, sparse_loader, wht

_C = complex


def _phase_of(c) -> float:
    return cmath.phase(_C(c))


def synth_sparse(entries: Sequence[tuple[int, complex]], N: int) -> Circuit:
    return sparse_loader(entries, num_qubits(N))


# ---------------------------------------------------------------------------
# step / square


def _step_gates(k_e: int, m: int) -> list[Gate]:
    """Uniform superposition over [0, k_e) from |0>."""
    if k_e == 1 << m:
        return [Gate("H", (q,)) for q in range(m)]
    bits = [b for b in range(m - 1, -1, -1) if (k_e >> b) & 1]  # l_0 > l_1 > ... > l_t
    t = len(bits) - 1
    gates: list[Gate] = []
    rest = k_e
    for j in range(t):
        # P(bit l_j = 0 | prefix) = 2^{l_j} / (remaining count)
        p0 = (1 << bits[j]) / rest
        theta = 2 * math.acos(math.sqrt(p0))
        ctrl = (bits[j - 1],) if j else ()
        gates.append(Gate("RY", (bits[j],), ctrl, (theta,)))
        rest -= 1 << bits[j]
    # H on every q < l_0 while still inside a block whose bit l_J is 0
    q = 0
    while q < bits[0]:
        J = max(j for j in range(t + 1) if bits[j] > q)
        group = []
        while q < bits[0] and max(j for j in range(t + 1) if bits[j] > q) == J:
            group.append(q)
            q += 1
        if J == t:
            gates.extend(Gate("H", (g,)) for g in group)
        else:
            c = bits[J]
            gates.append(Gate("X", (c,)))
            gates.extend(Gate("H", (g,), (c,)) for g in group)
            gates.append(Gate("X", (c,)))
    return gates


def synth_step(k_e: int, c: complex, N: int) -> Circuit:
    m = num_qubits(N)
    return Circuit(m, tuple(_step_gates(k_e, m)), _phase_of(c))


def synth_square(k_s: int, k_e: int, c: complex, N: int) -> Circuit:
    m = num_qubits(N)
    if k_s == 0:
        return synth_step(k_e, c, N)
    w = k_e - k_s
    if w & (w - 1) == 0 and k_s % w == 0:
        p = w.bit_length() - 1
        gates = [Gate("X", (b,)) for b in range(p, m) if (k_s >> b) & 1]
        gates += [Gate("H", (q,)) for q in range(p)]
        return Circuit(m, tuple(gates), _phase_of(c))
    adder = draper_add(m, k_s)
    return Circuit(m, tuple(_step_gates(w, m)) + adder.gates, _phase_of(c))


# ---------------------------------------------------------------------------
# walsh


def synth_walsh(k: int, c0: complex, c1: complex, N: int) -> Circuit:
    m = num_qubits(N)
    c0, c1 = _C(c0), _C(c1)
    ref = c0 if abs(c0) > COMPLEX_TOL else c1
    rot = ref / abs(ref)
    a0, a1 = c0 / rot, c1 / rot
    gates: list[Gate] = []
    if abs(a0.imag) <= COMPLEX_TOL and abs(a1.imag) <= COMPLEX_TOL:
        s, d = a0.real + a1.real, a0.real - a1.real
        gates.append(Gate("RY", (k,), (), (2 * math.atan2(d, s),)))
        phase = _phase_of(rot)
    else:
        s, d = a0 + a1, a0 - a1
        gates.append(Gate("RY", (k,), (), (2 * math.atan2(abs(d), abs(s)),)))
        ps = cmath.phase(s) if abs(s) > COMPLEX_TOL else 0.0
        pd = cmath.phase(d) if abs(d) > COMPLEX_TOL else ps
        gates.append(Gate("PHASE", (k,), (), (pd - ps,)))
        phase = _phase_of(rot) + ps
    gates += [Gate("H", (q,)) for q in range(m)]
    return Circuit(m, tuple(gates), phase)


# ---------------------------------------------------------------------------
# product states


def _qubit_amp_gate(q: int, log_mag: float, arg: float) -> Gate:
    """Gate taking |0> to (|0> + rho|1>)/norm with |rho| = exp(log_mag), arg(rho) = arg."""
    with np.errstate(over="ignore"):
        mag = float(np.exp(log_mag))
    theta = 2 * math.atan(mag)
    arg = math.remainder(arg, 2 * math.pi)
    if abs(arg) <= COMPLEX_TOL:
        return Gate("RY", (q,), (), (theta,))
    if abs(abs(arg) - math.pi) <= COMPLEX_TOL:
        return Gate("RY", (q,), (), (-theta,))
    return Gate("U3", (q,), (), (theta, arg, 0.0))


def geometric_product_gates(r: complex, qubits: Sequence[int]) -> list[Gate]:
    """Product state with amplitude r^i over the 2^len(qubits) indices spanned by ``qubits``."""
    r = _C(r)
    lm, ar = math.log(abs(r)), cmath.phase(r)
    return [_qubit_amp_gate(q, (1 << j) * lm, math.fmod((1 << j) * ar, 2 * math.pi)) for j, q in enumerate(qubits)]


def log_geom_sq(r_abs: float, w: int) -> float:
    """log of sum_{i<w} r_abs^(2i), stable for large w."""
    lq = 2 * math.log(r_abs)
    if abs(lq) < 1e-15:
        return math.log(w)
    if lq < 0:
        return math.log(-math.expm1(w * lq)) - math.log(-math.expm1(lq))
    return w * lq + math.log(-math.expm1(-w * lq)) - math.log(math.expm1(lq))


def synth_geometric(r: complex, k_s: int, c: complex, N: int) -> Circuit:
    m = num_qubits(N)
    if k_s == 0:
        return Circuit(m, tuple(geometric_product_gates(r, range(m))), _phase_of(c))
    w = N - k_s
    if w & (w - 1) == 0 and k_s % w == 0:
        p = w.bit_length() - 1
        gates = [Gate("X", (b,)) for b in range(p, m) if (k_s >> b) & 1]
        gates += geometric_product_gates(r, range(p))
        return Circuit(m, tuple(gates), _phase_of(c))
    from .compose import partition_circuit

    return partition_circuit(geometric_blocks(r, k_s, c, N, rescale=True), m)


def geometric_blocks(r, k_s, c, N, rescale=False):
    """(block, anchor amplitude, spread) triples covering [k_s, N)."""
    r, c = _C(r), _C(c)
    lr, ar = math.log(abs(r)), cmath.phase(r)
    rows = []
    for blk in dyadic_decompose(k_s, N):
        off = blk.start - k_s
        rows.append((blk, off * lr + 0.5 * log_geom_sq(abs(r), blk.width), math.fmod(off * ar, 2 * math.pi)))
    shift = max(x[1] for x in rows) if rescale else 0.0
    return [(blk, c * cmath.exp(complex(lm - shift, ph)), ("geometric", r)) for blk, lm, ph in rows]


def synth_hamming(r: complex, c: complex, N: int) -> Circuit:
    m = num_qubits(N)
    r = _C(r)
    lm, ar = math.log(abs(r)), cmath.phase(r)
    return Circuit(m, tuple(_qubit_amp_gate(q, lm, ar) for q in range(m)), _phase_of(c))


def synth_staircase(r: complex, c: complex, N: int) -> Circuit:
    m = num_qubits(N)
    r = _C(r)
    a = abs(r)
    alpha = [a**k for k in range(m + 1)]
    tail = [0.0] * (m + 2)
    for k in range(m, -1, -1):
        tail[k] = tail[k + 1] + alpha[k] ** 2
    real = abs(r.imag) <= COMPLEX_TOL
    sign = -1.0 if real and r.real < 0 else 1.0
    gates: list[Gate] = []
    for k in range(m):
        theta = sign * 2 * math.atan2(math.sqrt(tail[k + 1]), alpha[k])
        ctrl = (k - 1,) if k else ()
        gates.append(Gate("RY", (k,), ctrl, (theta,)))
    if not real:
        gates += [Gate("PHASE", (q,), (), (cmath.phase(r),)) for q in range(m)]
    return Circuit(m, tuple(gates), _phase_of(c))


# ---------------------------------------------------------------------------
# dicke


def _scs(gates: list[Gate], qs: Sequence[int], l: int, k: int) -> None:
    """Split-and-cyclic-shift on positions l-k..l (1-based; qs maps position -> qubit)."""
    a, b = qs[l - 1], qs[l]
    gates.append(Gate("X", (b,), (a,)))
    gates.append(Gate("RY", (a,), (b,), (2 * math.acos(math.sqrt(1 / l)),)))
    gates.append(Gate("X", (b,), (a,)))
    for j in range(2, k + 1):
        a, mid = qs[l - j], qs[l - j + 1]
        gates.append(Gate("X", (b,), (a,)))
        gates.append(Gate("RY", (a,), (b, mid), (2 * math.acos(math.sqrt(j / l)),)))
        gates.append(Gate("X", (b,), (a,)))


def _cascade(m: int, k: int) -> list[Gate]:
    qs = [None] + list(range(m))  # 1-based positions
    gates: list[Gate] = []
    for l in range(m, k, -1):
        _scs(gates, qs, l, k)
    for l in range(k, 1, -1):
        _scs(gates, qs, l, l - 1)
    return gates


def _push_x_layer(gates: list[Gate], m: int) -> tuple[list[Gate], set[int]]:
    """Rewrite X^m . G as G' . X^F; returns (G', F).

    CX(c, t) passes an X on c through as X on c and t; controlled RY passes
    with its angle negated when the target is flipped and its flipped controls
    turned into anti-controls.
    """
    frame = set(range(m))
    out: list[Gate] = []
    for g in reversed(gates):
        t = g.targets[0]
        if g.kind == "X":
            out.append(g)
            if g.controls[0] in frame:
                frame ^= {t}
            continue
        angle = -g.params[0] if t in frame else g.params[0]
        state = tuple(1 - v if c in frame else v for c, v in zip(g.controls, g.control_values))
        out.append(Gate("RY", g.targets, g.controls, (angle,), ctrl_state=state))
    return out[::-1], frame


def dicke_gates(m: int, k: int) -> list[Gate]:
    """Deterministic cascade preparing |D^m_k>.

    For k > m/2 the lighter |D^m_{m-k}> cascade is used and the complementing
    X layer is folded back into it, so k and m-k share one CX skeleton.
    """
    if k == 0:
        return []
    if k == m:
        return [Gate("X", (q,)) for q in range(m)]
    kk = min(k, m - k)
    top = set(range(m - kk, m))
    body = _cascade(m, kk)
    if kk != k:
        body, frame = _push_x_layer(body, m)
        top ^= frame
    return [Gate("X", (q,)) for q in sorted(top)] + body


def synth_dicke(k: int, N: int) -> Circuit:
    m = num_qubits(N)
    return Circuit(m, tuple(dicke_gates(m, k)))


# ---------------------------------------------------------------------------
# polynomial / fourier

_SPARSE_CUT = 1e-12


def polynomial_walsh_entries(coeffs: Sequence[complex], N: int) -> list[tuple[int, complex]]:
    m = num_qubits(N)
    d = len(coeffs) - 1
    x = wht(_poly_grid(Polynomial(coeffs), N))
    cut = _SPARSE_CUT * np.abs(x).max()
    keep = np.flatnonzero((_popcount(np.arange(N)) <= d) & (np.abs(x) > cut)) if m else []
    return [(int(i), x[i]) for i in keep]


def synth_polynomial(coeffs: Sequence[complex], N: int) -> Circuit:
    m = num_qubits(N)
    load = sparse_loader(polynomial_walsh_entries(coeffs, N), m)
    return Circuit(m, load.gates + tuple(Gate("H", (q,)) for q in range(m)), load.global_phase)


def fourier_entries(modes, N: int) -> list[tuple[int, complex]]:
    """Sparse input for the inverse QFT; frequency k is stored at index (N - k) mod N."""
    coeffs = fourier_coefficients(Fourier(modes), N)
    return [((N - k) % N, v) for k, v in sorted(coeffs.items())]


def synth_fourier(modes, N: int) -> Circuit:
    m = num_qubits(N)
    load = sparse_loader(fourier_entries(modes, N), m)
    return Circuit(m, load.gates + (block(inverse_qft(m), range(m), "qft_dg"),), load.global_phase)


def leaf_circuit(pattern, N: int) -> Circuit:
    """Dispatch a leaf pattern to its synthesizer."""
    from .. import patterns as P

    if isinstance(pattern, P.Sparse):
        return synth_sparse(pattern.entries, N)
    if isinstance(pattern, P.Step):
        return synth_step(pattern.k_e, pattern.c, N)
    if isinstance(pattern, P.Square):
        return synth_square(pattern.k_s, pattern.k_e, pattern.c, N)
    if isinstance(pattern, P.Walsh):
        return synth_walsh(pattern.k, pattern.c0, pattern.c1, N)
    if isinstance(pattern, P.Fourier):
        return synth_fourier(pattern.modes, N)
    if isinstance(pattern, P.Geometric):
        return synth_geometric(pattern.r, pattern.k_s, pattern.c, N)
    if isinstance(pattern, P.Hamming):
        return synth_hamming(pattern.r, pattern.c, N)
    if isinstance(pattern, P.Staircase):
        return synth_staircase(pattern.r, pattern.c, N)
    if isinstance(pattern, P.Dicke):
        return synth_dicke(pattern.k, N)
    if isinstance(pattern, P.Polynomial):
        return synth_polynomial(pattern.coeffs, N)
    raise TypeError(f"not a leaf pattern: {pattern!r}")

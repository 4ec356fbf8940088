"""Shared circuit builders: QFT, constant adder, dyadic blocks, WHT, sparse loader."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..circuit import Circuit, Gate, block, inverse

_REL_REAL = 1e-12


def qft(m: int) -> Circuit:
    """|x> -> sum_y exp(2 pi i x y / 2^m) |y> / sqrt(2^m), with the final qubit reversal."""
    if m < 1:
        raise ValueError("qft needs m >= 1")
    gates: list[Gate] = []
    for j in range(m - 1, -1, -1):
        gates.append(Gate("H", (j,)))
        for k in range(j - 1, -1, -1):
            gates.append(Gate("PHASE", (j,), (k,), (math.pi / 2 ** (j - k),)))
    for i in range(m // 2):
        gates.append(Gate("SWAP", (i, m - 1 - i)))
    return Circuit(m, tuple(gates))


def inverse_qft(m: int) -> Circuit:
    return inverse(qft(m))


def draper_add(m: int, k: int) -> Circuit:
    """|x> -> |x + k mod 2^m> as QFT block, m phase gates, inverse-QFT block."""
    N = 1 << m
    gates = [block(qft(m), range(m), "qft")]
    # after the QFT (with swaps) qubit j carries the Fourier bit of weight 2^j
    for j in range(m):
        gates.append(Gate("PHASE", (j,), (), (2 * math.pi * ((k * (1 << j)) % N) / N,)))
    gates.append(block(inverse_qft(m), range(m), "qft_dg"))
    return Circuit(m, tuple(gates))


@dataclass(frozen=True)
class DyadicBlock:
    start: int
    width: int

    @property
    def stop(self) -> int:
        return self.start + self.width

    @property
    def log_width(self) -> int:
        return self.width.bit_length() - 1


def dyadic_decompose(k_s: int, k_e: int) -> list[DyadicBlock]:
    """Greedy cover of [k_s, k_e) by aligned power-of-two blocks."""
    if not 0 <= k_s < k_e:
        raise ValueError(f"need 0 <= k_s < k_e, got [{k_s}, {k_e})")
    out = []
    pos = k_s
    while pos < k_e:
        w = pos & -pos if pos else 1 << (k_e.bit_length())
        while pos + w > k_e:
            w >>= 1
        out.append(DyadicBlock(pos, w))
        pos += w
    return out


def wht(f: Sequence[complex]) -> np.ndarray:
    """Orthonormal Walsh-Hadamard transform (self-inverse)."""
    x = np.array(f, dtype=complex)
    N = x.size
    if N < 1 or N & (N - 1):
        raise ValueError("wht needs a power-of-two length")
    h = 1
    while h < N:
        y = x.reshape(-1, 2, h)
        a = y[:, 0, :].copy()
        y[:, 0, :] += y[:, 1, :]
        y[:, 1, :] = a - y[:, 1, :]
        h *= 2
    return x / math.sqrt(N)


# ---------------------------------------------------------------------------
# sparse loader


def _narrow(pool: list[int], m: int, used: set[int]) -> tuple[int, list[tuple[int, int]]]:
    """Split ``pool`` by single-bit conditions until one string is left."""
    conds: list[tuple[int, int]] = []
    used = set(used)
    while len(pool) > 1:
        best = None
        for b in range(m):
            if b in used:
                continue
            ones = sum((x >> b) & 1 for x in pool)
            zeros = len(pool) - ones
            if ones == 0 or zeros == 0:
                continue
            small, v = (ones, 1) if ones <= zeros else (zeros, 0)
            if best is None or small < best[0]:
                best = (small, b, v)
        _, b, v = best
        used.add(b)
        conds.append((b, v))
        pool = [x for x in pool if (x >> b) & 1 == v]
    return pool[0], conds


def merge_skeleton(indices, m: int):
    """Index-only merge schedule: yields (d, flipped bits, controls, lo, hi) per merge.

    Each step applies CX(d -> b) for the flipped bits, then a rotation on d under
    ``controls`` folds |hi> into |lo>.  Depends on the index set alone.
    """
    live = set(indices)
    while len(live) > 1:
        pool = sorted(live)
        x1, conds = _narrow(pool, m, set())
        d, _ = conds[-1]
        rest = [x for x in pool if all((x >> b) & 1 == v for b, v in conds[:-1]) and x != x1]
        x2, _ = _narrow(rest, m, {b for b, _ in conds[:-1]})
        # align x2 onto x1 except at bit d
        diff = (x1 ^ x2) & ~(1 << d)
        flips = [b for b in range(m) if (diff >> b) & 1]
        if diff:
            live = {(x ^ diff) if (x >> d) & 1 else x for x in live}
        if (x1 >> d) & 1:
            x1 ^= diff
        lo = x1 & ~(1 << d)
        hi = lo | (1 << d)
        # controls isolating {lo, hi} from every other string
        others = [x for x in live if x not in (lo, hi)]
        ctrls: list[tuple[int, int]] = []
        used = {d}
        while others:
            best = None
            for b in range(m):
                if b in used:
                    continue
                v = (lo >> b) & 1
                hit = sum(((x >> b) & 1) != v for x in others)
                key = (hit, v, -b)
                if hit and (best is None or key > best[0]):
                    best = (key, b, v)
            _, b, v = best
            used.add(b)
            ctrls.append((b, v))
            others = [x for x in others if (x >> b) & 1 == v]
        yield d, flips, ctrls, lo, hi
        live.discard(hi)


def _merge_plan(amps: dict[int, complex], m: int) -> tuple[list[Gate], int, complex]:
    """Gate list V with V|psi> = a|z>; returns (V, z, a)."""
    amps = dict(amps)
    gates: list[Gate] = []
    for d, flips, ctrls, lo, hi in merge_skeleton(list(amps), m):
        if flips:
            diff = sum(1 << b for b in flips)
            gates += [Gate("X", (b,), (d,)) for b in flips]
            amps = {(x ^ diff) if (x >> d) & 1 else x: a for x, a in amps.items()}
        a, b_ = amps[lo], amps[hi]
        ratio = b_ / a
        if abs(ratio.imag) > _REL_REAL * abs(ratio):
            lam = cmath.phase(a) - cmath.phase(b_)
            gates.append(Gate("PHASE", (d,), (), (lam,)))
            amps = {x: (v * cmath.exp(1j * lam) if (x >> d) & 1 else v) for x, v in amps.items()}
            sign = 1.0
        else:
            sign = 1.0 if ratio.real >= 0 else -1.0
        theta = 2 * math.atan2(sign * abs(b_), abs(a))
        state = tuple(v for _, v in ctrls)
        gates.append(Gate("RY", (d,), tuple(q for q, _ in ctrls), (-theta,), ctrl_state=state))
        merged = a / abs(a) * math.hypot(abs(a), abs(b_))
        del amps[hi]
        amps[lo] = merged
    (z, a), = amps.items()
    return gates, z, a


def sparse_loader(entries: Sequence[tuple[int, complex]], m: int) -> Circuit:
    """Prepare sum_j a_j |x_j> / ||a|| by reverse merging of basis strings."""
    amps = {int(x): complex(a) for x, a in entries if a != 0}
    nrm = math.sqrt(sum(abs(a) ** 2 for a in amps.values()))
    amps = {x: a / nrm for x, a in amps.items()}
    merges, z, a = _merge_plan(amps, m)
    gates = [Gate("X", (b,)) for b in range(m) if (z >> b) & 1]
    gates += [g.inverse() for g in reversed(merges)]
    return Circuit(m, tuple(gates), cmath.phase(a))

"""SUM (post-selected LCU), PARTITION (anchor load + block spread) and TENSOR."""

from __future__ import annotations

import cmath
import math
from typing import Sequence

import numpy as np

from ..circuit import Circuit, Gate, compose, controlled, inverse, tensor_embed
from ..patterns import Geometric, Sparse, Square, Step, num_qubits, raw_vector, support, vector_norm
from .builders import DyadicBlock, dyadic_decompose, sparse_loader
from .families import _SPARSE_CUT, geometric_blocks, geometric_product_gates, leaf_circuit

# ---------------------------------------------------------------------------
# partition


def _spread_gates(spread, p: int) -> list[Gate]:
    if spread[0] == "uniform":
        # acts on |0> only, where RY(pi/2) matches H and is cheaper under controls
        return [Gate("RY", (q,), (), (math.pi / 2,)) for q in range(p)]
    return geometric_product_gates(spread[1], range(p))


def _isolating_controls(group: list[DyadicBlock], others: list[DyadicBlock], p: int):
    """Bits >= p shared by every block in ``group`` that rule out every block in ``others``."""
    ctrls: list[tuple[int, int]] = []
    left = list(others)
    m_hi = max(b.stop for b in group + others).bit_length() + 1
    used: set[int] = set()
    while left:
        best = None
        for q in range(p, m_hi):
            if q in used:
                continue
            vals = {(b.start >> q) & 1 for b in group}
            if len(vals) != 1:
                continue
            (v,) = vals
            hit = sum(1 for b in left if q >= b.log_width and ((b.start >> q) & 1) != v)
            key = (hit, v, -q)
            if hit and (best is None or key > best[0]):
                best = (key, q, v)
        if best is None:
            return None
        _, q, v = best
        used.add(q)
        ctrls.append((q, v))
        left = [b for b in left if not (q >= b.log_width and ((b.start >> q) & 1) != v)]
    return ctrls


def partition_plan(blocks, m: int):
    """Index-level plan: (anchor entries, [(width bits, spread, controls)]) in emission order."""
    top = max(abs(a) for _, a, _ in blocks)
    blocks = [x for x in blocks if abs(x[1]) > _SPARSE_CUT * top]
    anchors = [(b.start, a) for b, a, _ in blocks]
    groups: dict[tuple, list[DyadicBlock]] = {}
    for b, _, spread in blocks:
        if b.width > 1:
            groups.setdefault((b.log_width, spread), []).append(b)
    allb = [b for b, _, _ in blocks]
    spread_done: set[DyadicBlock] = set()

    def occupied(exclude):
        # blocks not spread yet only occupy their anchor index
        return [o if o in spread_done else DyadicBlock(o.start, 1) for o in allb if o not in exclude]

    steps = []
    # narrow blocks first, so wide ones are isolated from anchors rather than whole ranges
    for (p, spread), members in sorted(groups.items(), key=lambda kv: kv[0][0]):
        ctrls = _isolating_controls(members, occupied(members), p)
        batches = [members] if ctrls is not None else [[b] for b in members]
        for batch in batches:
            cs = ctrls if len(batches) == 1 else _isolating_controls(batch, occupied(batch), p)
            steps.append((p, spread, cs))
            spread_done.update(batch)
    return anchors, steps


def partition_circuit(blocks, m: int) -> Circuit:
    """``blocks``: (DyadicBlock, anchor amplitude, spread) with disjoint aligned blocks."""
    anchors, steps = partition_plan(blocks, m)
    load = sparse_loader(anchors, m)
    gates = list(load.gates)
    for p, spread, cs in steps:
        cq, cv = tuple(q for q, _ in cs), tuple(v for _, v in cs)
        gates += [g.with_controls(cq, cv) for g in _spread_gates(spread, p)]
    return Circuit(m, tuple(gates), load.global_phase)


def partition_blocks(parts, N: int):
    out = []
    for part in parts:
        if isinstance(part, Sparse):
            out += [(DyadicBlock(i, 1), a, None) for i, a in part.entries]
        elif isinstance(part, (Step, Square)):
            k_s = part.k_s if isinstance(part, Square) else 0
            c = complex(part.c)
            out += [(b, c * math.sqrt(b.width), ("uniform",)) for b in dyadic_decompose(k_s, part.k_e)]
        elif isinstance(part, Geometric):
            out += geometric_blocks(part.r, part.k_s, part.c, N)
        else:
            raise TypeError(f"{part.name} is not a bounded-support pattern")
    return out


def synth_partition(parts, N: int) -> Circuit:
    return partition_circuit(partition_blocks(parts, N), num_qubits(N))


# ---------------------------------------------------------------------------
# tensor


def synth_tensor(parts, N: int) -> Circuit:
    """First listed part lands on the most significant qubits."""
    m = num_qubits(N)
    comps = []
    offset = m
    for pattern, n_i in parts:
        w = num_qubits(n_i)
        offset -= w
        comps.append((leaf_circuit(pattern, n_i), offset))
    if offset != 0:
        raise ValueError("TENSOR part widths do not add up to the register")
    return tensor_embed(comps, m)


# ---------------------------------------------------------------------------
# sum


def _disjoint(terms, N: int) -> bool:
    sups = [support(p, N) for _, p in terms]
    return all(sups[i].disjoint(sups[j]) for i in range(len(sups)) for j in range(i + 1, len(sups)))


def prep_weights(terms, N: int) -> np.ndarray:
    """beta_j^2 proportional to |w_j| * ||f_j||."""
    raw = np.array([abs(w) * vector_norm(p, N) for w, p in terms])
    return raw / raw.sum()


def sum_success_probability(terms, N: int) -> float:
    b2 = prep_weights(terms, N)
    if _disjoint(terms, N):
        return float(np.sum(b2**2))
    acc = np.zeros(N, dtype=complex)
    for (w, p), bj in zip(terms, b2):
        f = raw_vector(p, N)
        acc += bj * cmath.exp(1j * cmath.phase(w)) * f / np.linalg.norm(f)
    return float(np.vdot(acc, acc).real)


def ry_tree(probs: Sequence[float], n: int) -> Circuit:
    """Binary RY tree with P(index j) = probs[j] on ``n`` qubits (top bit first)."""
    full = np.zeros(1 << n)
    full[: len(probs)] = probs
    gates: list[Gate] = []
    for level in range(n - 1, -1, -1):
        span = 1 << (level + 1)
        for prefix in range(0, 1 << n, span):
            tot = full[prefix : prefix + span].sum()
            if tot <= 0:
                continue
            p0 = full[prefix : prefix + span // 2].sum() / tot
            if p0 >= 1.0:
                continue
            theta = 2 * math.acos(math.sqrt(min(max(p0, 0.0), 1.0)))
            cs = [(q, (prefix >> q) & 1) for q in range(level + 1, n)]
            flips = [Gate("X", (q,)) for q, v in cs if v == 0]
            gates += flips
            gates.append(Gate("RY", (level,), tuple(q for q, _ in cs), (theta,)))
            gates += flips
    return Circuit(n, tuple(gates))


def synth_sum(terms, N: int) -> tuple[Circuit, float, bool]:
    """LCU circuit on m data + ceil(log2 r) ancilla qubits (ancillas on top).

    Returns (circuit, success probability, overlapping-support flag).
    """
    m = num_qubits(N)
    r = len(terms)
    if r == 1:
        (w, p), = terms
        c = leaf_circuit(p, N)
        return Circuit(m, c.gates, c.global_phase + cmath.phase(w)), 1.0, False
    n_anc = math.ceil(math.log2(r))
    total = m + n_anc
    anc = list(range(m, total))
    b2 = prep_weights(terms, N)
    prep = ry_tree(b2, n_anc)
    place = Circuit(total, tuple(g.relabel(anc) for g in prep.gates))
    circ = place
    for j, (w, p) in enumerate(terms):
        u = leaf_circuit(p, N)
        u = Circuit(m, u.gates, u.global_phase + cmath.phase(w))
        state = [(j >> i) & 1 for i in range(n_anc)]
        circ = compose(circ, controlled(u, anc, total, target_map=range(m), ctrl_state=state))
    circ = compose(circ, inverse(place))
    overlap = not _disjoint(terms, N)
    return circ, sum_success_probability(terms, N), overlap

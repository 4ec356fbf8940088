import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from qencode import patterns as P
from qencode.encoding import ValidationError, data_state, encode, synthesize
from qencode.simulate import phase_aligned_distance, run, unitary
from qencode.synth.builders import (
    draper_add,
    dyadic_decompose,
    merge_skeleton,
    qft,
    sparse_loader,
    wht,
)
from qencode.synth.compose import prep_weights, ry_tree, sum_success_probability
from qencode.transpile import transpile, transpiled_counts

TOL = 1e-9


def state_of(pattern, N):
    circ, p, n_anc, _ = synthesize(pattern, N)
    state, prob = data_state(run(circ), N)
    return circ, state, prob


def assert_prepares(pattern, N, tol=TOL):
    circ, state, _ = state_of(pattern, N)
    assert phase_aligned_distance(P.build_vector(pattern, N), state) < tol, pattern
    return circ


# ---------------------------------------------------------------------------
# builders


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_qft_is_dft(m):
    N = 1 << m
    x, y = np.meshgrid(np.arange(N), np.arange(N))
    want = np.exp(2j * np.pi * x * y / N) / math.sqrt(N)
    assert np.allclose(unitary(qft(m)), want)


@pytest.mark.parametrize("m,k", [(3, 1), (3, 5), (4, 11), (4, 0)])
def test_draper_adder(m, k):
    N = 1 << m
    u = unitary(draper_add(m, k))
    perm = np.zeros((N, N))
    for x in range(N):
        perm[(x + k) % N, x] = 1
    assert np.allclose(u, perm, atol=1e-10)


def test_wht_matches_hadamard_matrix():
    H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    full = H
    for _ in range(3):
        full = np.kron(full, H)
    v = np.random.default_rng(0).normal(size=16)
    assert np.allclose(wht(v), full @ v)
    assert np.allclose(wht(wht(v)), v)
    with pytest.raises(ValueError):
        wht(np.ones(6))


@given(st.integers(0, 255), st.integers(1, 256))
def test_dyadic_cover(a, b):
    assume(a < b)
    blocks = dyadic_decompose(a, b)
    pos = a
    for blk in blocks:
        assert blk.start == pos
        assert blk.width & (blk.width - 1) == 0
        assert blk.start % blk.width == 0
        pos = blk.stop
    assert pos == b
    assert len(blocks) <= 2 * max(1, (b - a).bit_length())


@st.composite
def sparse_entries(draw, max_m=7):
    m = draw(st.integers(1, max_m))
    N = 1 << m
    idx = draw(st.lists(st.integers(0, N - 1), min_size=1, max_size=min(N, 12), unique=True))
    amps = [
        complex(draw(st.floats(-2, 2)), draw(st.floats(-2, 2))) for _ in idx
    ]
    amps = [a if abs(a) > 1e-3 else 1.0 for a in amps]
    return m, list(zip(idx, amps))


@given(sparse_entries())
def test_sparse_loader_exact(case):
    m, entries = case
    N = 1 << m
    state = run(sparse_loader(entries, m))
    want = np.zeros(N, dtype=complex)
    for i, a in entries:
        want[i] = a
    want /= np.linalg.norm(want)
    assert np.allclose(state, want, atol=1e-10)  # exact including phase


@given(sparse_entries())
def test_sparse_loader_gate_budget(case):
    m, entries = case
    gates = sparse_loader(entries, m).gates
    s = len(entries)
    assert sum(1 for g in gates if g.kind == "RY") == s - 1
    assert len(gates) <= (s - 1) * (m + 1) + m + s


@given(sparse_entries())
def test_merge_skeleton_isolates_pairs(case):
    m, entries = case
    steps = list(merge_skeleton([i for i, _ in entries], m))
    assert len(steps) == len(entries) - 1
    for d, flips, ctrls, lo, hi in steps:
        assert hi == lo | (1 << d) and lo != hi
        for b, v in ctrls:
            assert (lo >> b) & 1 == v


# ---------------------------------------------------------------------------
# leaf families, random parameters


def _cplx(draw, lo=-2.0, hi=2.0):
    z = complex(draw(st.floats(lo, hi)), draw(st.floats(lo, hi)))
    return z if abs(z) > 1e-2 else 1.0


@st.composite
def leaf_patterns(draw):
    m = draw(st.integers(2, 7))
    N = 1 << m
    kind = draw(st.sampled_from(["step", "square", "walsh", "fourier", "geometric", "hamming", "staircase", "dicke", "poly"]))
    if kind == "step":
        p = P.Step(draw(st.integers(1, N)), _cplx(draw))
    elif kind == "square":
        a = draw(st.integers(0, N - 1))
        p = P.Square(a, draw(st.integers(a + 1, N)), _cplx(draw))
    elif kind == "walsh":
        p = P.Walsh(draw(st.integers(0, m - 1)), _cplx(draw), _cplx(draw))
    elif kind == "fourier":
        assume(N >= 8)
        modes = [(draw(st.integers(1, N // 2 - 1)), draw(st.floats(0.1, 2)), draw(st.floats(-3, 3))) for _ in range(draw(st.integers(1, 3)))]
        p = P.Fourier(modes)
        assume(P.fourier_coefficients(p, N))
    elif kind == "geometric":
        r = _cplx(draw, -1.5, 1.5)
        assume(abs(r - 1) > 1e-3)
        p = P.Geometric(r, draw(st.integers(0, N - 1)), _cplx(draw))
    elif kind == "hamming":
        r = _cplx(draw, -1.5, 1.5)
        assume(abs(r - 1) > 1e-3)
        p = P.Hamming(r, _cplx(draw))
    elif kind == "staircase":
        r = _cplx(draw, -1.5, 1.5)
        assume(abs(r - 1) > 1e-3)
        p = P.Staircase(r, _cplx(draw))
    elif kind == "dicke":
        p = P.Dicke(draw(st.integers(0, m)), draw(st.floats(0.1, 3)))
    else:
        coeffs = [_cplx(draw, -3, 3) for _ in range(draw(st.integers(1, 4)))]
        p = P.Polynomial(coeffs)
    try:
        P.validate_params(p, N)
    except P.PatternError:
        assume(False)
    return p, N


@given(leaf_patterns())
def test_leaf_synthesis_exact(case):
    p, N = case
    circ = assert_prepares(p, N)
    assert circ.num_qubits == P.num_qubits(N)


@given(leaf_patterns())
def test_transpiled_circuit_prepares_same_state(case):
    p, N = case
    circ, _, _, _ = synthesize(p, N)
    state, _ = data_state(run(transpile(circ)), N)
    assert phase_aligned_distance(P.build_vector(p, N), state) < TOL


# ---------------------------------------------------------------------------
# Dicke


@pytest.mark.parametrize("m", range(1, 8))
def test_dicke_uniform_and_symmetric(m):
    N = 1 << m
    for k in range(m + 1):
        _, state, _ = state_of(P.Dicke(k), N)
        w = [i for i in range(N) if bin(i).count("1") == k]
        amp = np.abs(state)
        assert np.allclose(amp[w], 1 / math.sqrt(math.comb(m, k)), atol=1e-10)
        off = np.delete(amp, w)
        assert np.max(off, initial=0.0) < 1e-10
    for k in range(1, m):
        a = transpiled_counts(synthesize(P.Dicke(k), N)[0])
        b = transpiled_counts(synthesize(P.Dicke(m - k), N)[0])
        assert a.gate_count_2q == b.gate_count_2q and a.circuit_depth == b.circuit_depth


@pytest.mark.parametrize("m", range(2, 11))
def test_dicke_cx_closed_form(m):
    # CX = (6k - 2) m - 3k^2 - 3k + 2 for 1 <= k <= m/2, mirrored for k > m/2
    for k in range(1, m):
        kk = min(k, m - k)
        got = transpiled_counts(synthesize(P.Dicke(k), 1 << m)[0]).gate_count_2q
        assert got == (6 * kk - 2) * m - 3 * kk * kk - 3 * kk + 2
        assert got <= 9 * kk * (m - kk)


# ---------------------------------------------------------------------------
# compositions


def test_ry_tree_distribution():
    probs = [0.1, 0.2, 0.3, 0.4, 0.0]
    state = run(ry_tree(probs, 3))
    assert np.allclose(np.abs(state[:5]) ** 2, probs)
    assert np.allclose(state.imag, 0)


def test_sum_disjoint_probability_and_state():
    N = 16
    pat = P.Sum([(1.0, P.Square(0, 8)), (3.0, P.Square(8, 16))])
    circ, info = encode(pat, N, validate=True, tol=TOL)
    assert info.num_ancillas == 1 and info.success_probability == pytest.approx(0.625, abs=1e-12)
    _, prob = data_state(run(circ), N)
    assert prob == pytest.approx(0.625, abs=1e-10)


@given(st.lists(st.tuples(st.floats(0.2, 2), st.floats(-3, 3), st.integers(0, 3)), min_size=2, max_size=5))
def test_sum_overlapping_terms(raw):
    N = 16
    menu = [P.Step(11), P.Walsh(1), P.Hamming(0.6), P.Geometric(0.7, 3)]
    terms = [(mag * complex(math.cos(ph), math.sin(ph)), menu[j]) for mag, ph, j in raw]
    pat = P.Sum(terms)
    try:
        P.validate_params(pat, N)
    except P.PatternError:
        assume(False)
    assume(np.linalg.norm(P.raw_vector(pat, N)) > 1e-3)
    circ, state, prob = state_of(pat, N)
    assert phase_aligned_distance(P.build_vector(pat, N), state) < 1e-8
    assert prob == pytest.approx(sum_success_probability(pat.terms, N), abs=1e-10)
    assert np.isclose(prep_weights(pat.terms, N).sum(), 1.0)


def test_sum_overlap_warns():
    with pytest.warns(UserWarning, match="overlap"):
        synthesize(P.Sum([(1, P.Step(6)), (1, P.Square(4, 8))]), 8)


def test_single_term_sum_has_no_ancilla():
    circ, info = encode(P.Sum([(1j, P.Walsh(0))]), 8, validate=True)
    assert info.num_ancillas == 0 and info.success_probability == 1.0


@st.composite
def partitions(draw):
    m = draw(st.integers(3, 7))
    N = 1 << m
    cuts = sorted(draw(st.lists(st.integers(1, N - 1), min_size=2, max_size=5, unique=True)))
    bounds = [0] + cuts + [N]
    parts = []
    for a, b in zip(bounds, bounds[1:]):
        kind = draw(st.sampled_from(["skip", "square", "sparse", "geometric"]))
        if kind == "square":
            parts.append(P.Step(b, _cplx(draw)) if a == 0 else P.Square(a, b, _cplx(draw)))
        elif kind == "sparse":
            idx = draw(st.lists(st.integers(a, b - 1), min_size=1, max_size=3, unique=True))
            parts.append(P.Sparse([(i, _cplx(draw)) for i in idx]))
        elif kind == "geometric" and b == N:
            parts.append(P.Geometric(draw(st.floats(0.3, 0.95)), a, _cplx(draw)))
    assume(parts)
    return P.Partition(parts), N


@given(partitions())
def test_partition_exact_and_ancilla_free(case):
    pat, N = case
    circ, info = encode(pat, N, validate=True, tol=TOL)
    assert circ.num_qubits == P.num_qubits(N)
    assert info.success_probability == 1.0 and info.num_ancillas == 0


def test_partition_overlap_raises():
    with pytest.raises(P.PatternError, match="overlapping"):
        encode(P.Partition([P.Sparse([(3, 1)]), P.Square(2, 6)]), 8)


def test_tensor_is_kron_and_counts_compose():
    a, b = P.Fourier([(1, 1.0, 0.0)]), P.Hamming(0.4)
    pat = P.Tensor([(a, 8), (b, 4)])
    circ, info = encode(pat, 32, validate=True, tol=TOL)
    _, ia = encode(a, 8)
    _, ib = encode(b, 4)
    assert info.gate_count_1q + info.gate_count_2q == ia.gate_count_1q + ia.gate_count_2q + ib.gate_count_1q + ib.gate_count_2q
    assert info.circuit_depth == max(ia.circuit_depth, ib.circuit_depth)


def test_validation_failure_raises():
    # a tolerance no floating-point circuit can meet
    with pytest.raises(ValidationError):
        encode(P.Fourier([(3, 1.0, 0.2)]), 64, validate=True, tol=0.0)


def test_encode_info_fields():
    circ, info = encode(P.Hamming(0.5), 16, validate=True)
    assert info.pattern_name == "HAMMING" and info.m == 4 and info.validated
    assert info.gate_count == len(circ)
    assert info.vector is not None and info.vector.shape == (16,)
    assert info.circuit_code.startswith("qubits 4")

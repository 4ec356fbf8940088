import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qencode.encoding import ValidationError
from qencode.mps import (
    MpsError,
    MpsTensors,
    complete_to_unitary,
    encode_mps,
    encode_mps_from_tensors,
    mps_decompose,
    pad_vector,
    site_unitary,
)
from qencode.simulate import fidelity, run


def gaussian(N=256, alpha=50.0):
    i = np.arange(N)
    v = np.exp(-alpha * ((i - N / 2) / N) ** 2)
    return v / np.linalg.norm(v)


def bond_zero_probability(circ, m):
    state = run(circ)
    return float(np.sum(np.abs(state[: 1 << m]) ** 2))


def test_pad_vector():
    v, n = pad_vector([1, 2, 3])
    assert v.size == 4 and n == 1 and v[3] == 0
    v, n = pad_vector([5])
    assert v.size == 2 and n == 1
    assert pad_vector(np.ones(8))[1] == 0
    with pytest.raises(MpsError):
        pad_vector([])


@given(st.integers(1, 6), st.integers(0, 10**6))
def test_decompose_is_right_canonical_and_exact_at_full_rank(m, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=1 << m) + 1j * rng.normal(size=1 << m)
    tensors, err = mps_decompose(v, 1 << (m - 1) if m > 1 else 1)
    tensors.check()
    assert err < 1e-24
    assert fidelity(tensors.contract(), v / np.linalg.norm(v)) == pytest.approx(1.0, abs=1e-12)


def test_truncation_error_matches_discarded_weight():
    rng = np.random.default_rng(7)
    v = rng.normal(size=64)
    v /= np.linalg.norm(v)
    tensors, err = mps_decompose(v, 2)
    approx = tensors.contract()
    # sequential truncation: infidelity is bounded by the summed discarded weight
    assert 1 - fidelity(approx, v) <= err + 1e-12
    assert err > 0


@pytest.mark.parametrize("shape", [(1, 3), (4, 2)])
def test_complete_to_unitary(shape):
    rng = np.random.default_rng(1)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    cols = q[:, : shape[1]]
    u = complete_to_unitary(cols)
    assert np.allclose(u.conj().T @ u, np.eye(4))
    assert np.allclose(u[:, : shape[1]], cols)


def test_complete_rejects_non_orthonormal():
    with pytest.raises(MpsError):
        complete_to_unitary(np.array([[1.0, 1.0], [0.0, 0.0]]))


def test_site_unitary_embeds_tensor():
    tensors, _ = mps_decompose(gaussian(16), 4)
    a = tensors.sites[2]
    n_local = math.ceil(math.log2(max(a.shape[0], a.shape[2])))
    u = site_unitary(a, n_local)
    assert np.allclose(u.conj().T @ u, np.eye(u.shape[0]))
    for l in range(a.shape[0]):
        col = u[:, 2 * l]
        for r in range(a.shape[2]):
            assert np.allclose(col[2 * r : 2 * r + 2], a[l, :, r])


def test_gaussian_chi8():
    circ, info = encode_mps(gaussian(), 8, validate=True, tol=1e-6)
    assert info.params["truncation_error_sq"] < 1e-12
    assert info.params["n_bond"] == 3 and circ.num_qubits == 11
    assert info.success_probability == 1.0 and info.validated
    state = run(circ)[:256]
    assert fidelity(state, gaussian()) >= 1 - 1e-10
    assert bond_zero_probability(circ, 8) == pytest.approx(1.0, abs=1e-10)


def test_gaussian_chi4_fails_validation():
    with pytest.raises(ValidationError):
        encode_mps(gaussian(), 4, validate=True, tol=1e-6)


@pytest.mark.parametrize("m", range(1, 9))
def test_full_bond_is_exact(m):
    rng = np.random.default_rng(m)
    v = rng.normal(size=1 << m) + 1j * rng.normal(size=1 << m)
    circ, info = encode_mps(v, max(1, 1 << (m - 1)), validate=True, tol=1e-9)
    assert bond_zero_probability(circ, m) == pytest.approx(1.0, abs=1e-10)


def test_padding_reported():
    circ, info = encode_mps(np.arange(1, 6, dtype=float), 4, validate=True)
    assert info.params["n_padded"] == 3 and info.N == 8


def test_from_tensors_roundtrip():
    tensors, _ = mps_decompose(gaussian(32), 4)
    circ, info = encode_mps_from_tensors(tensors.sites, validate=True, tol=1e-9)
    assert info.params["truncation_error_sq"] == 0.0
    assert fidelity(run(circ)[:32], tensors.contract()) == pytest.approx(1.0, abs=1e-10)


def test_from_tensors_rejects_bad_input():
    good, _ = mps_decompose(gaussian(8), 2)
    with pytest.raises(MpsError, match="right-canonical"):
        encode_mps_from_tensors([2 * a for a in good.sites])
    with pytest.raises(MpsError):
        encode_mps_from_tensors([np.ones((1, 3, 1))])
    with pytest.raises(MpsError):
        encode_mps_from_tensors(MpsTensors([], 1))


def test_invalid_inputs():
    with pytest.raises(MpsError):
        encode_mps(np.zeros(8), 2)
    with pytest.raises(MpsError):
        mps_decompose(np.ones(8), 0)
    with pytest.raises(MpsError):
        mps_decompose(np.ones(6), 2)

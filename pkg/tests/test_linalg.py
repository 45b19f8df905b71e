"""Dense linear algebra helpers: kron, partial transpose, SVD wrappers."""

import numpy as np
import pytest

from teleport_ent import linalg
from teleport_ent.errors import InvariantError


def kron_by_loop(a, b):
    # independent 4-index oracle for the Kronecker product
    out = np.zeros((a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]), dtype=complex)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            for k in range(b.shape[0]):
                for l in range(b.shape[1]):
                    out[i * b.shape[0] + k, j * b.shape[1] + l] = a[i, j] * b[k, l]
    return out


def test_kron_matches_loop_oracle():
    rng = np.random.default_rng(11)
    for _ in range(5):
        a = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
        b = rng.normal(size=(2, 4)) + 1j * rng.normal(size=(2, 4))
        np.testing.assert_allclose(linalg.kron(a, b), kron_by_loop(a, b), atol=1e-14)


def test_kron_dimension_guard():
    big = np.eye(100)
    with pytest.raises(InvariantError):
        linalg.kron(big, big, max_dim=4096)


def test_partial_transpose_maximally_entangled_eigenvalues():
    # PT of the d=2 maximally entangled projector has spectrum {1/2, 1/2, 1/2, -1/2}
    v = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    proj = np.outer(v, v.conj())
    pt = linalg.partial_transpose(proj, 2)
    eigs = np.sort(np.linalg.eigvalsh(pt))
    np.testing.assert_allclose(eigs, [-0.5, 0.5, 0.5, 0.5], atol=1e-12)


def test_partial_transpose_is_involution_and_sides_agree_on_transpose():
    rng = np.random.default_rng(12)
    d = 3
    m = rng.normal(size=(d * d, d * d)) + 1j * rng.normal(size=(d * d, d * d))
    rho = m @ m.conj().T
    rho /= np.trace(rho)
    a_twice = linalg.partial_transpose(linalg.partial_transpose(rho, d), d)
    np.testing.assert_allclose(a_twice, rho, atol=1e-13)
    # transposing both subsystems equals the full transpose
    both = linalg.partial_transpose(linalg.partial_transpose(rho, d, "A"), d, "B")
    np.testing.assert_allclose(both, rho.T, atol=1e-13)


def test_trace_norm_bounds_trace():
    rng = np.random.default_rng(13)
    for _ in range(10):
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        assert linalg.trace_norm(m) >= abs(np.trace(m)) - 1e-12


def test_svd_reconstructs():
    rng = np.random.default_rng(14)
    m = rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3))
    u, s, v = linalg.svd(m)
    np.testing.assert_allclose(u @ np.diag(s) @ v.conj().T, m, atol=1e-12)
    assert np.all(np.diff(s) <= 0)


def test_herm_eig_reconstructs_and_rejects_non_hermitian():
    rng = np.random.default_rng(15)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = a + a.conj().T
    res = linalg.herm_eig(h)
    np.testing.assert_allclose(res.reconstruct(), h, atol=1e-12)
    with pytest.raises(InvariantError):
        linalg.herm_eig(a)


def test_svd_and_herm_eig_agree_on_psd():
    rng = np.random.default_rng(16)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    psd = a @ a.conj().T
    _, s, _ = linalg.svd(psd)
    w = linalg.herm_eig(psd).eigenvalues[::-1]
    np.testing.assert_allclose(s, w, atol=1e-10)

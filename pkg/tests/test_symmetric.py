"""Jacobi eigensolver checked against numpy.linalg.eigh and hand cases."""
import numpy as np
import pytest

from pdla.errors import AsymmetricMatrix, DimensionMismatch, NotConverged
from pdla.symmetric import (SymMatrix, frobenius, is_psd, min_eigpair,
                            symmetric_eig)


def test_two_by_two_hand_case():
    # [[2, 1], [1, 2]] has eigenvalues 1 and 3 with eigenvectors
    # (1, -1)/sqrt(2) and (1, 1)/sqrt(2).
    m = np.array([[2.0, 1.0], [1.0, 2.0]])
    dec = symmetric_eig(m)
    assert dec.values == pytest.approx([1.0, 3.0])
    v0 = dec.vectors[:, 0]
    assert abs(v0 @ np.array([1.0, -1.0]) / np.sqrt(2)) == pytest.approx(1.0)


def test_matches_numpy_on_random_symmetric():
    rng = np.random.default_rng(0)
    for d in (1, 2, 3, 5, 8, 12):
        a = rng.normal(size=(d, d))
        m = (a + a.T) / 2
        dec = symmetric_eig(m)
        ref = np.linalg.eigvalsh(m)
        assert np.allclose(dec.values, ref, atol=1e-8 * max(1, abs(ref).max()))
        # Vectors diagonalize: V' M V is the eigenvalue diagonal.
        recon = dec.vectors @ np.diag(dec.values) @ dec.vectors.T
        assert np.allclose(recon, m, atol=1e-8 * max(1.0, abs(m).max()))
        assert np.allclose(dec.vectors.T @ dec.vectors, np.eye(d), atol=1e-9)


def test_values_ascending_and_min_eigpair():
    rng = np.random.default_rng(4)
    a = rng.normal(size=(6, 6))
    m = (a + a.T) / 2
    lam, v = min_eigpair(m)
    assert lam == pytest.approx(np.linalg.eigvalsh(m)[0], abs=1e-8)
    assert np.linalg.norm(m @ v - lam * v) < 1e-7
    assert np.linalg.norm(v) == pytest.approx(1.0)


def test_diagonal_matrix_is_immediate():
    m = np.diag([3.0, -1.0, 2.0])
    dec = symmetric_eig(m)
    assert dec.values == pytest.approx([-1.0, 2.0, 3.0])
    # The -1 eigenvector is the second coordinate axis.
    assert abs(dec.vectors[1, 0]) == pytest.approx(1.0)


def test_frobenius_product():
    a = np.array([[1.0, 2.0], [2.0, 3.0]])
    b = np.array([[0.5, -1.0], [-1.0, 4.0]])
    assert frobenius(a, b) == pytest.approx(0.5 - 2 - 2 + 12)
    with pytest.raises(DimensionMismatch):
        frobenius(a, np.eye(3))


def test_is_psd_tolerance():
    assert is_psd(np.eye(3))
    assert is_psd(np.zeros((2, 2)))
    assert not is_psd(np.diag([1.0, -1e-3]))
    # Slightly negative within tolerance counts as PSD.
    assert is_psd(np.diag([1.0, -1e-9]), tol_psd=1e-7)


def test_sym_matrix_validation():
    with pytest.raises(AsymmetricMatrix):
        SymMatrix.from_array(np.array([[1.0, 2.0], [0.0, 1.0]]))
    sm = SymMatrix.from_array(np.eye(2))
    assert np.allclose(sm.entries, np.eye(2))
    assert sm.d == 2


def test_psd_projection_cases():
    # Rank-one and repeated-eigenvalue cases keep Jacobi honest.
    v = np.array([1.0, 2.0, -1.0])
    m = np.outer(v, v)
    dec = symmetric_eig(m)
    assert dec.values[:2] == pytest.approx([0.0, 0.0], abs=1e-10)
    assert dec.values[2] == pytest.approx(v @ v)
    lam, u = min_eigpair(np.eye(4) * 2.5)
    assert lam == pytest.approx(2.5)

import json

import numpy as np
import pytest

from rqet import (DomainError, InputError, NumericError, hermitian_eig,
                  load_matrix, matrix_function_hermitian, matrix_sign,
                  operator_norm, polar_oracle, save_matrix, unitarity_check)
from conftest import hermitian_with_spectrum


def random_hermitian(seed, d):
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (Z + Z.conj().T) / 2


@pytest.mark.parametrize("dim", [1, 2, 3, 8, 17, 64])
def test_jacobi_matches_lapack(dim):
    A = random_hermitian(dim, dim)
    w, V = hermitian_eig(A)
    w_ref = np.linalg.eigvalsh(A)
    assert np.abs(w - w_ref).max() < 1e-10 * max(1.0, np.abs(w_ref).max())


@pytest.mark.parametrize("dim", [2, 8, 64])
def test_jacobi_reconstruction_and_unitarity(dim):
    A = random_hermitian(100 + dim, dim)
    w, V = hermitian_eig(A)
    recon = (V * w[None, :]) @ V.conj().T
    assert np.abs(recon - A).max() < 1e-12 * max(1.0, np.abs(A).max())
    assert np.abs(V.conj().T @ V - np.eye(dim)).max() < 1e-12
    assert np.all(np.diff(w) >= 0)


def test_jacobi_degenerate_spectrum():
    A, _ = hermitian_with_spectrum(5, [0.5, 0.5, 0.5, -0.25])
    w, V = hermitian_eig(A)
    assert np.abs(np.sort(w) - np.array([-0.25, 0.5, 0.5, 0.5])).max() < 1e-12


def test_jacobi_tiny_offdiagonal_converges():
    # diagonal dominated by one large entry; the off-diagonal mass check
    # must not drown in rounding noise from the big diagonal
    A = np.diag([1e-4, 1e-8, 1e-21, 3e-5]).astype(complex)
    A[0, 1] = A[1, 0] = 1e-22
    w, V = hermitian_eig(A)
    assert np.abs(np.sort(w) - np.sort(np.linalg.eigvalsh(A))).max() < 1e-18


def test_rejects_non_hermitian():
    M = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    with pytest.raises(DomainError):
        hermitian_eig(M)


def test_rejects_oversized():
    with pytest.raises(DomainError):
        hermitian_eig(np.eye(65, dtype=complex))


def test_matrix_function_square_root():
    A, _ = hermitian_with_spectrum(7, [0.25, 0.49, 0.81])
    R = matrix_function_hermitian(A, np.sqrt)
    assert np.abs(R @ R - A).max() < 1e-12


def test_matrix_function_rejects_nonfinite_value():
    A = np.diag([1.0, -1.0]).astype(complex)
    with pytest.raises(DomainError):
        matrix_function_hermitian(A, np.log)


def test_operator_norm_matches_svd():
    rng = np.random.default_rng(12)
    for d in (2, 5, 9):
        M = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        assert abs(operator_norm(M) - np.linalg.svd(M, compute_uv=False)[0]) < 1e-10


def test_operator_norm_power_iteration_crosscheck():
    rng = np.random.default_rng(21)
    M = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    G = M.conj().T @ M
    v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    v /= np.linalg.norm(v)
    for _ in range(2000):
        v = G @ v
        v /= np.linalg.norm(v)
    lam = float(np.real(np.vdot(v, G @ v)))
    assert abs(operator_norm(M) - np.sqrt(lam)) < 1e-8


def test_matrix_sign_spectral():
    A, Q = hermitian_with_spectrum(9, [0.6, -0.3, 0.9, -0.8])
    S = matrix_sign(A)
    expected = (Q * np.array([1.0, -1.0, 1.0, -1.0])[None, :]) @ Q.conj().T
    assert np.abs(S - expected).max() < 1e-12
    assert np.abs(S @ S - np.eye(4)).max() < 1e-12


def test_matrix_sign_rejects_zero_eigenvalue():
    A = np.diag([0.5, 0.0]).astype(complex)
    with pytest.raises(DomainError):
        matrix_sign(A)


def test_polar_oracle_properties():
    rng = np.random.default_rng(31)
    M = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    U, P = polar_oracle(M)
    assert unitarity_check(U)
    assert np.abs(U @ P - M).max() < 1e-10
    w = np.linalg.eigvalsh((P + P.conj().T) / 2)
    assert w.min() > -1e-12


def test_polar_oracle_rejects_singular():
    M = np.zeros((3, 3), dtype=complex)
    M[0, 0] = 1.0
    with pytest.raises(DomainError):
        polar_oracle(M)


def test_matrix_json_roundtrip(tmp_path):
    rng = np.random.default_rng(4)
    M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    path = tmp_path / "m.json"
    save_matrix(str(path), M)
    back = load_matrix(str(path))
    assert np.abs(back - M).max() == 0.0


def test_matrix_json_rejects_nan(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"rows": 1, "cols": 1, "entries": [[NaN, 0.0]]}')
    with pytest.raises(InputError):
        load_matrix(str(path))


def test_matrix_json_rejects_shape_mismatch(tmp_path):
    path = tmp_path / "bad2.json"
    path.write_text(json.dumps({"rows": 2, "cols": 1, "entries": [[1.0, 0.0]]}))
    with pytest.raises(InputError):
        load_matrix(str(path))


def test_save_matrix_rejects_nonfinite(tmp_path):
    M = np.array([[np.inf]], dtype=complex)
    with pytest.raises(InputError):
        save_matrix(str(tmp_path / "x.json"), M)

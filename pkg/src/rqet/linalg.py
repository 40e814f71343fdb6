"""Dense complex linear algebra used as the package's reference layer.

The eigensolver is a cyclic Jacobi iteration on complex Hermitian input,
kept dependency-free so every spectral quantity downstream (sign oracle,
polar factors, operator norms) is derived in-house at desk scale.
"""

from __future__ import annotations

import json
import math
from typing import Callable, NamedTuple

import numpy as np

from ._kernels import jacobi_sweeps
from .errors import DomainError, InputError, NumericError

MAX_DIM = 64
_SWEEP_CAP = 100
_OFF_TOL = 1e-14  # scaled by the Frobenius norm of the input
HERMITICITY_TOL = 1e-12


class Spectrum(NamedTuple):
    eigenvalues: np.ndarray  # real, ascending
    vectors: np.ndarray      # unitary, columns matched to eigenvalues


def require_square(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {M.shape}")
    return M


def require_hermitian(M: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Square and Hermitian within tol, else a domain error naming the entry."""
    M = require_square(M)
    dev = np.abs(M - M.conj().T)
    worst = np.unravel_index(np.argmax(dev), dev.shape)
    if dev[worst] > tol:
        i, j = int(worst[0]), int(worst[1])
        raise DomainError(
            f"matrix is not Hermitian: |M[{i},{j}] - conj(M[{j},{i}])| = {dev[worst]:.3e}"
        )
    return M


def hermitian_eig(M: np.ndarray) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Eigenvalues are returned in ascending order.  Convergence means the
    off-diagonal Frobenius mass fell below 1e-14 relative to the input's
    Frobenius norm; the sweep count is capped at 100.
    """
    M = require_hermitian(M)
    n = M.shape[0]
    if n > MAX_DIM:
        raise DomainError(f"dimension {n} exceeds the supported maximum {MAX_DIM}")
    A = M.copy()
    V = np.eye(n, dtype=np.complex128)
    thresh = _OFF_TOL * max(1.0, float(np.linalg.norm(M, "fro")))
    jacobi_sweeps(A, V, thresh, _SWEEP_CAP)
    # summing only off-diagonal entries avoids the cancellation that
    # subtracting two near-equal Frobenius sums would introduce
    strict = np.abs(A - np.diag(np.diag(A))) ** 2
    off = math.sqrt(float(strict.sum()))
    if off > thresh:
        raise NumericError(
            f"Jacobi sweeps did not converge after {_SWEEP_CAP} sweeps "
            f"(off-diagonal mass {off:.3e}, threshold {thresh:.3e})"
        )
    w = np.real(np.diag(A))
    order = np.argsort(w, kind="stable")
    return Spectrum(w[order], V[:, order])


def matrix_function_hermitian(M: np.ndarray, f: Callable) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    w, V = hermitian_eig(M)
    with np.errstate(all="ignore"):
        try:
            fw = np.asarray(f(w), dtype=np.complex128)
            if fw.shape != w.shape:
                raise TypeError
        except TypeError:
            fw = np.array([complex(f(v)) for v in w], dtype=np.complex128)
    if not np.all(np.isfinite(fw)):
        bad = w[~np.isfinite(fw)][0]
        raise DomainError(f"function is undefined at eigenvalue {bad!r}")
    return (V * fw) @ V.conj().T


def operator_norm(M: np.ndarray) -> float:
    """Largest singular value, from the spectrum of the Gram matrix."""
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2:
        raise DomainError(f"expected a matrix, got ndim {M.ndim}")
    G = M.conj().T @ M
    G = (G + G.conj().T) / 2
    w, _ = hermitian_eig(G)
    return math.sqrt(max(0.0, float(w[-1])))


def matrix_sign(M: np.ndarray, zero_tol: float = 1e-12) -> np.ndarray:
    """Spectral sign oracle; rejects eigenvalues within zero_tol of zero."""
    w, V = hermitian_eig(M)
    scale = max(1.0, float(np.abs(w).max()))
    if np.any(np.abs(w) <= zero_tol * scale):
        raise DomainError("sign is undefined: an eigenvalue sits at zero within tolerance")
    return (V * np.sign(w)) @ V.conj().T


def polar_oracle(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Polar factors (U, P) with M = U P, from the Gram spectrum.

    P is the Hermitian positive square root of M^dag M and U = M P^{-1}.
    """
    M = require_square(M)
    G = M.conj().T @ M
    G = (G + G.conj().T) / 2
    w, V = hermitian_eig(G)
    sigma = np.sqrt(np.maximum(0.0, w))
    if sigma[0] < 1e-8:
        raise DomainError(f"polar factor is ill-conditioned: smallest singular value {sigma[0]:.3e}")
    P = (V * sigma) @ V.conj().T
    U = M @ ((V * (1.0 / sigma)) @ V.conj().T)
    n = M.shape[0]
    if np.abs(U.conj().T @ U - np.eye(n)).max() > 1e-10 or np.abs(U @ P - M).max() > 1e-10:
        raise NumericError("polar factorization residual exceeded 1e-10")
    return U, P


def unitarity_check(U: np.ndarray, tol: float = 1e-10) -> bool:
    """True when U^dag U = I entrywise within tol."""
    U = require_square(U)
    dev = np.abs(U.conj().T @ U - np.eye(U.shape[0]))
    return float(dev.max()) <= tol


# ------------------------------------------------------------------- file io

def _reject_constant(name: str):
    raise InputError(f"non-finite value {name!r} in matrix file")


def load_matrix(path: str) -> np.ndarray:
    """Read a matrix from JSON: rows, cols, and row-major [re, im] entries."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh, parse_constant=_reject_constant)
        except json.JSONDecodeError as exc:
            raise InputError(f"not valid JSON: {path}: {exc}") from exc
    if not isinstance(doc, dict) or not {"rows", "cols", "entries"} <= set(doc):
        raise InputError(f"matrix file {path} needs keys rows, cols, entries")
    rows, cols = doc["rows"], doc["cols"]
    if not (isinstance(rows, int) and isinstance(cols, int) and rows > 0 and cols > 0):
        raise InputError("rows and cols must be positive integers")
    entries = doc["entries"]
    if not isinstance(entries, list) or len(entries) != rows * cols:
        raise InputError(f"expected {rows * cols} entries, got {len(entries) if isinstance(entries, list) else type(entries).__name__}")
    flat = np.empty(rows * cols, dtype=np.complex128)
    for k, item in enumerate(entries):
        if not (isinstance(item, list) and len(item) == 2):
            raise InputError(f"entry {k} is not a [re, im] pair")
        re, im = item
        if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in (re, im)):
            raise InputError(f"entry {k} holds a non-finite or non-numeric value")
        flat[k] = complex(re, im)
    return flat.reshape(rows, cols)


def save_matrix(path: str, M: np.ndarray) -> None:
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2:
        raise InputError(f"expected a matrix, got ndim {M.ndim}")
    if not np.all(np.isfinite(M)):
        raise InputError("refusing to write non-finite entries")
    doc = {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "entries": [[float(v.real), float(v.imag)] for v in M.ravel()],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")

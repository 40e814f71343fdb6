"""One-qubit unitary dilations and the block-encoding container.

A matrix with operator norm at most 1 embeds in the top-left block of a
unitary twice its size.  The Hermitian dilation [[A, B], [B, -A]] with
B = sqrt(I - A^2) also squares to the identity, which is what the
eigenvalue-transformation product relies on.  alpha is carried for
bookkeeping and stays 1 at this scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError
from .linalg import (hermitian_eig, matrix_function_hermitian, operator_norm,
                     require_hermitian, require_square)

_NORM_SLACK = 1e-12
_UNITARITY_TOL = 1e-12


@dataclass(frozen=True)
class BlockEncoding:
    unitary: np.ndarray
    system_dim: int
    ancilla_dim: int
    reference_index: int
    alpha: float = 1.0

    @property
    def total_dim(self) -> int:
        return self.system_dim * self.ancilla_dim


def extract(be: BlockEncoding) -> np.ndarray:
    """The encoded matrix: alpha times the reference block of the unitary."""
    d, r = be.system_dim, be.reference_index
    return be.alpha * be.unitary[r * d : (r + 1) * d, r * d : (r + 1) * d]


def ancilla_rotation(be: BlockEncoding, phi: float) -> np.ndarray:
    """exp(i phi (2 P_ref - I)) on the ancilla, identity on the system."""
    return np.diag(rotation_diagonal(phi, be.ancilla_dim, be.system_dim, be.reference_index))


def rotation_diagonal(phi: float, ancilla_dim: int, system_dim: int, reference_index: int) -> np.ndarray:
    """Diagonal of the ancilla reflection rotation, as a vector."""
    diag = np.full(ancilla_dim * system_dim, np.exp(-1j * phi), dtype=np.complex128)
    diag[reference_index * system_dim : (reference_index + 1) * system_dim] = np.exp(1j * phi)
    return diag


def _check_unitary(U: np.ndarray, what: str) -> None:
    dev = float(np.abs(U.conj().T @ U - np.eye(U.shape[0])).max())
    if dev > _UNITARITY_TOL:
        raise NumericError(f"{what} failed the unitarity check by {dev:.3e}")


def dilate_hermitian(A: np.ndarray) -> BlockEncoding:
    """Hermitian dilation [[A, B], [B, -A]] with B = sqrt(I - A^2)."""
    A = require_hermitian(A)
    w, _ = hermitian_eig(A)
    if float(np.abs(w).max()) > 1.0 + _NORM_SLACK:
        raise DomainError(f"operator norm {np.abs(w).max():.12f} exceeds 1")
    B = matrix_function_hermitian(A, lambda t: np.sqrt(np.maximum(0.0, 1.0 - t * t)))
    B = (B + B.conj().T) / 2
    U = np.block([[A, B], [B, -A]])
    _check_unitary(U, "Hermitian dilation")
    return BlockEncoding(U, A.shape[0], 2, 0, 1.0)


def dilate_general(A: np.ndarray) -> BlockEncoding:
    """General dilation [[A, sqrt(I - A A^dag)], [sqrt(I - A^dag A), -A^dag]]."""
    A = require_square(np.asarray(A, dtype=np.complex128))
    if operator_norm(A) > 1.0 + _NORM_SLACK:
        raise DomainError("operator norm exceeds 1")
    right = matrix_function_hermitian((A.conj().T @ A + (A.conj().T @ A).conj().T) / 2,
                                      lambda t: np.sqrt(np.maximum(0.0, 1.0 - t)))
    left = matrix_function_hermitian((A @ A.conj().T + (A @ A.conj().T).conj().T) / 2,
                                     lambda t: np.sqrt(np.maximum(0.0, 1.0 - t)))
    U = np.block([[A, left], [right, -A.conj().T]])
    _check_unitary(U, "general dilation")
    return BlockEncoding(U, A.shape[0], 2, 0, 1.0)

"""Singular-value transformation drivers: polar factor, eigenspace filters.

The same phased product that drives eigenvalues of a Hermitian matrix
drives singular values of a general one once the rotations alternate
between the left and right projectors.  With the sign-iteration phases
this converges to the unitary polar factor.  Conditioning the sign
unitary on an extra ancilla between a pair of quarter Y rotations turns
it into a projector onto a chosen eigenspace, which is the preparation
primitive.
"""

from __future__ import annotations

from dataclasses import dataclass
import time

import numpy as np

from .blockenc import BlockEncoding, dilate_general
from .errors import DomainError, InputError, NumericError
from .linalg import (hermitian_eig, operator_norm, polar_oracle,
                     require_hermitian, require_square)
from .poly import pade, poly_eval
from .qet import (IterationReport, IterationRow, compose_phases,
                  distinct_nonzero_angles, error_bound, query_count,
                  run_sign, sign_iterations, template_daggers)
from .qsp import pade_phases

_PROJ_TOL = 1e-12
_STEP_TOL = 1e-10


@dataclass(frozen=True)
class QsvtEncoding:
    """Unitary with the target matrix in the corner the projectors select."""

    unitary: np.ndarray
    proj_left: np.ndarray
    proj_right: np.ndarray


def _check_projector(P: np.ndarray, what: str) -> np.ndarray:
    P = require_square(np.asarray(P, dtype=np.complex128))
    if np.abs(P - P.conj().T).max() > _PROJ_TOL or np.abs(P @ P - P).max() > _PROJ_TOL:
        raise DomainError(f"{what} is not a Hermitian idempotent")
    return P


def _coordinate_indices(P: np.ndarray, what: str) -> np.ndarray:
    d = np.real(np.diag(P))
    on = np.abs(d - 1.0) <= 1e-9
    off = np.abs(d) <= 1e-9
    if not np.all(on | off) or np.abs(P - np.diag(np.diag(P))).max() > _PROJ_TOL:
        raise DomainError(f"{what} must be a coordinate projector to address a block")
    return np.flatnonzero(on)


def encode_for_qsvt(A: np.ndarray) -> QsvtEncoding:
    """General dilation of A with top-block projectors on both sides."""
    be = dilate_general(A)
    d = be.system_dim
    proj = np.diag(np.concatenate((np.ones(d), np.zeros(d)))).astype(np.complex128)
    return QsvtEncoding(be.unitary, proj, proj)


def restricted_block(enc: QsvtEncoding) -> np.ndarray:
    """The matrix the encoding carries: rows from the left projector,
    columns from the right one."""
    rows = _coordinate_indices(enc.proj_left, "left projector")
    cols = _coordinate_indices(enc.proj_right, "right projector")
    return enc.unitary[np.ix_(rows, cols)]


def _projector_rotation(phi: float, P: np.ndarray) -> np.ndarray:
    return np.exp(1j * phi) * P + np.exp(-1j * phi) * (np.eye(P.shape[0]) - P)


def qsvt_assemble(enc: QsvtEncoding, phases: np.ndarray) -> np.ndarray:
    """Alternating phased product acting on singular values.

    Odd length only: an even product ends on the adjoint oracle and maps
    the right space to itself, which encodes a different (even) function
    class this driver does not use.  Rotations next to the plain oracle
    use the left projector, those next to the adjoint the right one.
    """
    phases = np.asarray(phases, dtype=np.float64)
    if phases.ndim != 1 or len(phases) == 0:
        raise InputError("phase list must be a nonempty 1-d array")
    if len(phases) % 2 == 0:
        raise DomainError("phase list must have odd length for a singular-value transform")
    PL = _check_projector(enc.proj_left, "left projector")
    PR = _check_projector(enc.proj_right, "right projector")
    U, Ud = enc.unitary, enc.unitary.conj().T
    out = np.eye(U.shape[0], dtype=np.complex128)
    for phi, dag in zip(phases, template_daggers(len(phases))):
        rot = _projector_rotation(phi, PR if dag else PL)
        out = out @ rot @ (Ud if dag else U)
    return out


def qsvt_step(enc: QsvtEncoding, phases: np.ndarray) -> QsvtEncoding:
    return QsvtEncoding(qsvt_assemble(enc, phases), enc.proj_left, enc.proj_right)


def _gram_update(X: np.ndarray, l: int) -> tuple[np.ndarray, np.ndarray]:
    """The iteration polynomial applied through either Gram factor."""
    p = pade(l)
    # odd polynomial p(x) = x g(x^2); both orderings must agree exactly
    g_coeffs = p.coeffs[1::2]
    d = X.shape[0]
    right_g = np.zeros((d, d), dtype=np.complex128)
    left_g = np.zeros((d, d), dtype=np.complex128)
    GR = X.conj().T @ X
    GL = X @ X.conj().T
    for c in g_coeffs[::-1]:
        right_g = right_g @ GR + np.real(c) * np.eye(d)
        left_g = left_g @ GL + np.real(c) * np.eye(d)
    return X @ right_g, left_g @ X


def run_polar(A: np.ndarray, delta: float, eps: float, l: int = 2,
              levels: int | None = None, max_depth: int = 4):
    """Iterate the singular-value sign transform toward the polar factor.

    Requires all singular values in [delta, 1].  Each step is checked
    against both Gram-side closed forms of the iteration polynomial; the
    reported error is against an independently computed polar factor.
    """
    A = require_square(np.asarray(A, dtype=np.complex128))
    gram = A.conj().T @ A
    w, _ = hermitian_eig((gram + gram.conj().T) / 2)
    sigma = np.sqrt(np.maximum(0.0, w))
    bad = (sigma < delta - 1e-9) | (sigma > 1.0 + 1e-9)
    if bad.any():
        raise DomainError("singular values outside [delta, 1]: "
                          + ", ".join(f"{v:.6g}" for v in sigma[bad]))
    unitary_factor, _ = polar_oracle(A)
    n = sign_iterations(delta, eps, l) if levels is None else levels
    if n < 0:
        raise InputError("levels must be nonnegative")
    if n > max_depth:
        raise DomainError(f"{n} levels exceed the depth cap {max_depth}")
    base = pade_phases(l)
    report = IterationReport("polar", delta, eps, l)
    enc = encode_for_qsvt(A)
    if n == 0:
        report.rows.append(IterationRow(0, operator_norm(A - unitary_factor),
                                        error_bound(delta, 0, l), 1, 0, 0.0))
        return enc, report
    X_prev = A
    flat = base
    for k in range(1, n + 1):
        t0 = time.perf_counter()
        enc = qsvt_step(enc, base)
        X = restricted_block(enc)
        via_right, via_left = _gram_update(X_prev, l)
        dev = max(float(np.abs(X - via_right).max()), float(np.abs(X - via_left).max()))
        if dev > _STEP_TOL:
            raise NumericError(f"transform step disagrees with the Gram closed forms by {dev:.3e}")
        err = operator_norm(X - unitary_factor)
        ms = (time.perf_counter() - t0) * 1e3
        report.rows.append(IterationRow(k, err, error_bound(delta, k, l),
                                        query_count(k, l), distinct_nonzero_angles(flat), ms))
        X_prev = X
        if k < n:
            flat = compose_phases(flat, base)
    return enc, report


def _quarter_y(sign: float, dim: int) -> np.ndarray:
    c = np.sqrt(0.5)
    rot = np.array([[c, sign * c], [-sign * c, c]], dtype=np.complex128)
    return np.kron(rot, np.eye(dim))


@dataclass(frozen=True)
class FilterResult:
    projector: np.ndarray
    unitary: np.ndarray
    report: IterationReport


def filtering_operator(A: np.ndarray, delta: float, eps: float, l: int = 2,
                       levels: int | None = None, max_matrix_depth: int = 4) -> FilterResult:
    """Approximate projector onto the positive eigenspace of A.

    Runs the sign iteration, conditions its unitary on a fresh ancilla,
    and sandwiches between opposite quarter Y rotations; the top block of
    the result is (identity + sign)/2.  An idempotency guard catches a
    wrong rotation pairing, which flips the block to (identity - X)/2
    only when the iterate is far from a true sign.
    """
    A = require_hermitian(A)
    be, report = run_sign(A, delta, eps, l, mode="recursive",
                          levels=levels, max_matrix_depth=max_matrix_depth)
    if not isinstance(be, BlockEncoding):
        raise NumericError("sign run did not return a block encoding")
    dim = be.total_dim
    conditioned = np.block([[np.eye(dim), np.zeros((dim, dim))],
                            [np.zeros((dim, dim)), be.unitary]]).astype(np.complex128)
    full = _quarter_y(-1.0, dim) @ conditioned @ _quarter_y(+1.0, dim)
    d = be.system_dim
    P = full[:d, :d]
    dev = float(np.abs(P @ P - P).max())
    if dev > 3.0 * eps + 1e-9:
        raise NumericError(f"filter block violates idempotency by {dev:.3e}")
    return FilterResult(P, full, report)


@dataclass(frozen=True)
class PreparationResult:
    projector: np.ndarray
    effective_gap: float
    eps_each: float
    plus_report: IterationReport
    minus_report: IterationReport


def preparation_projector(A: np.ndarray, delta: float, eps: float, l: int = 2,
                          max_matrix_depth: int = 8) -> PreparationResult:
    """Projector onto the unique zero eigenvector of a gapped A.

    Shifts A by half the gap each way, rescales into norm 1, and filters
    the positive eigenspace of both shifts.  The shifted matrices have
    gap delta/(2 + delta), and each filter gets half the error budget.
    The depth cap default is looser than the sign driver's because the
    shrunken gap typically needs an extra level or two at desk scale.
    """
    A = require_hermitian(A)
    if not (0.0 < delta < 1.0):
        raise DomainError("spectral gap must lie strictly between 0 and 1")
    w, _ = hermitian_eig(A)
    inner = np.abs(w) < delta - 1e-9
    if int(inner.sum()) != 1:
        raise DomainError(f"need exactly one eigenvalue inside +-{delta:.3g}, found {int(inner.sum())}")
    if abs(float(w[inner][0])) > 1e-9:
        raise DomainError(f"the isolated eigenvalue {w[inner][0]:.3e} is not zero")
    if float(np.abs(w).max()) > 1.0 + 1e-9:
        raise DomainError("eigenvalues must lie in [-1, 1]")
    scale = 1.0 + delta / 2.0
    eff_gap = delta / (2.0 + delta)
    eps_each = eps / 2.0
    d = A.shape[0]
    plus = (A + (delta / 2.0) * np.eye(d)) / scale
    minus = -(A - (delta / 2.0) * np.eye(d)) / scale
    f_plus = filtering_operator(plus, eff_gap, eps_each, l, max_matrix_depth=max_matrix_depth)
    f_minus = filtering_operator(minus, eff_gap, eps_each, l, max_matrix_depth=max_matrix_depth)
    P0 = f_plus.projector @ f_minus.projector
    return PreparationResult(P0, eff_gap, eps_each, f_plus.report, f_minus.report)


def project_state(P: np.ndarray, state: np.ndarray) -> tuple[np.ndarray, float]:
    """Apply a (possibly approximate) projector and renormalize.

    Returns the post-selected state and the success probability, the
    squared norm of the projected vector for a normalized input.
    """
    P = require_square(np.asarray(P, dtype=np.complex128))
    v = np.asarray(state, dtype=np.complex128).reshape(-1)
    if v.shape[0] != P.shape[0]:
        raise InputError("state dimension does not match the projector")
    nrm = float(np.linalg.norm(v))
    if nrm == 0.0:
        raise InputError("state vector is zero")
    v = v / nrm
    out = P @ v
    prob = float(np.real(np.vdot(out, out)))
    if prob < 1e-300:
        raise DomainError("state has no overlap with the projected subspace")
    return out / np.sqrt(prob), prob

"""Polynomials with parity metadata, the odd iteration family, and root finding.

The iteration family is p_l(x) = x * sum_{k<=l} binom(2k,k)/4^k (1-x^2)^k.
Each member fixes x = +-1 and, for even l, satisfies the three conditions
that make it realizable as a phase sequence: definite parity, |p| <= 1 on
[-1, 1], and domination outside the unit interval (plus the imaginary-axis
variant for even degree).  All family coefficients are dyadic rationals,
so double arithmetic below is exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainError, InputError, NumericError

TRIM_TOL = 1e-14
PARITY_TOL = 1e-12


@dataclass(frozen=True)
class ComplexPolynomial:
    coeffs: np.ndarray  # complex128, index = power of x
    parity: str         # "even", "odd", or "none"

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class ConditionReport:
    degree_ok: bool
    parity_ok: bool
    bounded_inside: bool
    dominating_outside: bool
    even_axis_ok: bool
    witness: tuple[str, float, float] | None  # (check, x, value) for the first failure

    @property
    def passed(self) -> bool:
        return (self.degree_ok and self.parity_ok and self.bounded_inside
                and self.dominating_outside and self.even_axis_ok)


def _trim(coeffs: np.ndarray) -> np.ndarray:
    nz = np.nonzero(np.abs(coeffs) > TRIM_TOL)[0]
    if len(nz) == 0:
        return np.zeros(1, dtype=np.complex128)
    return coeffs[: nz[-1] + 1]


def _infer_parity(coeffs: np.ndarray) -> str:
    even_mass = float(np.abs(coeffs[0::2]).max()) if len(coeffs[0::2]) else 0.0
    odd_mass = float(np.abs(coeffs[1::2]).max()) if len(coeffs[1::2]) else 0.0
    if odd_mass <= PARITY_TOL and even_mass > PARITY_TOL:
        return "even"
    if even_mass <= PARITY_TOL and odd_mass > PARITY_TOL:
        return "odd"
    return "none"


def polynomial(coeffs, parity: str | None = None) -> ComplexPolynomial:
    """Build a trimmed polynomial, inferring or validating its parity flag."""
    c = _trim(np.atleast_1d(np.asarray(coeffs, dtype=np.complex128)).copy())
    c.setflags(write=False)
    if parity is None:
        parity = _infer_parity(c)
    elif parity not in ("even", "odd", "none"):
        raise InputError(f"unknown parity {parity!r}")
    elif parity in ("even", "odd"):
        opposite = c[1::2] if parity == "even" else c[0::2]
        if len(opposite) and np.abs(opposite).max() > PARITY_TOL:
            raise DomainError(f"declared parity {parity!r} conflicts with the coefficients")
    return ComplexPolynomial(c, parity)


def poly_eval(p: ComplexPolynomial | np.ndarray, x):
    """Evaluate at scalar or array x (Horner)."""
    c = p.coeffs if isinstance(p, ComplexPolynomial) else np.asarray(p, dtype=np.complex128)
    return P.polyval(x, c)


def conj_poly(p: ComplexPolynomial) -> ComplexPolynomial:
    """Coefficient-wise conjugate, so conj_poly(p)(x) = conj(p(x)) for real x."""
    return ComplexPolynomial(np.conj(p.coeffs), p.parity)


def pade(l: int) -> ComplexPolynomial:
    """Member l of the odd iteration family, exact in double precision."""
    if not isinstance(l, int) or l < 1:
        raise DomainError(f"family index must be a positive integer, got {l!r}")
    u = np.array([1.0, 0.0, -1.0])  # 1 - x^2
    acc = np.zeros(2 * l + 1, dtype=np.float64)
    upow = np.array([1.0])
    for k in range(l + 1):
        ck = math.comb(2 * k, k) / 4.0 ** k
        acc[: len(upow)] += ck * upow
        upow = np.convolve(upow, u)
    coeffs = np.concatenate([[0.0], acc]).astype(np.complex128)
    return polynomial(coeffs, "odd")


def check_qet_conditions(p: ComplexPolynomial, grid_size: int = 10_000,
                         outer_limit: float = 10.0) -> ConditionReport:
    """Grid check of the realizability conditions for a candidate polynomial.

    Inside: |p| <= 1 + 1e-9 on [-1, 1].  Outside: |p| >= 1 - 1e-9 on
    [1, outer_limit].  For even degree additionally |p(ix) p*(ix)| >= 1 - 1e-9
    on [0, outer_limit].  The witness records the first failing point.
    """
    if grid_size < 1000:
        raise InputError(f"grid_size must be at least 1000, got {grid_size}")
    if outer_limit <= 1.0:
        raise InputError(f"outer_limit must exceed 1, got {outer_limit}")
    degree_ok = p.degree >= 1 and abs(p.coeffs[-1]) > TRIM_TOL
    want = "odd" if p.degree % 2 else "even"
    parity_ok = p.parity == want and _infer_parity(p.coeffs) == want
    witness = None
    tol = 1e-9

    xs = np.linspace(-1.0, 1.0, grid_size)
    vals = np.abs(poly_eval(p, xs))
    bad = np.nonzero(vals > 1.0 + tol)[0]
    bounded_inside = len(bad) == 0
    if not bounded_inside and witness is None:
        witness = ("bounded_inside", float(xs[bad[0]]), float(vals[bad[0]]))

    xo = np.linspace(1.0, outer_limit, grid_size)
    vo = np.abs(poly_eval(p, xo))
    bad = np.nonzero(vo < 1.0 - tol)[0]
    dominating_outside = len(bad) == 0
    if not dominating_outside and witness is None:
        witness = ("dominating_outside", float(xo[bad[0]]), float(vo[bad[0]]))

    even_axis_ok = True
    if p.degree % 2 == 0:
        xa = np.linspace(0.0, outer_limit, grid_size)
        va = np.abs(poly_eval(p, 1j * xa) * poly_eval(conj_poly(p), 1j * xa))
        bad = np.nonzero(va < 1.0 - tol)[0]
        even_axis_ok = len(bad) == 0
        if not even_axis_ok and witness is None:
            witness = ("even_axis", float(xa[bad[0]]), float(va[bad[0]]))

    return ConditionReport(degree_ok, parity_ok, bounded_inside,
                           dominating_outside, even_axis_ok, witness)


def deflate_pade_square(l: int) -> ComplexPolynomial:
    """Factor 1 - p_l(x)^2 = (1-u)^(l+1) q(u) in u = x^2 and return q.

    Division is synthetic; any remainder above 1e-10 is an internal
    consistency failure since the family makes the factorization exact.
    """
    pl = pade(l)
    sq = -np.convolve(pl.coeffs, pl.coeffs)
    sq[0] += 1.0
    if np.abs(sq[1::2]).max() > PARITY_TOL:
        raise NumericError("1 - p^2 picked up odd powers; coefficients corrupted")
    ucoef = np.real(sq[0::2]).copy()
    for _ in range(l + 1):
        quotient = np.zeros(len(ucoef) - 1)
        work = ucoef.copy()
        for k in range(len(work) - 1, 0, -1):
            quotient[k - 1] = -work[k]      # dividing by (1 - u)
            work[k - 1] -= quotient[k - 1]
        if abs(work[0]) > 1e-10:
            raise NumericError(f"deflation remainder {work[0]:.3e} exceeds 1e-10")
        ucoef = quotient
    return polynomial(ucoef.astype(np.complex128), "none")


# -------------------------------------------------------------- root finding

def _roots_quadratic(c: np.ndarray) -> np.ndarray:
    a, b, c0 = c[2], c[1], c[0]
    disc = np.sqrt(b * b - 4.0 * a * c0 + 0j)
    if (np.conj(b) * disc).real < 0.0:
        disc = -disc
    t = -(b + disc) / 2.0
    if abs(t) > 0.0:
        return np.array([t / a, c0 / t])
    return np.array([0.0 + 0j, -b / a])


def _roots_cubic(c: np.ndarray) -> np.ndarray:
    b, c1, d = c[2] / c[3], c[1] / c[3], c[0] / c[3]
    p = c1 - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c1 / 3.0 + d
    sq = np.sqrt((q / 2.0) ** 2 + (p / 3.0) ** 3 + 0j)
    u3 = -q / 2.0 + sq
    if abs(u3) < 1e-300:
        u3 = -q / 2.0 - sq
    u = u3 ** (1.0 / 3.0)
    out = np.empty(3, dtype=np.complex128)
    for k in range(3):
        uk = u * np.exp(2j * np.pi * k / 3.0)
        out[k] = uk - (p / (3.0 * uk) if abs(uk) > 0 else 0.0) - b / 3.0
    return out


def _roots_quartic(c: np.ndarray) -> np.ndarray:
    b, c2, d, e = c[3] / c[4], c[2] / c[4], c[1] / c[4], c[0] / c[4]
    p = c2 - 3.0 * b * b / 8.0
    q = d - b * c2 / 2.0 + b**3 / 8.0
    r = e - b * d / 4.0 + b * b * c2 / 16.0 - 3.0 * b**4 / 256.0
    shift = b / 4.0
    if abs(q) < 1e-14 * max(1.0, abs(p), abs(r)):
        # biquadratic
        ys = _roots_quadratic(np.array([r, p, 1.0 + 0j]))
        sy = np.sqrt(ys + 0j)
        return np.concatenate([sy, -sy]) - shift
    zs = _roots_cubic(np.array([4.0 * p * r - q * q, -4.0 * r, -p, 1.0 + 0j]))
    z = zs[np.argmax(np.abs(zs - p))]  # need z - p away from zero
    w = np.sqrt(z - p + 0j)
    out = np.empty(4, dtype=np.complex128)
    out[:2] = _roots_quadratic(np.array([z / 2.0 + q / (2.0 * w), -w, 1.0 + 0j]))
    out[2:] = _roots_quadratic(np.array([z / 2.0 - q / (2.0 * w), w, 1.0 + 0j]))
    return out - shift


def _durand_kerner(c: np.ndarray, max_iter: int = 500) -> np.ndarray:
    c = c / c[-1]
    n = len(c) - 1
    scale = max(1.0, float(np.abs(c).max()))
    roots = (0.4 + 0.9j) ** np.arange(1, n + 1)  # perturbed unit-circle starts
    for _ in range(max_iter):
        vals = P.polyval(roots, c)
        # rounding noise in polyval floors the reachable step size, so
        # convergence is judged on residuals, not on step stagnation
        if np.abs(vals).max() <= 1e-12 * scale:
            return roots
        step = np.empty_like(roots)
        for i in range(n):
            diff = roots[i] - np.delete(roots, i)
            step[i] = vals[i] / np.prod(diff)
        roots = roots - step
        if np.abs(step).max() <= 1e-14 * max(1.0, float(np.abs(roots).max())):
            return roots
    if np.abs(P.polyval(roots, c)).max() <= 1e-10 * scale:
        return roots
    raise NumericError(f"root iteration did not settle in {max_iter} steps "
                       f"(last residual {np.abs(P.polyval(roots, c)).max():.3e})")


def roots_in_u(q: ComplexPolynomial | np.ndarray, analytic_if_possible: bool = True) -> np.ndarray:
    """All roots of a polynomial: closed forms through degree 4, else iterative.

    Every returned root is validated against |q(root)| <= 1e-10 relative to
    the largest coefficient.
    """
    c = _trim(np.asarray(q.coeffs if isinstance(q, ComplexPolynomial) else q,
                         dtype=np.complex128))
    deg = len(c) - 1
    if deg < 1:
        raise DomainError("constant polynomial has no roots to return")
    if analytic_if_possible and deg == 1:
        roots = np.array([-c[0] / c[1]])
    elif analytic_if_possible and deg == 2:
        roots = _roots_quadratic(c)
    elif analytic_if_possible and deg == 3:
        roots = _roots_cubic(c)
    elif analytic_if_possible and deg == 4:
        roots = _roots_quartic(c)
    else:
        roots = _durand_kerner(c)
    scale = max(1.0, float(np.abs(c).max()))
    resid = np.abs(P.polyval(roots, c))
    if resid.max() > 1e-10 * scale:
        raise NumericError(f"root residual {resid.max():.3e} exceeds 1e-10 * {scale:.3e}")
    return roots


# ------------------------------------------------------------------- file io

def _reject_constant(name: str):
    raise InputError(f"non-finite value {name!r} in polynomial file")


def load_poly(path: str) -> ComplexPolynomial:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh, parse_constant=_reject_constant)
        except json.JSONDecodeError as exc:
            raise InputError(f"not valid JSON: {path}: {exc}") from exc
    if not isinstance(doc, dict) or not {"coeffs", "parity"} <= set(doc):
        raise InputError(f"polynomial file {path} needs keys coeffs, parity")
    pairs = doc["coeffs"]
    if not isinstance(pairs, list) or not pairs:
        raise InputError("coeffs must be a non-empty list of [re, im] pairs")
    out = np.empty(len(pairs), dtype=np.complex128)
    for k, item in enumerate(pairs):
        if not (isinstance(item, list) and len(item) == 2
                and all(isinstance(v, (int, float)) and math.isfinite(v) for v in item)):
            raise InputError(f"coefficient {k} is not a finite [re, im] pair")
        out[k] = complex(item[0], item[1])
    parity = doc["parity"]
    if parity not in ("even", "odd", "none"):
        raise InputError(f"parity must be even, odd, or none, got {parity!r}")
    try:
        return polynomial(out, parity)
    except DomainError as exc:
        raise InputError(str(exc)) from exc


def save_poly(path: str, p: ComplexPolynomial) -> None:
    doc = {
        "coeffs": [[float(v.real), float(v.imag)] for v in p.coeffs],
        "parity": p.parity,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")

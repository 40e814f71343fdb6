"""Command-line front end.

Subcommands: phases (derive and flatten angle lists), sign-run and
polar-run (iteration drivers with CSV reports), conditions (check a
polynomial against the admissibility tests), perturb (coherent phase
noise sweep).  Exit codes: 0 success, 2 bad input, 3 domain
precondition violated, 4 numeric failure (including a run that ends
above its tolerance).  RQET_TOL overrides the default angle-comparison
tolerance; RQET_PURE_NUMPY=1 forces the numpy kernel path.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .errors import DomainError, InputError, NumericError
from .linalg import load_matrix, operator_norm
from .poly import check_qet_conditions, load_poly, pade
from .qet import (coherent_perturb, compose_phases, distinct_nonzero_angles,
                  flatten_sign_phases, query_count, run_sign)
from .qsp import canonicalize_angles, pade_phases, save_phases
from .qsvt import run_polar
from .blockenc import dilate_hermitian, extract
from .qet import qet_assemble

_MAX_PADE = 8


def _angle_tol() -> float:
    raw = os.environ.get("RQET_TOL", "").strip()
    if not raw:
        return 1e-9
    try:
        tol = float(raw)
    except ValueError as exc:
        raise InputError(f"RQET_TOL is not a number: {raw!r}") from exc
    if not (tol > 0.0):
        raise InputError("RQET_TOL must be positive")
    return tol


def _random_hermitian(seed: int, dim: int, gap: float) -> np.ndarray:
    """Seeded Hermitian test matrix with eigenvalues in +-[gap, 1]."""
    if dim < 1:
        raise InputError("dim must be positive")
    if not (0.0 < gap < 1.0):
        raise InputError("gap must lie strictly between 0 and 1")
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    Q, R = np.linalg.qr(Z)
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))[None, :].conj()
    mags = rng.uniform(gap, 1.0, size=dim)
    signs = np.where(rng.uniform(size=dim) < 0.5, -1.0, 1.0)
    if dim >= 2:
        signs[0], signs[1] = 1.0, -1.0
    vals = mags * signs
    M = (Q * vals[None, :]) @ Q.conj().T
    return (M + M.conj().T) / 2


def _random_general(seed: int, dim: int, gap: float) -> np.ndarray:
    """Seeded non-Hermitian test matrix with singular values in [gap, 1]."""
    if dim < 1:
        raise InputError("dim must be positive")
    if not (0.0 < gap < 1.0):
        raise InputError("gap must lie strictly between 0 and 1")
    rng = np.random.default_rng(seed)
    sv = rng.uniform(gap, 1.0, size=dim)
    U = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))[0]
    V = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))[0]
    return (U * sv[None, :]) @ V.conj().T


def _load_or_generate(args, hermitian: bool) -> tuple[np.ndarray, dict]:
    meta: dict = {}
    if args.matrix is not None:
        A = load_matrix(args.matrix)
        meta["source"] = args.matrix
    else:
        if args.dim is None:
            raise InputError("provide --matrix PATH or --seed with --dim")
        gen = _random_hermitian if hermitian else _random_general
        A = gen(args.seed, args.dim, args.gap)
        meta["source"] = f"seed={args.seed} dim={args.dim}"
    meta["normalization"] = 1.0
    if args.normalize:
        nrm = operator_norm(A)
        if nrm > 1.0:
            A = A / nrm
            meta["normalization"] = nrm
    return A, meta


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _require_even_pade(l: int) -> None:
    if l < 1 or l > _MAX_PADE:
        raise InputError(f"--pade-l must lie in 1..{_MAX_PADE}")
    if l % 2 == 1:
        report = check_qet_conditions(pade(l))
        witness = ""
        if report.witness is not None:
            name, x, val = report.witness
            witness = f" (witness: {name} at x={x:.6g} gives {val:.9g})"
        raise InputError(
            f"odd index {l} is not admissible: the iteration polynomial dips "
            f"below 1 in magnitude just outside [-1, 1], so no complementary "
            f"polynomial exists{witness}")


def _cmd_phases(args) -> int:
    _require_even_pade(args.pade_l)
    tol = _angle_tol()
    base = pade_phases(args.pade_l)
    flat = flatten_sign_phases(args.pade_l, args.iters)
    payload = {
        "pade_l": args.pade_l,
        "form": "reflection",
        "levels": args.iters,
        "base_angles": [float(v) for v in base],
        "flattened_length": int(len(flat)),
        "query_count": query_count(args.iters, args.pade_l),
        "distinct_nonzero": distinct_nonzero_angles(flat, tol),
    }
    if args.out is not None:
        save_phases(args.out, "reflection", flat)
        payload["out"] = args.out
    else:
        payload["flattened_angles"] = [float(v) for v in flat]
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    return 0


def _cmd_conditions(args) -> int:
    p = load_poly(args.poly)
    report = check_qet_conditions(p, grid_size=args.grid_size)
    payload = {
        "degree_ok": bool(report.degree_ok),
        "parity_ok": bool(report.parity_ok),
        "bounded_inside": bool(report.bounded_inside),
        "dominating_outside": bool(report.dominating_outside),
        "even_axis_ok": bool(report.even_axis_ok),
        "passed": bool(report.passed),
    }
    if report.witness is not None:
        name, x, val = report.witness
        payload["witness"] = {"check": name, "x": float(x), "value": float(val)}
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    return 0 if report.passed else 3


def _cmd_sign_run(args) -> int:
    _require_even_pade(args.pade_l)
    A, meta = _load_or_generate(args, hermitian=True)
    result, report = run_sign(A, args.gap, args.epsilon, args.pade_l,
                              mode=args.mode, levels=args.iters,
                              max_matrix_depth=args.max_depth)
    _emit(report.to_csv(), args.out)
    summary = {
        "command": "sign-run",
        "mode": args.mode,
        "levels": report.rows[-1].n,
        "final_error": report.final_error,
        "epsilon": args.epsilon,
        "converged": report.converged,
        **meta,
    }
    sys.stdout.write(json.dumps(summary, indent=2) + "\n")
    return 0 if report.converged else 4


def _cmd_polar_run(args) -> int:
    _require_even_pade(args.pade_l)
    A, meta = _load_or_generate(args, hermitian=False)
    _, report = run_polar(A, args.gap, args.epsilon, args.pade_l,
                          levels=args.iters, max_depth=args.max_depth)
    _emit(report.to_csv(), args.out)
    summary = {
        "command": "polar-run",
        "levels": report.rows[-1].n,
        "final_error": report.final_error,
        "epsilon": args.epsilon,
        "converged": report.converged,
        **meta,
    }
    sys.stdout.write(json.dumps(summary, indent=2) + "\n")
    return 0 if report.converged else 4


def _parse_grid(spec: str) -> np.ndarray:
    parts = spec.split(":")
    if len(parts) != 3:
        raise InputError("--delta-grid must look like lo:hi:count")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise InputError(f"bad --delta-grid {spec!r}") from exc
    if not (0.0 < lo <= hi) or count < 1:
        raise InputError("--delta-grid needs 0 < lo <= hi and count >= 1")
    if count == 1:
        return np.array([lo])
    return np.geomspace(lo, hi, count)


def _cmd_perturb(args) -> int:
    _require_even_pade(args.pade_l)
    if args.iters < 1:
        raise InputError("--iters must be at least 1")
    A, meta = _load_or_generate(args, hermitian=True)
    base = pade_phases(args.pade_l)
    flat = base
    for _ in range(args.iters - 1):
        flat = compose_phases(flat, base)
    be = dilate_hermitian(A)
    reference = qet_assemble(be, flat)
    X_ref = reference[:be.system_dim, :be.system_dim]
    rows = ["delta,error"]
    for d in np.concatenate(([0.0], _parse_grid(args.delta_grid))):
        noisy = coherent_perturb(flat, float(d))
        X = qet_assemble(be, noisy)[:be.system_dim, :be.system_dim]
        rows.append(f"{float(d):.17g},{operator_norm(X - X_ref):.17g}")
    _emit("\n".join(rows) + "\n", args.out)
    summary = {"command": "perturb", "levels": args.iters,
               "phase_count": int(len(flat)), **meta}
    sys.stdout.write(json.dumps(summary, indent=2) + "\n")
    return 0


def _add_matrix_args(sp, default_gap: float) -> None:
    sp.add_argument("--matrix", help="JSON matrix file")
    sp.add_argument("--seed", type=int, default=0, help="generator seed")
    sp.add_argument("--dim", type=int, help="generated matrix dimension")
    sp.add_argument("--gap", type=float, default=default_gap,
                    help="spectral gap / smallest singular value")
    sp.add_argument("--normalize", action="store_true",
                    help="rescale by the operator norm when it exceeds 1")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rqet",
                                 description="analytic phase factors and sign-iteration drivers")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phases", help="derive and flatten reflection phases")
    p.add_argument("--pade-l", type=int, default=2, dest="pade_l")
    p.add_argument("--iters", type=int, default=1, help="nesting levels to flatten")
    p.add_argument("--out", help="write the flattened list as JSON here")
    p.set_defaults(func=_cmd_phases)

    p = sub.add_parser("conditions", help="check a polynomial file for admissibility")
    p.add_argument("poly", help="JSON polynomial file")
    p.add_argument("--grid-size", type=int, default=10_000, dest="grid_size")
    p.set_defaults(func=_cmd_conditions)

    p = sub.add_parser("sign-run", help="matrix sign iteration with a CSV report")
    _add_matrix_args(p, 0.5)
    p.add_argument("--epsilon", type=float, default=1e-8)
    p.add_argument("--pade-l", type=int, default=2, dest="pade_l")
    p.add_argument("--iters", type=int, help="override the derived level count")
    p.add_argument("--mode", choices=("recursive", "flattened", "scalar"), default="recursive")
    p.add_argument("--max-depth", type=int, default=4, dest="max_depth")
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.set_defaults(func=_cmd_sign_run)

    p = sub.add_parser("polar-run", help="polar-factor iteration with a CSV report")
    _add_matrix_args(p, 0.5)
    p.add_argument("--epsilon", type=float, default=1e-8)
    p.add_argument("--pade-l", type=int, default=2, dest="pade_l")
    p.add_argument("--iters", type=int, help="override the derived level count")
    p.add_argument("--max-depth", type=int, default=4, dest="max_depth")
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.set_defaults(func=_cmd_polar_run)

    p = sub.add_parser("perturb", help="coherent phase-noise sweep")
    _add_matrix_args(p, 0.5)
    p.add_argument("--pade-l", type=int, default=2, dest="pade_l")
    p.add_argument("--iters", type=int, default=1)
    p.add_argument("--delta-grid", default="1e-6:1e-2:9", dest="delta_grid",
                   help="log-spaced relative perturbations, lo:hi:count")
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.set_defaults(func=_cmd_perturb)

    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

"""Compare the compiled and pure-numpy kernel paths.

Run as a script; prints a small table.  The two hot loops are the Jacobi
eigensolver sweeps and the scalar phase-chain evaluation.  Set
RQET_PURE_NUMPY=1 to confirm the fallback selection from the
environment instead of the in-process toggle used here.
"""

from __future__ import annotations

import time

import numpy as np

from rqet._kernels import (HAS_NUMBA, _jacobi_sweeps_numpy, _phase_chain_numpy,
                           numba_active)

if HAS_NUMBA:
    from rqet._kernels import _jacobi_sweeps_jit, _phase_chain_jit


def _hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (Z + Z.conj().T) / 2


def bench_jacobi(n: int = 64, repeats: int = 5) -> None:
    rng = np.random.default_rng(0)
    H = _hermitian(rng, n)
    thresh = 1e-14 * max(1.0, float(np.linalg.norm(H, "fro")))

    def run(kernel) -> float:
        best = float("inf")
        for _ in range(repeats):
            A = H.copy()
            V = np.eye(n, dtype=np.complex128)
            t0 = time.perf_counter()
            kernel(A, V, thresh, 100)
            best = min(best, time.perf_counter() - t0)
        return best

    t_np = run(_jacobi_sweeps_numpy)
    print(f"jacobi  dim={n:3d}   numpy {t_np * 1e3:9.2f} ms", end="")
    if HAS_NUMBA:
        _jacobi_sweeps_jit(H.copy(), np.eye(n, dtype=np.complex128), thresh, 100)  # warm up
        t_jit = run(_jacobi_sweeps_jit)
        print(f"   numba {t_jit * 1e3:9.2f} ms   speedup {t_np / t_jit:6.1f}x")
    else:
        print("   (numba unavailable)")


def bench_chain(n_phases: int = 5 ** 7, n_points: int = 21, repeats: int = 3) -> None:
    rng = np.random.default_rng(1)
    phases = rng.uniform(-np.pi, np.pi, n_phases)
    xs = np.linspace(-1.0, 1.0, n_points)

    def run(kernel) -> float:
        best = float("inf")
        for _ in range(repeats):
            t0 = time.perf_counter()
            kernel(phases, xs)
            best = min(best, time.perf_counter() - t0)
        return best

    t_np = run(_phase_chain_numpy)
    print(f"chain   len={n_phases}  numpy {t_np * 1e3:9.2f} ms", end="")
    if HAS_NUMBA:
        _phase_chain_jit(phases[:10], xs)  # warm up
        t_jit = run(_phase_chain_jit)
        print(f"   numba {t_jit * 1e3:9.2f} ms   speedup {t_np / t_jit:6.1f}x")
    else:
        print("   (numba unavailable)")


if __name__ == "__main__":
    print(f"active path: {'numba' if numba_active() else 'numpy'}")
    bench_jacobi()
    bench_chain()

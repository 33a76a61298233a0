"""Pure-numpy kernel backend.

Reference implementation of the hot collision loops; the compiled backend
in ``_compiled.pyx`` must match these results bit-for-bit up to BLAS
rounding.  All functions take a C-contiguous complex128 Kraus stack of
shape (m, D, D).
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"


def hermitian_trace_norm(a: np.ndarray) -> float:
    """||A||_1 for Hermitian A, as the sum of |eigenvalues|."""
    return float(np.abs(np.linalg.eigvalsh(a)).sum())


def apply_kraus(kraus: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """sum_k K_k rho K_k^dag."""
    return np.einsum("kij,jl,kml->im", kraus, rho, kraus.conj(), optimize=True)


def trajectory(kraus: np.ndarray, rho0: np.ndarray, n: int) -> np.ndarray:
    """States after 0..n applications, shape (n+1, D, D)."""
    d = rho0.shape[0]
    out = np.empty((n + 1, d, d), dtype=complex)
    out[0] = rho0
    for k in range(n):
        out[k + 1] = apply_kraus(kraus, out[k])
    return out


def iterate_until(
    kraus: np.ndarray, rho0: np.ndarray, tol: float, max_iter: int
) -> tuple[np.ndarray, int, float, bool]:
    """Iterate until the step-to-step trace-norm residual drops below tol.

    Returns (state, iterations, last residual, converged).
    """
    rho = np.array(rho0, dtype=complex)
    residual = np.inf
    for k in range(1, max_iter + 1):
        nxt = apply_kraus(kraus, rho)
        residual = hermitian_trace_norm(nxt - rho)
        rho = nxt
        if residual <= tol:
            return rho, k, residual, True
    return rho, max_iter, residual, False


def iterate_to_target(
    kraus: np.ndarray,
    rho0: np.ndarray,
    target: np.ndarray,
    tol: float,
    max_iter: int,
) -> tuple[np.ndarray, int, float, bool]:
    """Iterate until the trace-norm distance to ``target`` drops below tol.

    Returns (state, iterations, last distance, converged); zero iterations
    when the initial state is already within tolerance.
    """
    rho = np.array(rho0, dtype=complex)
    distance = hermitian_trace_norm(rho - target)
    if distance <= tol:
        return rho, 0, distance, True
    for k in range(1, max_iter + 1):
        rho = apply_kraus(kraus, rho)
        distance = hermitian_trace_norm(rho - target)
        if distance <= tol:
            return rho, k, distance, True
    return rho, max_iter, distance, False

# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Same contract as ``_pure``: the collision hot loops, with the matrix
products routed through BLAS (zgemm) and the Hermitian trace norm through
LAPACK (zheev), all without per-step Python overhead.
"""

import numpy as np

cimport numpy as cnp
from scipy.linalg.cython_blas cimport zgemm
from scipy.linalg.cython_lapack cimport zheev

cnp.import_array()

BACKEND = "compiled"

ctypedef double complex zdouble


cdef void _gemm_nn(int d, zdouble* a, zdouble* b, zdouble alpha,
                   zdouble beta, zdouble* c) noexcept nogil:
    # Row-major C = alpha * A @ B + beta * C via column-major C^T = B^T A^T.
    zgemm("N", "N", &d, &d, &d, &alpha, b, &d, a, &d, &beta, c, &d)


cdef void _gemm_dag_accum(int d, zdouble* k, zdouble* t,
                          zdouble* c) noexcept nogil:
    # Row-major C += T @ K^dag: column-major C^T += conj(K) @ T^T, and the
    # column-major view of row-major K is K^T, whose 'C' op is conj(K).
    cdef zdouble one = 1.0
    zgemm("C", "N", &d, &d, &d, &one, k, &d, t, &d, &one, c, &d)


cdef void _apply_kraus(int m, int d, zdouble* kraus, zdouble* rho,
                       zdouble* scratch, zdouble* out) noexcept nogil:
    cdef int i, n2 = d * d
    cdef zdouble one = 1.0, zero = 0.0
    for i in range(n2):
        out[i] = 0.0
    for i in range(m):
        _gemm_nn(d, kraus + i * n2, rho, one, zero, scratch)
        _gemm_dag_accum(d, kraus + i * n2, scratch, out)


cdef double _trace_norm_herm(int d, zdouble* a, zdouble* work, int lwork,
                             double* rwork, double* w) noexcept nogil:
    # zheev destroys its input; callers pass a scratch copy in `a`.  The
    # column-major view of a row-major Hermitian matrix is its conjugate,
    # which has the same (real) spectrum.
    cdef int info = 0
    cdef int i
    cdef double acc = 0.0
    zheev("N", "L", &d, a, &d, w, work, &lwork, rwork, &info)
    if info != 0:
        return -1.0
    for i in range(d):
        acc += w[i] if w[i] >= 0 else -w[i]
    return acc


def hermitian_trace_norm(a):
    """||A||_1 for Hermitian A, as the sum of |eigenvalues|."""
    cdef cnp.ndarray[zdouble, ndim=2, mode="c"] buf = np.array(
        a, dtype=np.complex128, order="C")
    cdef int d = buf.shape[0]
    cdef int lwork = 2 * d if d > 1 else 2
    cdef cnp.ndarray[zdouble, ndim=1] work = np.empty(lwork, dtype=np.complex128)
    cdef cnp.ndarray[double, ndim=1] rwork = np.empty(max(1, 3 * d - 2))
    cdef cnp.ndarray[double, ndim=1] w = np.empty(d)
    cdef double norm = _trace_norm_herm(d, &buf[0, 0], &work[0], lwork,
                                        &rwork[0], &w[0])
    if norm < 0:
        raise np.linalg.LinAlgError("zheev failed to converge")
    return norm


def apply_kraus(kraus, rho):
    """sum_k K_k rho K_k^dag."""
    cdef cnp.ndarray[zdouble, ndim=3, mode="c"] ks = np.ascontiguousarray(
        kraus, dtype=np.complex128)
    cdef cnp.ndarray[zdouble, ndim=2, mode="c"] r = np.ascontiguousarray(
        rho, dtype=np.complex128)
    cdef int m = ks.shape[0], d = ks.shape[1]
    cdef cnp.ndarray[zdouble, ndim=2, mode="c"] scratch = np.empty(
        (d, d), dtype=np.complex128)
    cdef cnp.ndarray[zdouble, ndim=2, mode="c"] out = np.empty(
        (d, d), dtype=np.complex128)
    with nogil:
        _apply_kraus(m, d, &ks[0, 0, 0], &r[0, 0], &scratch[0, 0], &out[0, 0])
    return out


def trajectory(kraus, rho0, int n):
    """States after 0..n applications, shape (n+1, D, D)."""
    cdef cnp.ndarray[zdouble, ndim=3, mode="c"] ks = np.ascontiguousarray(
        kraus, dtype=np.complex128)
    cdef int m = ks.shape[0], d = ks.shape[1]
    cdef cnp.ndarray[zdouble, ndim=3, mode="c"] out = np.empty(
        (n + 1, d, d), dtype=np.complex128)
    out[0] = np.ascontiguousarray(rho0, dtype=np.complex128)
    cdef cnp.ndarray[zdouble, ndim=2, mode="c"] scratch = np.empty(
        (d, d), dtype=np.complex128)
    cdef int k, n2 = d * d
    with nogil:
        for k in range(n):
            _apply_kraus(m, d, &ks[0, 0, 0], &out[k, 0, 0],
                         &scratch[0, 0], &out[k + 1, 0, 0])
    return out


def iterate_until(kraus, rho0, double tol, int max_iter):
    """Iterate until the step-to-step trace-norm residual drops below tol.

    Returns (state, iterations, last residual, converged).
    """
    cdef cnp.ndarray[zdouble, ndim=3, mode="c"] ks = np.ascontiguousarray(
        kraus, dtype=np.complex128)
    cdef int m = ks.shape[0], d = ks.shape[1]
    cdef cnp.ndarray[zdouble, ndim=2, mode="c"] rho = np.array(
        rho0, dtype=np.complex128, order="C")
    cdef cnp.ndarray[zdouble, ndim=2, mode="c"] nxt = np.empty(
        (d, d), dtype=np.complex128)
    cdef cnp.ndarray[zdouble, ndim=2, mode="c"] scratch = np.empty(
        (d, d), dtype=np.complex128)
    cdef cnp.ndarray[zdouble, ndim=2, mode="c"] diff = np.empty(
        (d, d), dtype=np.complex128)
    cdef int lwork = 2 * d if d > 1 else 2
    cdef cnp.ndarray[zdouble, ndim=1] work = np.empty(lwork, dtype=np.complex128)
    cdef cnp.ndarray[double, ndim=1] rwork = np.empty(max(1, 3 * d - 2))
    cdef cnp.ndarray[double, ndim=1] w = np.empty(d)
    cdef double residual = -1.0
    cdef int k = 0, i, n2 = d * d
    cdef bint converged = False, failed = False
    with nogil:
        for k in range(1, max_iter + 1):
            _apply_kraus(m, d, &ks[0, 0, 0], &rho[0, 0],
                         &scratch[0, 0], &nxt[0, 0])
            for i in range(n2):
                (&diff[0, 0])[i] = (&nxt[0, 0])[i] - (&rho[0, 0])[i]
                (&rho[0, 0])[i] = (&nxt[0, 0])[i]
            residual = _trace_norm_herm(d, &diff[0, 0], &work[0], lwork,
                                        &rwork[0], &w[0])
            if residual < 0:
                failed = True
                break
            if residual <= tol:
                converged = True
                break
    if failed:
        raise np.linalg.LinAlgError("zheev failed to converge")
    if not converged:
        k = max_iter
    return rho, k, residual if residual >= 0 else np.inf, converged


def iterate_to_target(kraus, rho0, target, double tol, int max_iter):
    """Iterate until the trace-norm distance to ``target`` drops below tol.

    Returns (state, iterations, last distance, converged); zero iterations
    when the initial state is already within tolerance.
    """
    cdef cnp.ndarray[zdouble, ndim=3, mode="c"] ks = np.ascontiguousarray(
        kraus, dtype=np.complex128)
    cdef int m = ks.shape[0], d = ks.shape[1]
    cdef cnp.ndarray[zdouble, ndim=2, mode="c"] rho = np.array(
        rho0, dtype=np.complex128, order="C")
    cdef cnp.ndarray[zdouble, ndim=2, mode="c"] tgt = np.ascontiguousarray(
        target, dtype=np.complex128)
    cdef cnp.ndarray[zdouble, ndim=2, mode="c"] nxt = np.empty(
        (d, d), dtype=np.complex128)
    cdef cnp.ndarray[zdouble, ndim=2, mode="c"] scratch = np.empty(
        (d, d), dtype=np.complex128)
    cdef cnp.ndarray[zdouble, ndim=2, mode="c"] diff = np.empty(
        (d, d), dtype=np.complex128)
    cdef int lwork = 2 * d if d > 1 else 2
    cdef cnp.ndarray[zdouble, ndim=1] work = np.empty(lwork, dtype=np.complex128)
    cdef cnp.ndarray[double, ndim=1] rwork = np.empty(max(1, 3 * d - 2))
    cdef cnp.ndarray[double, ndim=1] w = np.empty(d)
    cdef double distance
    cdef int k = 0, i, n2 = d * d
    cdef bint converged = False, failed = False

    for i in range(n2):
        (&diff[0, 0])[i] = (&rho[0, 0])[i] - (&tgt[0, 0])[i]
    distance = hermitian_trace_norm(diff)
    if distance <= tol:
        return rho, 0, distance, True
    with nogil:
        for k in range(1, max_iter + 1):
            _apply_kraus(m, d, &ks[0, 0, 0], &rho[0, 0],
                         &scratch[0, 0], &nxt[0, 0])
            for i in range(n2):
                (&rho[0, 0])[i] = (&nxt[0, 0])[i]
                (&diff[0, 0])[i] = (&nxt[0, 0])[i] - (&tgt[0, 0])[i]
            distance = _trace_norm_herm(d, &diff[0, 0], &work[0], lwork,
                                        &rwork[0], &w[0])
            if distance < 0:
                failed = True
                break
            if distance <= tol:
                converged = True
                break
    if failed:
        raise np.linalg.LinAlgError("zheev failed to converge")
    if not converged:
        k = max_iter
    return rho, k, distance, converged

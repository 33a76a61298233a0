"""Convergence analysis of collision dynamics.

A channel is *relaxing* when iterating it drives every input to one fixed
point; spectrally, eigenvalue 1 of its superoperator is simple and every
other eigenvalue lies strictly inside the unit disk.  This module decides
that verdict, extracts fixed points by eigendecomposition and by brute
iteration (two deliberately independent routes), checks the
convex-mixture closure property, quantifies how inhomogeneous collision
sequences erase initial-state information, and provides the invariance
and entropy-ratio diagnostics used by the scenario runners.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmath
from ._kernels import hermitian_trace_norm, iterate_until
from .collision import Superoperator, apply_sequence, unvectorize
from .errors import (
    ConvergenceError,
    DegenerateFixedPointError,
    FixedPointNumericalError,
    ShapeError,
    UndefinedRatioError,
)
from .tolerances import (
    DEFAULT_ITERATE_TOL,
    DEFAULT_MAX_ITER,
    DEGENERACY_ATOL,
    EIGENSPACE_GROUP_ATOL,
    ENTROPY_FLOOR,
    FACTORIZED_WEIGHT_ATOL,
    FIXED_POINT_PSD_ATOL,
    FIXED_POINT_RESIDUAL_ATOL,
    PERIPHERAL_ATOL,
)


@dataclass(frozen=True)
class ConvergenceReport:
    """Verdict and diagnostics of a spectral relaxedness analysis.

    ``spectral_gap`` is 1 minus the second-largest eigenvalue modulus;
    ``peripheral_count`` counts eigenvalues within the peripheral tolerance
    of the unit circle.  ``fixed_point`` is present whenever the verdict is
    relaxing, in which case ``residual`` bounds its self-consistency defect
    and ``peripheral_count`` is 1.
    """

    relaxing: bool
    reason: str
    fixed_point: np.ndarray | None
    spectral_gap: float
    peripheral_count: int
    iterations_used: int
    residual: float


def _extract_fixed_point(sop, vals, vecs):
    """Fixed point from a precomputed superoperator eigendecomposition.

    Selects the eigenvalue closest to 1 (erroring if that cluster is
    degenerate), Hermitian-symmetrizes its eigenvector, trace-normalizes,
    and validates positivity and the self-consistency residual.  Positivity
    failures are surfaced, never repaired.
    """
    near_one = np.flatnonzero(np.abs(vals - 1.0) <= DEGENERACY_ATOL)
    if near_one.size > 1:
        raise DegenerateFixedPointError(
            f"{near_one.size} eigenvalues lie within {DEGENERACY_ATOL:.0e} "
            "of 1; the fixed point is not unique"
        )
    if near_one.size == 0:
        raise FixedPointNumericalError(
            "no eigenvalue within tolerance of 1; the map does not preserve "
            "the trace"
        )
    candidate = unvectorize(vecs[:, near_one[0]], sop.dim)
    candidate = (candidate + candidate.conj().T) / 2.0
    trace = candidate.trace().real
    if abs(trace) < 1e-12:
        raise FixedPointNumericalError(
            "fixed-point eigenvector is traceless; cannot normalize"
        )
    rho = candidate / trace
    min_eig = float(np.linalg.eigvalsh(rho).min())
    if min_eig < -FIXED_POINT_PSD_ATOL:
        raise FixedPointNumericalError(
            f"symmetrized fixed point has eigenvalue {min_eig:.3e} below "
            f"-{FIXED_POINT_PSD_ATOL:.0e}"
        )
    residual = hermitian_trace_norm(sop.apply(rho) - rho)
    if residual > FIXED_POINT_RESIDUAL_ATOL:
        raise FixedPointNumericalError(
            f"fixed-point residual {residual:.3e} exceeds "
            f"{FIXED_POINT_RESIDUAL_ATOL:.0e}"
        )
    return rho, float(residual)


def spectral_fixed_point(sop):
    """The unique stationary state of a channel, by eigendecomposition."""
    vals, vecs = np.linalg.eig(sop.matrix)
    rho, _ = _extract_fixed_point(sop, vals, vecs)
    return rho


def is_relaxing(sop, tol=PERIPHERAL_ATOL):
    """Spectral relaxedness verdict; never raises, the report explains.

    Relaxing iff exactly one eigenvalue has modulus within ``tol`` of the
    unit circle (that one is the trace-preservation eigenvalue 1).
    """
    vals, vecs = np.linalg.eig(sop.matrix)
    mods = np.sort(np.abs(vals))[::-1]
    peripheral = int(np.count_nonzero(mods > 1.0 - tol))
    gap = float(1.0 - mods[1]) if mods.size > 1 else 1.0
    if peripheral == 0:
        return ConvergenceReport(
            relaxing=False,
            reason="no eigenvalue reaches the unit circle; the matrix is "
                   "not a trace-preserving channel",
            fixed_point=None, spectral_gap=gap, peripheral_count=0,
            iterations_used=0, residual=float("inf"),
        )
    if peripheral > 1:
        return ConvergenceReport(
            relaxing=False,
            reason=f"{peripheral} eigenvalues within {tol:.0e} of the unit "
                   "circle; iterates do not forget the initial state",
            fixed_point=None, spectral_gap=gap, peripheral_count=peripheral,
            iterations_used=0, residual=float("inf"),
        )
    try:
        rho, residual = _extract_fixed_point(sop, vals, vecs)
    except (DegenerateFixedPointError, FixedPointNumericalError) as exc:
        return ConvergenceReport(
            relaxing=False,
            reason=f"unique peripheral eigenvalue but fixed-point "
                   f"extraction failed: {exc}",
            fixed_point=None, spectral_gap=gap, peripheral_count=1,
            iterations_used=0, residual=float("inf"),
        )
    return ConvergenceReport(
        relaxing=True,
        reason=f"unique peripheral eigenvalue; spectral gap {gap:.3e}",
        fixed_point=rho, spectral_gap=gap, peripheral_count=1,
        iterations_used=0, residual=residual,
    )


def iterative_fixed_point(channel, rho0, tol=DEFAULT_ITERATE_TOL,
                          max_iter=DEFAULT_MAX_ITER):
    """Fixed point by brute iteration: collide until the state stops moving.

    Returns ``(state, collisions used)`` once the step-to-step trace-norm
    residual drops to ``tol``.  Exceeding ``max_iter`` raises
    :class:`ConvergenceError` carrying the last residual — that outcome
    means slow mixing or non-relaxing dynamics, which :func:`is_relaxing`
    distinguishes.
    """
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (channel.system_dim, channel.system_dim):
        raise ShapeError(
            f"state has shape {rho0.shape}, channel expects "
            f"({channel.system_dim}, {channel.system_dim})"
        )
    rho, used, residual, converged = iterate_until(
        channel._kraus, rho0, float(tol), int(max_iter)
    )
    if not converged:
        raise ConvergenceError(
            f"no fixed point within {max_iter} collisions (last residual "
            f"{residual:.3e}); slow mixing or non-relaxing dynamics — "
            "consult is_relaxing",
            residual=residual, iterations=used,
        )
    return rho, used


def factorized_eigenvector_count(h_total, dims, phi):
    """How many joint eigenvectors factorize with the ancilla in ``phi``.

    The ancilla is the trailing factor of ``dims``.  For each eigenspace of
    ``h_total`` this counts the dimension of the subspace of vectors of the
    form ``|E> (x) |phi>``, and returns the total across eigenspaces.  A
    count of 1 means the only such eigenvector is the homogeneous product,
    which is the precondition for the bath state to spread through the
    network; disconnected networks give counts above 1.
    """
    dims = [int(d) for d in dims]
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    norm = np.linalg.norm(phi)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"phi must be normalized; |phi| = {norm:.6g}")
    if dims[-1] != phi.shape[0]:
        raise ShapeError(
            f"ancilla factor has dimension {dims[-1]}, phi has {phi.shape[0]}"
        )
    total = int(np.prod(dims))
    h_total = qmath._as_square(h_total)
    if h_total.shape[0] != total:
        raise ShapeError(
            f"operator dim {h_total.shape[0]} does not match factors {dims}"
        )
    rest = total // phi.shape[0]
    vals, vecs = qmath.hermitian_eig(h_total)

    count = 0
    start = 0
    for i in range(1, len(vals) + 1):
        if i < len(vals) and vals[i] - vals[i - 1] <= EIGENSPACE_GROUP_ATOL:
            continue
        block = vecs[:, start:i]
        # <phi| applied to the ancilla slot of each eigenspace column:
        # singular value 1 of the result marks an |E> (x) |phi| direction.
        overlap = block.reshape(rest, phi.shape[0], i - start)
        w = np.einsum("aps,p->as", overlap, phi.conj())
        singulars = np.linalg.svd(w, compute_uv=False)
        count += int(np.count_nonzero(
            singulars ** 2 >= 1.0 - FACTORIZED_WEIGHT_ATOL
        ))
        start = i
    return count


def haag_mixture_check(sop_relaxing, sop_other, p):
    """Analyze the convex mixture ``p * relaxing + (1-p) * other``.

    Any mixture with ``p > 0`` of a relaxing channel with another channel
    must itself be relaxing; a non-relaxing verdict here is therefore
    flagged as a numerical red flag, not returned silently.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"mixture weight must be in (0, 1], got {p}")
    if sop_relaxing.dim != sop_other.dim:
        raise ShapeError(
            f"superoperator dims differ: {sop_relaxing.dim} vs {sop_other.dim}"
        )
    mixture = Superoperator(
        dim=sop_relaxing.dim,
        matrix=p * sop_relaxing.matrix + (1.0 - p) * sop_other.matrix,
    )
    report = is_relaxing(mixture)
    if report.relaxing:
        return report
    return ConvergenceReport(
        relaxing=False,
        reason="theorem violation: mixture containing a relaxing channel "
               f"with weight {p} reported non-relaxing ({report.reason})",
        fixed_point=report.fixed_point,
        spectral_gap=report.spectral_gap,
        peripheral_count=report.peripheral_count,
        iterations_used=report.iterations_used,
        residual=report.residual,
    )


def forgetting_metric(channels, rho1, rho2):
    """Trace-norm distance between two trajectories under shared collisions.

    Returns ``f_n`` for ``n = 0 .. len(channels)``, where ``f_n`` is the
    distance after the first ``n`` channels of the sequence.  The series is
    non-negative and non-increasing regardless of the sequence; it decays
    to zero whenever each collision keeps enough weight on a common
    relaxing preparation.
    """
    if len(channels) == 0:
        raise ValueError("forgetting metric needs a non-empty sequence")
    traj1 = apply_sequence(channels, rho1)
    traj2 = apply_sequence(channels, rho2)
    return [
        float(hermitian_trace_norm(a - b)) for a, b in zip(traj1, traj2)
    ]


def check_invariance(joint_unitary, rho_star, omega, tol=1e-9):
    """Does the joint unitary commute with ``rho_star (x) omega``?

    Returns ``(max-entry commutator norm, verdict)``.  Commutation implies
    the collision leaves ``rho_star`` exactly stationary.
    """
    unitary = np.asarray(joint_unitary, dtype=complex)
    product = qmath.tensor([
        np.asarray(rho_star, dtype=complex), np.asarray(omega, dtype=complex)
    ])
    if unitary.shape != product.shape:
        raise ShapeError(
            f"joint unitary {unitary.shape} does not match system+ancilla "
            f"product {product.shape}"
        )
    norm = float(np.abs(unitary @ product - product @ unitary).max())
    return norm, norm <= tol


def entropy_ratio(rho_star, omega):
    """Output/input entropy ratio S(rho_star) / S(omega).

    Diverges as the bath state approaches purity, so a bath entropy below
    the floor raises :class:`UndefinedRatioError` (carrying both
    entropies) instead of returning an unstable quotient.
    """
    s_system = qmath.von_neumann_entropy(rho_star)
    s_bath = qmath.von_neumann_entropy(omega)
    if s_bath < ENTROPY_FLOOR:
        raise UndefinedRatioError(
            f"bath entropy {s_bath:.3e} is below the floor "
            f"{ENTROPY_FLOOR:.0e}; the ratio is undefined",
            system_entropy=s_system, bath_entropy=s_bath,
        )
    return s_system / s_bath

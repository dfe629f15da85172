"""Symmetric-iteration eigenvalue extraction for PSD matrices.

Two extremes are needed: the top singular value of a rectangular factor
(power iteration on the normal matrix, never formed), and the smallest
eigenvalue of an assembled PSD Gram (inverse iteration through a shifted
Cholesky factorization).  Both report a residual and raise ConvergenceError
with their last iterate when the tolerance cannot be met.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import linalg

from .errors import ConvergenceError


def sigma_max_factor(A: np.ndarray, tol: float = 1e-9, maxit: int = 5000) -> float:
    """Largest singular value of A by power iteration on A^T A.

    Deterministic start; residual measured on the normal matrix relative to
    the current eigenvalue estimate.
    """
    n = A.shape[1]
    if A.size == 0:
        return 0.0
    v = np.full(n, 1.0 / np.sqrt(n))
    lam_prev = 0.0
    inc_prev = 0.0
    settled = 0
    for _ in range(maxit):
        w = A.T @ (A @ v)
        norm_w = float(np.linalg.norm(w))
        if norm_w == 0.0:
            return 0.0
        w /= norm_w
        lam = float(w @ (A.T @ (A @ w)))
        resid = float(np.linalg.norm(A.T @ (A @ w) - lam * w))
        if resid <= tol * max(lam, 1e-30):
            return float(np.sqrt(max(lam, 0.0)))
        # clustered top eigenvalues never yield a small residual; the Rayleigh
        # quotient still increases monotonically, so accept once the geometric
        # remainder of its increments is inside tolerance
        inc = lam - lam_prev
        est = math.inf
        if inc <= 0.0:
            est = 0.0
        elif 0.0 < inc < inc_prev:
            rate = inc / inc_prev
            est = inc * rate / (1.0 - rate)
        if est <= tol * max(lam, 1e-30):
            settled += 1
            if settled >= 3:
                return float(np.sqrt(max(lam, 0.0)))
        else:
            settled = 0
        inc_prev = inc
        lam_prev = lam
        v = w
    raise ConvergenceError(
        f"power iteration stalled after {maxit} iterations",
        last_iterate=v,
        residual=resid,
    )


def lambda_min_psd(G: np.ndarray, tol: float = 1e-9, maxit: int = 2000) -> float:
    """Smallest eigenvalue of a symmetric PSD matrix by inverse iteration.

    The matrix is shifted by a relative jitter before Cholesky so an exactly
    singular Gram still factors; the Rayleigh quotient of the unshifted matrix
    is returned, floored at zero.
    """
    n = G.shape[0]
    if n == 0:
        return 0.0
    scale = float(np.linalg.norm(G, ord="fro")) / np.sqrt(n)
    if scale == 0.0:
        return 0.0
    shift = 1e-12 * scale
    for attempt in range(3):
        try:
            cho = linalg.cho_factor(
                G + shift * np.eye(n), lower=True, check_finite=False
            )
            break
        except linalg.LinAlgError:
            shift *= 100.0
            if attempt == 2:
                raise ConvergenceError(
                    "Cholesky factorization failed for the shifted Gram",
                    residual=shift,
                )
    v = np.full(n, 1.0 / np.sqrt(n))
    lam_prev = np.inf
    lam = 0.0
    resid = np.inf
    for _ in range(maxit):
        w = linalg.cho_solve(cho, v, check_finite=False)
        w /= float(np.linalg.norm(w))
        gw = G @ w
        lam = float(w @ gw)
        resid = float(np.linalg.norm(gw - lam * w))
        if resid <= tol * scale and abs(lam - lam_prev) <= tol * scale:
            return max(lam, 0.0)
        lam_prev = lam
        v = w
    raise ConvergenceError(
        f"inverse iteration stalled after {maxit} iterations",
        last_iterate=v,
        residual=resid,
    )

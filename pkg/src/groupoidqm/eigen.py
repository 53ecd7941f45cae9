"""Cyclic Jacobi diagonalization for small dense Hermitian matrices.

Every positive-semidefiniteness verdict in this package is decided by this
solver rather than an external eigensolver.  The matrices involved are tiny
(at most n² x n² with n the number of outcomes), where cyclic Jacobi is
simple, accurate and converges quadratically.

Each rotation zeroes one off-diagonal pair: the pivot A[p, q] = r·e^{iφ} is
first made real by the phase diag(1, e^{-iφ}) on the (p, q) plane, then
annihilated by the classical real rotation with
t = sign(τ)/(|τ| + sqrt(1+τ²)), τ = (A_qq - A_pp)/(2|A_pq|).
"""

from __future__ import annotations

import math

import numpy as np


def hermitian_eigh(a, tol: float = 1e-14, max_sweeps: int = 60):
    """Eigenvalues and eigenvectors of a Hermitian matrix by cyclic Jacobi.

    Returns (w, v): eigenvalues ascending as a float array and a unitary matrix
    whose columns are the matching eigenvectors.  The input is symmetrized as
    (A + A†)/2; callers that care about Hermiticity defects must check them
    separately.
    """
    A = np.array(a, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    A = (A + A.conj().T) / 2
    V = np.eye(n, dtype=np.complex128)
    if n == 1:
        return np.array([A[0, 0].real]), V

    scale = max(float(np.max(np.abs(A))), 1e-300)
    thresh = tol * scale
    for _ in range(max_sweeps):
        off = _offdiag_norm(A)
        if off <= thresh * n:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                r = abs(apq)
                if r <= thresh / n:
                    continue
                phase = apq / r
                tau = (A[q, q].real - A[p, p].real) / (2 * r)
                if tau >= 0:
                    t = 1.0 / (tau + math.hypot(1.0, tau))
                else:
                    t = -1.0 / (-tau + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # Unitary on the (p, q) plane: columns (c, -s·e^{-iφ}) and (s, c·e^{-iφ}).
                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = c * col_p - s * np.conj(phase) * col_q
                A[:, q] = s * phase * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :].copy()
                A[p, :] = c * row_p - s * phase * row_q
                A[q, :] = s * np.conj(phase) * row_p + c * row_q
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                col_p = V[:, p].copy()
                col_q = V[:, q].copy()
                V[:, p] = c * col_p - s * np.conj(phase) * col_q
                V[:, q] = s * phase * col_p + c * col_q
    else:
        raise ArithmeticError("Jacobi sweep limit reached without convergence")

    w = np.real(np.diag(A))
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def _offdiag_norm(A) -> float:
    off = A - np.diag(np.diag(A))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def min_eigenvalue(a) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    w, _ = hermitian_eigh(a)
    return float(w[0])


def hermitian_defect(a) -> float:
    """max |A - A†| entrywise; zero on exactly Hermitian input."""
    A = np.asarray(a, dtype=np.complex128)
    return float(np.max(np.abs(A - A.conj().T))) if A.size else 0.0

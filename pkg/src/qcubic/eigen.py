"""Symmetric eigensolvers.

Two routes are kept on purpose:

* ``jacobi_eigh`` is a self-contained cyclic Jacobi rotation solver.  It is
  the reference implementation: deterministic, dependency-free, and easy to
  audit.  It is the solver used by the single-matrix report APIs.
* ``eigvalsh_desc`` / ``eigh_desc`` are thin wrappers over LAPACK (via
  numpy) used on large batches, where a pure-python sweep loop would blow
  the runtime budget.  The test suite pins the two routes against each
  other, so the fast path never drifts from the reference.
"""

from __future__ import annotations

import numpy as np

# Convergence threshold on the off-diagonal Frobenius norm.
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 40


def _offdiag_norm(a: np.ndarray) -> float:
    mask = ~np.eye(a.shape[0], dtype=bool)
    return float(np.sqrt(np.sum(a[mask] ** 2)))


def jacobi_eigh(mat, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(values, vectors)`` with eigenvalues sorted in descending
    order and eigenvectors as the matching columns of an orthogonal matrix.
    Sweeps stop once the off-diagonal Frobenius norm drops below ``tol``.

    Raises ValueError on non-square or non-symmetric input.
    """
    a = np.array(mat, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("jacobi_eigh expects a square matrix")
    if not np.allclose(a, a.T, atol=1e-10 * max(1.0, float(np.abs(a).max()))):
        raise ValueError("jacobi_eigh expects a symmetric matrix")
    a = (a + a.T) / 2.0
    n = a.shape[0]
    v = np.eye(n)

    for _ in range(max_sweeps):
        if _offdiag_norm(a) < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                # Classical rotation: pick the smaller-angle root.
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c

                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq

                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq

    vals = np.diag(a).copy()
    order = np.argsort(-vals, kind="stable")
    return vals[order], v[:, order]


def eigvalsh_desc(mats: np.ndarray) -> np.ndarray:
    """Descending eigenvalues of a symmetric matrix or a stack of them.

    LAPACK-backed fast path; agreement with :func:`jacobi_eigh` is enforced
    by the test suite.
    """
    return np.linalg.eigvalsh(mats)[..., ::-1]


def eigh_desc(mats: np.ndarray):
    """Descending eigendecomposition (values, column vectors) via LAPACK."""
    vals, vecs = np.linalg.eigh(mats)
    return vals[..., ::-1], vecs[..., ::-1]

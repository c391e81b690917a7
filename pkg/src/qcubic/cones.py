"""Eigenvalue-pinch cones on symmetric 12x12 matrices and their duals.

For an aperture lam >= 1:

* K(lam): positive definite matrices whose eigenvalue ratio is at most
  lam^2 (equivalently, eigenvalues fit in some band [C/lam, C lam]).
* K*(lam): the dual cone under the trace inner product.  Membership has a
  closed-form test: p >= lam^2 q, where p is the sum of the positive
  eigenvalues and q the absolute sum of the negative ones (the minimizing
  test matrix aligns eigenvectors and puts the extreme band values against
  the opposite-sign eigenvalues).
* L(lam): matrices orthogonal to some member of K(lam); equivalently the
  complement of K* and -K*.  Differences of Hessians of w land here.

The support function x(z) measures, for a traceless matrix with
coordinates z, the least multiple of the normalized identity
I/sqrt(12) whose addition reaches K*.  Its graph is the boundary of K*
in the (z, s) coordinates of symspace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import symspace
from .eigen import eigvalsh_desc

SUPPORT_TOL = 1e-11
_SQRT_N = np.sqrt(12.0)


@dataclass(frozen=True)
class ConeParams:
    """Aperture parameter for the cone family (n = 12 throughout)."""

    lam: float

    def __post_init__(self):
        if not np.isfinite(self.lam) or self.lam < 1.0:
            raise ValueError("ConeParams: aperture must be >= 1, got %r" % self.lam)


def _pos_neg_sums(vals: np.ndarray):
    p = np.sum(np.where(vals > 0, vals, 0.0), axis=-1)
    q = np.sum(np.where(vals < 0, -vals, 0.0), axis=-1)
    return p, q


def in_K(mat: np.ndarray, cone: ConeParams) -> bool:
    """Positive definite with eigenvalue ratio at most lam^2."""
    vals = eigvalsh_desc(np.asarray(mat, dtype=float))
    lo = vals[..., -1]
    hi = vals[..., 0]
    return bool(np.all((lo > 0) & (hi <= cone.lam**2 * lo)))


def in_K_star(mat: np.ndarray, cone: ConeParams) -> bool:
    """Dual-cone membership by the p/q eigenvalue test (boundary included)."""
    vals = eigvalsh_desc(np.asarray(mat, dtype=float))
    p, q = _pos_neg_sums(vals)
    return bool(np.all(p >= cone.lam**2 * q))


def in_L(mat: np.ndarray, cone: ConeParams) -> bool:
    """Membership in L(lam): neither mat nor -mat lies in the dual cone."""
    mat = np.asarray(mat, dtype=float)
    vals = eigvalsh_desc(mat)
    p, q = _pos_neg_sums(vals)
    lam2 = cone.lam**2
    return bool(np.all((p < lam2 * q) & (q < lam2 * p)))


def in_L_ratio_batch(vals: np.ndarray, cone: ConeParams) -> np.ndarray:
    """Vectorized in_L from precomputed eigenvalue rows."""
    p, q = _pos_neg_sums(vals)
    lam2 = cone.lam**2
    return (p < lam2 * q) & (q < lam2 * p)


def _support_from_eigs(mu: np.ndarray, lam: float,
                       tol: float = SUPPORT_TOL) -> np.ndarray:
    """Bisection for the least c with sum((mu + c/sqrt(12))_+) >= lam^2 *
    sum((mu + c/sqrt(12))_-), vectorized over leading axes of mu (rows
    ascending, as eigvalsh returns them; trace sum(mu) expected ~0).

    The predicate is monotone in c because shifting raises p and lowers q.
    With S(c) = sum(mu) + sqrt(12) c and T(c) = sum|mu + c/sqrt(12)|,
    membership is (1+lam^2) S >= (lam^2-1) T -- one absolute-value pass per
    probe.  c = sqrt(12) max(-mu_min, 0) makes the shifted row nonnegative
    and is always a member, so it brackets from above; for traceless rows
    x >= 0 brackets from below (the -tol start and the doubling loop cover
    inputs that stray off traceless).
    """
    lam2 = lam * lam
    mu_sum = np.sum(mu, axis=-1)

    def member(c):
        t_abs = np.sum(np.abs(mu + c[..., None] / _SQRT_N), axis=-1)
        return (1 + lam2) * (mu_sum + _SQRT_N * c) >= (lam2 - 1) * t_abs

    lo = np.full(mu.shape[:-1], -tol)
    hi = _SQRT_N * np.maximum(-mu[..., 0], 0.0) + tol
    for _ in range(80):
        bad_hi = ~member(hi)
        bad_lo = member(lo)
        if not (np.any(bad_hi) or np.any(bad_lo)):
            break
        hi[bad_hi] = hi[bad_hi] * 2.0 + tol
        lo[bad_lo] *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        good = member(mid)
        hi = np.where(good, mid, hi)
        lo = np.where(good, lo, mid)
        if np.max(hi - lo) < tol:
            break
    return 0.5 * (lo + hi)


def support_x(z: np.ndarray, cone: ConeParams, tol: float = SUPPORT_TOL):
    """Support function x(z) for traceless coordinates z (single or stack).

    x(z) = inf{ c : embed(z) + c I/sqrt(12) lies in K*(lam) }.  Convex,
    positively homogeneous, x(0) = 0.  Computed by bisection to ``tol``
    on the monotone membership predicate, with eigenvalues of embed(z)
    precomputed once (shifting by c only shifts the spectrum).
    """
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    zz = z[None, :] if single else z
    mats = symspace.embed_traceless(zz)
    mu = np.linalg.eigvalsh(mats)
    norms = np.linalg.norm(zz, axis=-1)
    out = np.zeros(zz.shape[0])
    nz = norms > 0
    if np.any(nz):
        out[nz] = _support_from_eigs(mu[nz], cone.lam, tol)
    return float(out[0]) if single else out


def support_x_from_matrices(mats: np.ndarray, cone: ConeParams,
                            tol: float = SUPPORT_TOL) -> np.ndarray:
    """support_x applied to traceless symmetric matrices directly (stack).

    Callers that already hold the matrices skip the coordinate round trip;
    the trace part is NOT removed here and must be zero (or accounted for
    by the caller adding s separately).
    """
    mats = np.asarray(mats, dtype=float)
    mu = np.linalg.eigvalsh(mats)
    norms = np.linalg.norm(mats, axis=(-2, -1))
    out = np.zeros(mats.shape[0])
    nz = norms > 0
    if np.any(nz):
        out[nz] = _support_from_eigs(mu[nz], cone.lam, tol)
    return out


@dataclass
class ConeConditionReport:
    lam: float
    pairs_checked: int
    violations: list

    @property
    def passed(self) -> bool:
        return not self.violations


def cone_condition(mats: np.ndarray, cone: ConeParams,
                   chunk: int = 200000) -> ConeConditionReport:
    """All pairwise differences of a matrix family must lie in L(lam).

    mats: (count, 12, 12) symmetric.  Reports every violating index pair.
    """
    mats = np.asarray(mats, dtype=float)
    count = mats.shape[0]
    ii, jj = np.triu_indices(count, k=1)
    violations = []
    for start in range(0, ii.size, chunk):
        sl = slice(start, min(start + chunk, ii.size))
        diffs = mats[ii[sl]] - mats[jj[sl]]
        vals = np.linalg.eigvalsh(diffs)
        ok = in_L_ratio_batch(vals, cone)
        if not np.all(ok):
            for k in np.nonzero(~ok)[0]:
                violations.append((int(ii[sl][k]), int(jj[sl][k])))
    return ConeConditionReport(lam=cone.lam, pairs_checked=int(ii.size),
                               violations=violations)

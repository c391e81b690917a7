"""The cubic form on R^12 and the spectra of its direction matrices.

Points of R^12 are split into three quaternion blocks X, Y, Z.  The cubic
form is the real part of the quaternion product,

    P(X, Y, Z) = Re(qX * qY * qZ),

and every direction d of norm sqrt(3) carries a symmetric 12x12 matrix
(the polarized second derivative of P along d) whose spectrum has a
closed form.  This module builds those matrices, computes the closed-form
spectra, and verifies the bounds that the rest of the package relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eigen import eigh_desc, eigvalsh_desc, jacobi_eigh
from .quaternions import matrix_M, qmul, qnorm

DIRECTION_NORM_SQ = 3.0
NORM_TOL = 1e-12


def eval_P(v) -> np.ndarray:
    """The cubic form Re(qX qY qZ); v has shape (..., 12)."""
    v = np.asarray(v, dtype=float)
    return qmul(qmul(v[..., 0:4], v[..., 4:8]), v[..., 8:12])[..., 0]


def q_matrix(d) -> np.ndarray:
    """Symmetric matrix of the quadratic form 2*Q_d, for any d in R^12.

    Q_d(v) is the derivative of P at v in the direction d, so this matrix
    is linear in d and equals the Hessian of P at the point d.  No norm
    constraint: the norm-sqrt(3) contract lives in DirectionD.

    Blocks (a, b, c = quaternion blocks of d):

        [ 0      M_c    M_b^T ]
        [ M_c^T  0      M_a   ]
        [ M_b    M_a^T  0     ]
    """
    d = np.asarray(d, dtype=float)
    ma = matrix_M(d[..., 0:4])
    mb = matrix_M(d[..., 4:8])
    mc = matrix_M(d[..., 8:12])
    mat = np.zeros(d.shape[:-1] + (12, 12))
    mbt = np.swapaxes(mb, -1, -2)
    mat[..., 0:4, 4:8] = mc
    mat[..., 4:8, 0:4] = np.swapaxes(mc, -1, -2)
    mat[..., 0:4, 8:12] = mbt
    mat[..., 8:12, 0:4] = mb
    mat[..., 4:8, 8:12] = ma
    mat[..., 8:12, 4:8] = np.swapaxes(ma, -1, -2)
    return mat


def grad_P(v) -> np.ndarray:
    """Gradient of the cubic form: one half of q_matrix(v) @ v."""
    v = np.asarray(v, dtype=float)
    return 0.5 * np.einsum("...ij,...j->...i", q_matrix(v), v)


@dataclass(frozen=True)
class DirectionD:
    """A direction on the sphere of radius sqrt(3) with its two invariants.

    m = |a||b||c| (product of block norms) and n = P(a, b, c); both lie in
    [-1, 1] with |n| <= m.
    """

    vec: np.ndarray
    m: float = field(init=False)
    n: float = field(init=False)

    def __post_init__(self):
        v = np.asarray(self.vec, dtype=float).reshape(12)
        if abs(float(v @ v) - DIRECTION_NORM_SQ) > NORM_TOL * 10:
            raise ValueError(
                "DirectionD: squared norm must be 3 (got %r); "
                "rescale explicitly with direction_from" % float(v @ v)
            )
        object.__setattr__(self, "vec", v)
        a, b, c = v[0:4], v[4:8], v[8:12]
        object.__setattr__(self, "m", float(qnorm(a) * qnorm(b) * qnorm(c)))
        object.__setattr__(self, "n", float(eval_P(v)))

    @property
    def blocks(self):
        return self.vec[0:4], self.vec[4:8], self.vec[8:12]


def direction_from(v) -> DirectionD:
    """Explicitly rescale an arbitrary nonzero 12-vector to norm sqrt(3)."""
    v = np.asarray(v, dtype=float).reshape(12)
    nrm = float(np.linalg.norm(v))
    if nrm < 1e-12:
        raise ValueError("direction_from: zero vector")
    return DirectionD(v * (np.sqrt(3.0) / nrm))


def matrix_2Qd(d: DirectionD) -> np.ndarray:
    """The symmetric 12x12 matrix of 2*Q_d for a norm-sqrt(3) direction."""
    return q_matrix(d.vec)


def char_poly_CHd(d: DirectionD) -> np.ndarray:
    """Coefficients (degree 12, highest first) of the closed-form
    characteristic polynomial

        (x^3 - 3x + 2m)(x^3 - 3x - 2m)(x^3 - 3x + 2n)^2
    """
    base = np.array([1.0, 0.0, -3.0])
    f_plus = np.append(base, 2.0 * d.m)
    f_minus = np.append(base, -2.0 * d.m)
    f_n = np.append(base, 2.0 * d.n)
    poly = np.polymul(np.polymul(f_plus, f_minus), np.polymul(f_n, f_n))
    return poly


def spectrum_closed_form(m, n) -> np.ndarray:
    """The twelve eigenvalues by the trigonometric root formulas.

    With m = cos(alpha), n = cos(beta):
    six simple values 2 cos(alpha/3 + pi k/3), k = 0..5, and three double
    values 2 cos(beta/3 + pi (2l+1)/3), l = 0, 1, 2.  Descending order.

    The trig is done in extended precision: arccos near +-1 amplifies
    rounding in m by 1/sqrt(1-m^2), which costs ~sqrt(eps) accuracy near
    the degenerate strata if done in float64.  Pass longdouble m, n (see
    invariants_mn) to get the full benefit.
    """
    ld = np.longdouble
    m = np.clip(ld(m), ld(-1), ld(1))
    n = np.clip(ld(n), ld(-1), ld(1))
    alpha = np.arccos(m)
    beta = np.arccos(n)
    pi = ld(np.pi)
    singles = 2.0 * np.cos(alpha / 3.0 + pi * np.arange(6, dtype=ld) / 3.0)
    doubles = 2.0 * np.cos(beta / 3.0 + pi * (2 * np.arange(3, dtype=ld) + 1) / 3.0)
    vals = np.concatenate([singles, np.repeat(doubles, 2)])
    return np.sort(vals)[::-1].astype(float)


def invariants_mn(dirs: np.ndarray):
    """(m, n, t) for direction rows, computed in longdouble.

    The stored floats never sit exactly on the norm-sqrt(3) sphere, and the
    closed-form spectrum amplifies that defect like a square root near the
    degenerate strata (double roots split).  Since the direction matrix is
    linear in d and m, n are cubic, the exact fix is to rescale onto the
    sphere: with t = (|d|^2/3)^(1/2), the eigenvalues of the matrix of d
    are exactly t times the closed-form roots at (m/t^3, n/t^3).  Returns
    the rescaled m, n and the factor t.
    """
    v = np.asarray(dirs, dtype=np.longdouble)
    a, b, c = v[..., 0:4], v[..., 4:8], v[..., 8:12]
    na2, nb2, nc2 = (a * a).sum(-1), (b * b).sum(-1), (c * c).sum(-1)
    t = np.sqrt((na2 + nb2 + nc2) / 3.0)
    m = np.sqrt(na2 * nb2 * nc2)
    ab = np.stack(
        [
            a[..., 0] * b[..., 0] - a[..., 1] * b[..., 1] - a[..., 2] * b[..., 2] - a[..., 3] * b[..., 3],
            a[..., 0] * b[..., 1] + a[..., 1] * b[..., 0] + a[..., 2] * b[..., 3] - a[..., 3] * b[..., 2],
            a[..., 0] * b[..., 2] - a[..., 1] * b[..., 3] + a[..., 2] * b[..., 0] + a[..., 3] * b[..., 1],
            a[..., 0] * b[..., 3] + a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1] + a[..., 3] * b[..., 0],
        ],
        axis=-1,
    )
    n = (
        ab[..., 0] * c[..., 0]
        - ab[..., 1] * c[..., 1]
        - ab[..., 2] * c[..., 2]
        - ab[..., 3] * c[..., 3]
    )
    t3 = t ** 3
    return m / t3, n / t3, t


@dataclass
class SpectralReport:
    """Eigenvalues and eigenvectors of a direction matrix.

    Eigenvalues descending; eigenvectors are columns scaled to norm
    sqrt(3) with a nonnegative component along the direction (sign fixed
    deterministically when orthogonal to it).
    """

    direction: DirectionD
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    closed_form: np.ndarray

    @property
    def max_mismatch(self) -> float:
        return float(np.max(np.abs(self.eigenvalues - self.closed_form)))


def _fix_vector_signs(vecs: np.ndarray, d: np.ndarray) -> np.ndarray:
    vecs = vecs * np.sqrt(3.0)
    proj = d @ vecs
    sign = np.where(proj < 0, -1.0, 1.0)
    # Orientation against d is ambiguous when orthogonal: fall back to the
    # first component of significant size.
    amb = np.abs(proj) < 1e-9
    if np.any(amb):
        lead = vecs[np.argmax(np.abs(vecs) > 1e-6, axis=0), np.arange(vecs.shape[1])]
        sign = np.where(amb, np.where(lead < 0, -1.0, 1.0), sign)
    return vecs * sign


def direction_spectrum(d: DirectionD, solver: str = "jacobi") -> SpectralReport:
    """Full spectral report for one direction.

    solver="jacobi" uses the self-contained reference solver; "lapack"
    uses the batched production path (identical to 1e-12, see tests).
    """
    mat = matrix_2Qd(d)
    if solver == "jacobi":
        vals, vecs = jacobi_eigh(mat)
    elif solver == "lapack":
        vals, vecs = eigh_desc(mat)
    else:
        raise ValueError("unknown solver %r" % solver)
    m, n, t = invariants_mn(d.vec)
    return SpectralReport(
        direction=d,
        eigenvalues=vals,
        eigenvectors=_fix_vector_signs(vecs, d.vec),
        closed_form=(t * spectrum_closed_form(m, n)).astype(float),
    )


def spectrum_sweep(dirs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (numerical, descending) and closed-form spectra for a
    stack of norm-sqrt(3) direction vectors, shape (count, 12)."""
    dirs = np.asarray(dirs, dtype=float)
    mats = q_matrix(dirs)
    vals = eigvalsh_desc(mats)
    m, n, t = invariants_mn(dirs)
    ld = np.longdouble
    m = np.clip(m, ld(-1), ld(1))
    n = np.clip(n, ld(-1), ld(1))
    k6 = ld(np.pi) * np.arange(6, dtype=ld) / 3.0
    k3 = ld(np.pi) * (2 * np.arange(3, dtype=ld) + 1) / 3.0
    singles = 2.0 * np.cos(np.arccos(m)[:, None] / 3.0 + k6[None, :])
    doubles = 2.0 * np.cos(np.arccos(n)[:, None] / 3.0 + k3[None, :])
    closed = np.concatenate([singles, np.repeat(doubles, 2, axis=1)], axis=1)
    closed = t[:, None] * np.sort(closed, axis=1)[:, ::-1]
    return vals, closed.astype(float)


def verify_cor2(report: SpectralReport, tol: float = 1e-9) -> dict:
    """Ordering and band bounds on a direction spectrum.

    Checks: 2 >= l1 >= l2 >= l3 >= l4 >= 1, -1 >= l9 >= ... >= l12 >= -2,
    l1 >= sqrt(3), l12 <= -sqrt(3).  Returns a dict of booleans plus the
    worst slack.
    """
    lam = report.eigenvalues
    checks = {
        "descending": bool(np.all(np.diff(lam) <= tol)),
        "top_band": bool(lam[0] <= 2.0 + tol and lam[3] >= 1.0 - tol),
        "bottom_band": bool(lam[8] <= -1.0 + tol and lam[11] >= -2.0 - tol),
        "top_sqrt3": bool(lam[0] >= np.sqrt(3.0) - tol),
        "bottom_sqrt3": bool(lam[11] <= -np.sqrt(3.0) + tol),
    }
    worst = min(
        2.0 + tol - lam[0],
        lam[3] - 1.0 + tol,
        -1.0 + tol - lam[8],
        lam[11] + 2.0 + tol,
        lam[0] - np.sqrt(3.0) + tol,
        -np.sqrt(3.0) + tol - lam[11],
    )
    checks["passed"] = all(v for k, v in checks.items())
    checks["worst_slack"] = float(worst)
    return checks


def perp_basis(d: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the complement of d, as columns (12 x 11).

    Householder construction: reflect d/|d| onto +-e1 and keep the other
    eleven columns of the reflector.
    """
    d = np.asarray(d, dtype=float).reshape(12)
    u = d / np.linalg.norm(d)
    sign = 1.0 if u[0] >= 0 else -1.0
    v = u.copy()
    v[0] += sign
    h = np.eye(12) - 2.0 * np.outer(v, v) / (v @ v)
    # First column of h is -sign*u; the rest span the complement.
    return h[:, 1:]


def lambda_perp(d: DirectionD) -> tuple[float, float]:
    """Extreme eigenvalues of the direction matrix compressed to the
    complement of d: (lambda_plus_perp, lambda_minus_perp)."""
    p = perp_basis(d.vec)
    b = p.T @ matrix_2Qd(d) @ p
    vals = eigvalsh_desc(b)
    return float(vals[0]), float(vals[-1])


def perp_sweep(dirs: np.ndarray) -> np.ndarray:
    """Vectorized ratio data for the compression bound.

    For each direction row returns (l3, l10, lperp_plus, lperp_minus).
    """
    dirs = np.asarray(dirs, dtype=float)
    count = dirs.shape[0]
    mats = q_matrix(dirs)
    vals = eigvalsh_desc(mats)

    u = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    sign = np.where(u[:, 0] >= 0, 1.0, -1.0)
    v = u.copy()
    v[:, 0] += sign
    vv = np.einsum("ni,nj->nij", v, v) / np.einsum("ni,ni->n", v, v)[:, None, None]
    h = np.eye(12)[None] - 2.0 * vv
    p = h[:, :, 1:]
    comp = np.einsum("nji,njk,nkl->nil", p, mats, p)
    cvals = np.linalg.eigvalsh(comp)
    out = np.empty((count, 4))
    out[:, 0] = vals[:, 2]
    out[:, 1] = vals[:, 9]
    out[:, 2] = cvals[:, -1]
    out[:, 3] = cvals[:, 0]
    return out


def cubic_roots_check(m: float) -> np.ndarray:
    """Roots of x^3 - 3x - 2m for |m| <= 1, descending.

    Trigonometric form 2 cos(arccos(m)/3 + 2 pi k/3).  Raises outside the
    domain.
    """
    if abs(m) > 1.0 + 1e-12:
        raise ValueError("cubic_roots_check: need |m| <= 1, got %r" % m)
    m = float(np.clip(m, -1.0, 1.0))
    roots = 2.0 * np.cos(np.arccos(m) / 3.0 + 2.0 * np.pi * np.arange(3) / 3.0)
    return np.sort(roots)[::-1]


def cor4_check(u, v, tol: float = 1e-9) -> dict:
    """Two-sided growth bound for the cubic form between sphere points.

    For u, v on the sphere of radius sqrt(3), with d = sqrt(3)(u-v)/|u-v|:

        3 sqrt(3) l10(d) |u-v| / 4  <=  P(u) - P(v)  <=  3 sqrt(3) l3(d) |u-v| / 4

    Returns the two slacks and a pass flag.
    """
    u = np.asarray(u, dtype=float).reshape(12)
    v = np.asarray(v, dtype=float).reshape(12)
    for w in (u, v):
        if abs(float(w @ w) - 3.0) > 1e-9:
            raise ValueError("cor4_check: points must lie on the sphere of radius sqrt(3)")
    gap = float(np.linalg.norm(u - v))
    if gap < 1e-9:
        raise ValueError("cor4_check: points too close")
    d = DirectionD((u - v) * (np.sqrt(3.0) / gap))
    lam = eigvalsh_desc(matrix_2Qd(d))
    l3, l10 = float(lam[2]), float(lam[9])
    diff = float(eval_P(u) - eval_P(v))
    scale = 3.0 * np.sqrt(3.0) * gap / 4.0
    lower, upper = scale * l10, scale * l3
    return {
        "passed": bool(lower - tol <= diff <= upper + tol),
        "lower_slack": diff - lower,
        "upper_slack": upper - diff,
        "l3": l3,
        "l10": l10,
    }


def strata_directions(rng: np.random.Generator, count_each: int = 50) -> np.ndarray:
    """Targeted direction samples on the degenerate strata.

    * m = 0: one block zero, the others filling the norm budget;
    * m = 1: all three blocks unit norm;
    * n = +1 and n = -1: unit blocks with c = +-conj(qa qb).

    Returns a stack of norm-sqrt(3) vectors including the corner cases.
    """
    out = []
    sq = np.sqrt(3.0)

    def unit4(k):
        w = rng.standard_normal((k, 4))
        return w / np.linalg.norm(w, axis=1, keepdims=True)

    # m = 0 stratum: zero out one block per sample, cycle which one.
    for i in range(count_each):
        w = rng.standard_normal(12)
        w[4 * (i % 3): 4 * (i % 3) + 4] = 0.0
        out.append(w * (sq / np.linalg.norm(w)))
    # m = 1 torus: three independent unit blocks.
    abc = np.concatenate([unit4(count_each), unit4(count_each), unit4(count_each)], axis=1)
    out.extend(abc)
    # n = +-1 corners.
    for sgn in (+1.0, -1.0):
        a, b = unit4(count_each), unit4(count_each)
        c = sgn * qmul(a, b)
        c[:, 1:] = -c[:, 1:]
        out.extend(np.concatenate([a, b, c], axis=1))
    return np.asarray(out)

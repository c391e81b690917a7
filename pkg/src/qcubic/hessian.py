"""The order-2 homogeneous potential w = P(x)/|x| and its Hessian field.

The Hessian of w is homogeneous of order zero, so restricting it to the
unit sphere loses nothing.  The key facts verified downstream:

* between any two unit points the Hessian difference has eigenvalues of
  both signs, quantitatively bounded away from zero (witness directions);
* the ratio of its extreme eigenvalues is pinched inside
  [1/(1536 sqrt 3), 1536 sqrt 3];
* all third directional derivatives on the unit sphere are bounded by 32.
"""

from __future__ import annotations

import numpy as np

from .cubic import DirectionD, eval_P, grad_P, matrix_2Qd, q_matrix
from .eigen import eigh_desc, eigvalsh_desc, jacobi_eigh

# Pinch constant for the extreme-eigenvalue ratio of Hessian differences.
RATIO_BOUND = 1536.0 * np.sqrt(3.0)
# Quantitative witness slope: unit second-derivative gap per unit distance.
WITNESS_SLOPE = 1.0 / (4.0 * np.sqrt(3.0))
THIRD_DERIVATIVE_BOUND = 32.0

MIN_RADIUS = 1e-12
MIN_SEPARATION = 1e-9


class WitnessError(RuntimeError):
    """Witness-direction construction failed; indicates a genuine bug."""


def eval_w(x) -> np.ndarray:
    """w(x) = P(x)/|x|, the order-2 homogeneous potential."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r < MIN_RADIUS):
        raise ValueError("eval_w: undefined at the origin")
    return eval_P(x) / r


def grad_w(x) -> np.ndarray:
    """Closed-form gradient: grad(P)/r - P x / r^3."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r < MIN_RADIUS):
        raise ValueError("grad_w: undefined at the origin")
    p = eval_P(x)
    return grad_P(x) / r[..., None] - (p / r**3)[..., None] * x


def hess_w(x) -> np.ndarray:
    """Closed-form Hessian of w.

    D2w = D2P/r - (gP ox x + x ox gP)/r^3 - P I/r^3 + 3 P (x ox x)/r^5,
    with D2P(x) the direction matrix of x itself (q_matrix is linear).
    """
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r < MIN_RADIUS):
        raise ValueError("hess_w: undefined at the origin")
    p = eval_P(x)
    gp = grad_P(x)
    gx = gp[..., :, None] * x[..., None, :]
    xx = x[..., :, None] * x[..., None, :]
    eye = np.eye(12)
    r = r[..., None, None]
    p = p[..., None, None]
    return (
        q_matrix(x) / r
        - (gx + np.swapaxes(gx, -1, -2)) / r**3
        - p * eye / r**3
        + 3.0 * p * xx / r**5
    )


def H(a) -> np.ndarray:
    """Hessian of w at a unit sphere point (|a| = 1 enforced)."""
    a = np.asarray(a, dtype=float)
    n2 = np.einsum("...i,...i->...", a, a)
    if np.any(np.abs(n2 - 1.0) > 1e-10):
        raise ValueError("H: expects unit vectors; normalize explicitly")
    return hess_w(a)


def pair_spectrum(a, b, solver: str = "jacobi") -> np.ndarray:
    """Descending eigenvalues of H(a) - H(b) for distinct unit points."""
    a = np.asarray(a, dtype=float).reshape(12)
    b = np.asarray(b, dtype=float).reshape(12)
    if np.linalg.norm(a - b) < MIN_SEPARATION:
        raise ValueError("pair_spectrum: points closer than 1e-9")
    diff = H(a) - H(b)
    if solver == "jacobi":
        vals, _ = jacobi_eigh(diff)
        return vals
    return eigvalsh_desc(diff)


def pair_ratio_sweep(a_pts: np.ndarray, b_pts: np.ndarray) -> np.ndarray:
    """Extreme-eigenvalue data for stacks of unit-point pairs.

    Returns rows (mu1, mu12, ratio) with ratio = -mu1/mu12.
    """
    ha = hess_w(a_pts)
    hb = hess_w(b_pts)
    vals = eigvalsh_desc(ha - hb)
    mu1 = vals[:, 0]
    mu12 = vals[:, -1]
    return np.stack([mu1, mu12, -mu1 / mu12], axis=1)


def witness_pair(a, b):
    """Witness directions (e, f) for a pair of unit sphere points.

    With d = sqrt(3)(a-b)/|a-b| and the direction matrix of d:

    * e: unit vector in the span of the top three eigenvectors, orthogonal
      to both a and b.  Guarantees w_ee(a) - w_ee(b) >= |a-b|/(4 sqrt 3).
    * f: same from the bottom three, flipping the inequality.

    The kernel vector inside each 3-dim eigenspace solves a 2x3 homogeneous
    system (inner products against a and b); its null space is the cross
    product of the two rows.  Degenerate projections raise WitnessError.
    """
    a = np.asarray(a, dtype=float).reshape(12)
    b = np.asarray(b, dtype=float).reshape(12)
    gap = float(np.linalg.norm(a - b))
    if gap < MIN_SEPARATION:
        raise ValueError("witness_pair: points closer than 1e-9")
    d = DirectionD((a - b) * (np.sqrt(3.0) / gap))
    _, vecs = eigh_desc(matrix_2Qd(d))

    out = []
    for cols in (vecs[:, 0:3], vecs[:, 9:12]):
        rows = np.stack([a @ cols, b @ cols])  # 2 x 3
        y = np.cross(rows[0], rows[1])
        nrm = float(np.linalg.norm(y))
        if nrm < 1e-10:
            raise WitnessError("degenerate witness projection (|y| = %.2e)" % nrm)
        e = cols @ (y / nrm)
        e = e / np.linalg.norm(e)
        out.append(e)
    return out[0], out[1]


def witness_gaps(a, b) -> dict:
    """Quantitative two-sided Hessian separation along witness directions.

    Returns the two slacks (each should be >= 0 up to tolerance):
        top:    w_ee(a) - w_ee(b) - |a-b|/(4 sqrt 3)
        bottom: -|a-b|/(4 sqrt 3) - (w_ff(a) - w_ff(b))
    """
    e, f = witness_pair(a, b)
    gap = float(np.linalg.norm(np.asarray(a, float) - np.asarray(b, float)))
    ha, hb = H(a), H(b)
    top = float(e @ ha @ e - e @ hb @ e) - gap * WITNESS_SLOPE
    bottom = -gap * WITNESS_SLOPE - float(f @ ha @ f - f @ hb @ f)
    return {"top_slack": top, "bottom_slack": bottom, "separation": gap}


def witness_sweep(a_pts: np.ndarray, b_pts: np.ndarray):
    """Vectorized witness construction over stacks of unit-point pairs.

    Returns (top_slack, bottom_slack) arrays; see witness_gaps.
    Raises WitnessError if any projection degenerates.
    """
    a_pts = np.asarray(a_pts, dtype=float)
    b_pts = np.asarray(b_pts, dtype=float)
    diff = a_pts - b_pts
    gap = np.linalg.norm(diff, axis=1)
    if np.any(gap < MIN_SEPARATION):
        raise ValueError("witness_sweep: pairs closer than 1e-9")
    dirs = diff * (np.sqrt(3.0) / gap)[:, None]
    _, vecs = eigh_desc(q_matrix(dirs))

    ha = hess_w(a_pts)
    hb = hess_w(b_pts)
    hd = ha - hb

    slacks = []
    for sl in (np.s_[:, :, 0:3], np.s_[:, :, 9:12]):
        cols = vecs[sl]
        ra = np.einsum("ni,nik->nk", a_pts, cols)
        rb = np.einsum("ni,nik->nk", b_pts, cols)
        y = np.cross(ra, rb)
        nrm = np.linalg.norm(y, axis=1)
        if np.any(nrm < 1e-10):
            raise WitnessError("degenerate witness projection in sweep")
        e = np.einsum("nik,nk->ni", cols, y / nrm[:, None])
        e = e / np.linalg.norm(e, axis=1, keepdims=True)
        slacks.append(np.einsum("ni,nij,nj->n", e, hd, e))
    thresh = gap * WITNESS_SLOPE
    return slacks[0] - thresh, -thresh - slacks[1]


def third_derivative_sweep(rng: np.random.Generator, samples: int,
                           h: float = 1e-5) -> np.ndarray:
    """|w_efg| at random unit points along random unit directions.

    Central difference of the closed-form Hessian:
        w_efg(x) ~ e^T (hess_w(x + h g) - hess_w(x - h g)) e_f / 2h.
    Returns the sampled absolute values (all should be <= 32).
    """
    x = rng.standard_normal((samples, 12))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    e = rng.standard_normal((samples, 12))
    e /= np.linalg.norm(e, axis=1, keepdims=True)
    f = rng.standard_normal((samples, 12))
    f /= np.linalg.norm(f, axis=1, keepdims=True)
    g = rng.standard_normal((samples, 12))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    hp = hess_w(x + h * g)
    hm = hess_w(x - h * g)
    vals = np.einsum("ni,nij,nj->n", e, hp - hm, f) / (2.0 * h)
    return np.abs(vals)


def ratio_bound_estimate(rng: np.random.Generator, pairs: int, chunk: int = 20000):
    """Empirical pinch of the Hessian-difference eigenvalue ratio.

    Draws random unit pairs, filters separations below 1e-9 (none in
    practice), and returns (M_hat, r_min, r_max) where r = -mu1/mu12 and
    M_hat = max(r_max, 1/r_min).
    """
    r_min, r_max = np.inf, 0.0
    done = 0
    while done < pairs:
        k = min(chunk, pairs - done)
        a = rng.standard_normal((k, 12))
        a /= np.linalg.norm(a, axis=1, keepdims=True)
        b = rng.standard_normal((k, 12))
        b /= np.linalg.norm(b, axis=1, keepdims=True)
        keep = np.linalg.norm(a - b, axis=1) >= MIN_SEPARATION
        data = pair_ratio_sweep(a[keep], b[keep])
        r_min = min(r_min, float(data[:, 2].min()))
        r_max = max(r_max, float(data[:, 2].max()))
        done += k
    return max(r_max, 1.0 / r_min), r_min, r_max

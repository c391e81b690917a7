"""Inf-convolution construction of a degenerate-elliptic operator vanishing
on the Hessian image of the homogeneous potential.

The Hessian of w is homogeneous of order zero, so its full image is the
compact set Sigma = {D2w(a) : |a| = 1}.  In the (z, s) coordinates of
symspace, Sigma is the graph of a function s = g(z) that is Lipschitz with
modulus x (the cone support function): that is the graph invariant below.
The operator is

    F(A) = s(A) - g_tilde(z(A)),   g_tilde(z) = min_i (s_i + x(z - z_i)),

the minimal cone-Lipschitz extension of g off the sampled graph.  F is
monotone under positive-semidefinite increments because s(E) >= x(z(E))
for every psd E, and it vanishes on Sigma up to the sampling density.

Desk-scale caveat, relevant to the probes: the finite min makes g_tilde an
over-estimate of the true extension, so F here is a *lower* bound for the
ideal operator.  Quadratic minorants of w therefore test as F <= 0 soundly
at any sampling density, while majorants inherit the density gap at their
touching point; the majorant probe controls this with identity lifts whose
size the spectral band of the Hessians keeps bounded away from zero.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import symspace
from .cones import ConeParams, _support_from_eigs, SUPPORT_TOL
from .hessian import H, RATIO_BOUND, eval_w, hess_w
from .sampling import (rng_for, unit_sphere, STREAM_SIGMA, STREAM_HELDOUT,
                       STREAM_ELLIPTIC, STREAM_VISCOSITY)

GRAPH_TOL = 1e-8
MINORANT_MARGIN = 1e-6
CACHE_MAGIC = "qcubic-sigma-cache"
CACHE_VERSION = 1
_SQRT_N = np.sqrt(12.0)
# chunk size for batched 12x12 eigensolves (~230 MB of stacked matrices)
_EIG_CHUNK = 200_000


class CacheError(RuntimeError):
    """Sigma cache file missing, malformed, or inconsistent."""


class GraphError(ValueError):
    """A sampled pair violates the cone-Lipschitz graph invariant."""


@dataclass(frozen=True)
class SigmaSample:
    """Sampled graph points: source unit vectors a_i and the coordinates
    (z_i, s_i) of their Hessians.  lam records the aperture the graph
    invariant was validated against (0 = unvalidated)."""

    sources: np.ndarray
    z: np.ndarray
    s: np.ndarray
    seed: int
    lam: float = 0.0

    @property
    def count(self) -> int:
        return int(self.sources.shape[0])

    def prefix(self, count: int) -> "SigmaSample":
        if not 1 <= count <= self.count:
            raise ValueError("prefix count out of range")
        return SigmaSample(self.sources[:count], self.z[:count],
                           self.s[:count], self.seed, self.lam)


def _coords_of_sources(sources: np.ndarray):
    mats = np.stack([H(a) for a in sources])
    return symspace.to_coords(mats)


def sigma_from_sources(sources: np.ndarray, seed: int = -1,
                       cone: ConeParams | None = None) -> SigmaSample:
    """Wrap explicit unit vectors as a sample; validates when a cone is given."""
    sources = np.asarray(sources, dtype=float)
    z, s = _coords_of_sources(sources)
    sig = SigmaSample(sources, z, s, seed,
                      lam=0.0 if cone is None else cone.lam)
    if cone is not None:
        validate_graph(sig, cone)
    return sig


def build_sigma(count: int, seed: int, cone: ConeParams,
                cache_path: str | None = None) -> SigmaSample:
    """Uniform sphere sample of the graph, pairwise-validated, optionally
    persisted.  Raises GraphError with the offending pair on violation
    (which would mean the sampled set fails the cone condition)."""
    if count < 2:
        raise ValueError("build_sigma: count must be >= 2")
    sources = unit_sphere(rng_for(seed, STREAM_SIGMA), count)
    sig = sigma_from_sources(sources, seed=seed, cone=cone)
    if cache_path is not None:
        save_cache(sig, cache_path)
    return sig


def validate_graph(sigma: SigmaSample, cone: ConeParams,
                   tol: float = GRAPH_TOL, chunk: int = _EIG_CHUNK) -> None:
    """Check |s_i - s_j| <= x(z_i - z_j) + tol over all ordered pairs.

    Uses the membership form of the bound: x(dz) > t iff the spectrum of
    embed(dz) shifted by t/sqrt(12) still fails the dual-cone p/q test, so
    one eigendecomposition per unordered pair settles both orders (the
    reversed difference has the negated spectrum).
    """
    n = sigma.count
    if n < 2:
        return
    lam2 = cone.lam**2
    ii, jj = np.triu_indices(n, k=1)
    for start in range(0, ii.size, chunk):
        sl = slice(start, min(start + chunk, ii.size))
        i_idx, j_idx = ii[sl], jj[sl]
        dz = sigma.z[i_idx] - sigma.z[j_idx]
        ds = np.abs(sigma.s[i_idx] - sigma.s[j_idx])
        mu = np.linalg.eigvalsh(symspace.embed_traceless(dz))
        t = (ds - tol)[:, None] / _SQRT_N
        bad = np.zeros(i_idx.size, dtype=bool)
        for sign in (1.0, -1.0):
            shifted = sign * mu + t
            p = np.sum(np.where(shifted > 0, shifted, 0.0), axis=-1)
            q = np.sum(np.where(shifted < 0, -shifted, 0.0), axis=-1)
            bad |= p >= lam2 * q
        bad &= ds > tol  # coincident points are never violations
        if np.any(bad):
            k = int(np.nonzero(bad)[0][0])
            raise GraphError(
                "graph invariant violated by pair (%d, %d): |ds|=%.6g "
                "exceeds the cone modulus at aperture %.6g"
                % (i_idx[k], j_idx[k], ds[k], cone.lam))


# ---------------------------------------------------------------------------
# cache file


def save_cache(sigma: SigmaSample, path: str) -> None:
    """Write the sample as versioned CSV, atomically (temp + rename)."""
    rows = np.concatenate(
        [sigma.sources, sigma.z, sigma.s[:, None]], axis=1)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write("# %s v%d\n" % (CACHE_MAGIC, CACHE_VERSION))
        fh.write("# seed=%d count=%d lam=%s basis=%s\n"
                 % (sigma.seed, sigma.count, repr(float(sigma.lam)),
                    symspace.BASIS_HASH))
        fh.write("# columns: a[12], z[77], s\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")
    os.replace(tmp, path)


def load_cache(path: str) -> SigmaSample:
    """Read and fully re-verify a cached sample.

    Integrity: header magic/version, basis hash, row count/width, unit
    sources, and stored coordinates matching recomputed Hessian coordinates.
    Any failure raises CacheError; no partial sample is ever returned.
    """
    if not os.path.exists(path):
        raise CacheError("no cache file at %r" % path)
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise CacheError("unreadable cache file: %s" % exc) from exc
    if len(lines) < 4 or not lines[0].startswith("# %s v" % CACHE_MAGIC):
        raise CacheError("not a sigma cache file")
    try:
        version = int(lines[0].rsplit("v", 1)[1])
    except ValueError as exc:
        raise CacheError("bad version line") from exc
    if version != CACHE_VERSION:
        raise CacheError("unsupported cache version %d" % version)
    meta = {}
    for tok in lines[1].lstrip("# ").split():
        key, _, val = tok.partition("=")
        meta[key] = val
    try:
        seed = int(meta["seed"])
        count = int(meta["count"])
        lam = float(meta.get("lam", "0"))
        basis = meta["basis"]
    except (KeyError, ValueError) as exc:
        raise CacheError("bad metadata line: %r" % lines[1]) from exc
    if basis != symspace.BASIS_HASH:
        raise CacheError("cache built against a different coordinate basis")
    data = [ln for ln in lines if not ln.startswith("#")]
    if len(data) != count:
        raise CacheError("row count %d does not match header count %d"
                         % (len(data), count))
    try:
        rows = np.array([[float(tok) for tok in ln.split(",")]
                         for ln in data])
    except ValueError as exc:
        raise CacheError("unparseable data row") from exc
    if rows.ndim != 2 or rows.shape[1] != 90:
        raise CacheError("expected 90 columns (12 + 77 + 1)")
    if not np.all(np.isfinite(rows)):
        raise CacheError("non-finite entries in cache")
    sources, z, s = rows[:, :12], rows[:, 12:89], rows[:, 89]
    if np.max(np.abs(np.linalg.norm(sources, axis=1) - 1.0)) > 1e-9:
        raise CacheError("source vectors are not unit length")
    z2, s2 = _coords_of_sources(sources)
    if max(np.max(np.abs(z2 - z)), np.max(np.abs(s2 - s))) > 1e-10:
        raise CacheError("stored coordinates disagree with recomputed ones")
    return SigmaSample(sources, z, s, seed, lam=lam)


# ---------------------------------------------------------------------------
# the operator


def _x_rows(dz: np.ndarray, cone: ConeParams, tol: float = SUPPORT_TOL):
    """Support function on a flat stack of difference rows, chunked."""
    out = np.empty(dz.shape[0])
    for start in range(0, dz.shape[0], _EIG_CHUNK):
        sl = slice(start, min(start + _EIG_CHUNK, dz.shape[0]))
        mu = np.linalg.eigvalsh(symspace.embed_traceless(dz[sl]))
        out[sl] = _support_from_eigs(mu, cone.lam, tol)
    return out


def g_tilde(z: np.ndarray, sigma: SigmaSample, cone: ConeParams):
    """Minimal cone-Lipschitz extension min_i (s_i + x(z - z_i)).

    Accepts one 77-vector or a stack; two-sided bound
    -x(z2 - z1) <= g_tilde(z1) - g_tilde(z2) <= x(z1 - z2) holds for any
    point set by subadditivity of x.
    """
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    zz = z[None, :] if single else z
    n_eval, n_pts = zz.shape[0], sigma.count
    block = max(1, _EIG_CHUNK // n_pts)
    out = np.empty(n_eval)
    for start in range(0, n_eval, block):
        stop = min(start + block, n_eval)
        dz = (zz[start:stop, None, :] - sigma.z[None, :, :]).reshape(-1, 77)
        xs = _x_rows(dz, cone).reshape(stop - start, n_pts)
        out[start:stop] = np.min(sigma.s[None, :] + xs, axis=1)
    return float(out[0]) if single else out


@dataclass(frozen=True)
class OperatorF:
    """F(A) = s(A) - g_tilde(z(A)); zero on the sampled graph, monotone
    under psd increments, Lipschitz in the trace norm."""

    sigma: SigmaSample
    cone: ConeParams

    def value(self, mats: np.ndarray) -> np.ndarray:
        z, s = symspace.to_coords(np.asarray(mats, dtype=float))
        return s - g_tilde(z, self.sigma, self.cone)


def eval_F(mat: np.ndarray, op: OperatorF) -> float:
    return float(op.value(np.asarray(mat, dtype=float)[None])[0])


def operator_cone(policy: str, ratio_hat: float | None = None) -> ConeParams:
    """Aperture policy: 11x the pair-ratio bound, either the closed-form
    constant or a measured estimate."""
    if policy == "paper":
        return ConeParams(11.0 * RATIO_BOUND)
    if policy == "empirical":
        if ratio_hat is None or not np.isfinite(ratio_hat) or ratio_hat < 1:
            raise ValueError("empirical policy needs a measured ratio >= 1")
        return ConeParams(11.0 * ratio_hat)
    raise ValueError("unknown lambda policy %r" % policy)


# ---------------------------------------------------------------------------
# probes


@dataclass
class ZeroLevelReport:
    counts: list
    max_abs_F: list          # per count, over the held-out set
    nn_bound: np.ndarray     # per held-out point, at the largest count
    F_full: np.ndarray       # per held-out point, at the largest count
    heldout_seed: int

    @property
    def worst_ratio(self) -> float:
        return float(np.max(np.abs(self.F_full) / self.nn_bound))

    @property
    def monotone(self) -> bool:
        return all(b <= a * (1 + 1e-12)
                   for a, b in zip(self.max_abs_F, self.max_abs_F[1:]))


def zero_level_curve(sigma: SigmaSample, cone: ConeParams,
                     counts=(250, 500, 1000, 2000), heldout_count: int = 200,
                     heldout_seed: int = 7) -> ZeroLevelReport:
    """Convergence of max |F| on held-out graph points as the sample grows.

    Prefix-nested sub-samples make the curve monotone by construction:
    adding points can only lower g_tilde toward the true extension, and F
    on the true graph satisfies F <= 0 exactly, so |F| shrinks pointwise.
    The per-point certificate min_i (x(z - z_i) + x(z_i - z)) bounds |F|.
    """
    counts = sorted(int(c) for c in counts)
    if counts[-1] > sigma.count:
        raise ValueError("curve counts exceed the sample size")
    held = unit_sphere(rng_for(heldout_seed, STREAM_HELDOUT), heldout_count)
    zh, sh = _coords_of_sources(held)

    n_pts = sigma.count
    x_fwd = np.empty((heldout_count, n_pts))
    x_rev = np.empty((heldout_count, n_pts))
    block = max(1, _EIG_CHUNK // n_pts)
    for start in range(0, heldout_count, block):
        stop = min(start + block, heldout_count)
        dz = (zh[start:stop, None, :] - sigma.z[None, :, :]).reshape(-1, 77)
        mu = np.linalg.eigvalsh(symspace.embed_traceless(dz))
        fwd = _support_from_eigs(mu, cone.lam)
        rev = _support_from_eigs(-mu[:, ::-1], cone.lam)
        x_fwd[start:stop] = fwd.reshape(stop - start, n_pts)
        x_rev[start:stop] = rev.reshape(stop - start, n_pts)

    max_abs = []
    for c in counts:
        g = np.min(sigma.s[None, :c] + x_fwd[:, :c], axis=1)
        max_abs.append(float(np.max(np.abs(sh - g))))
    g_full = np.min(sigma.s[None, :] + x_fwd, axis=1)
    return ZeroLevelReport(
        counts=list(counts), max_abs_F=max_abs,
        nn_bound=np.min(x_fwd + x_rev, axis=1),
        F_full=sh - g_full, heldout_seed=heldout_seed)


def _random_psd(rng: np.random.Generator, count: int) -> np.ndarray:
    """Unit-Frobenius psd matrices with uniform eigenvalue profiles."""
    g = rng.standard_normal((count, 12, 12))
    q, _ = np.linalg.qr(g)
    mu = rng.uniform(0.0, 1.0, (count, 12))
    mats = np.einsum("nik,nk,njk->nij", q, mu, q)
    return mats / np.linalg.norm(mats, axis=(1, 2), keepdims=True)


def _random_sym(rng: np.random.Generator, count: int,
                scale: float = 1.0) -> np.ndarray:
    g = rng.standard_normal((count, 12, 12)) * scale
    return 0.5 * (g + np.transpose(g, (0, 2, 1)))


@dataclass
class EllipticityReport:
    trials: int
    slope_min: float
    slope_max: float           # the empirical ellipticity estimate
    identity_slope: float
    monotone_worst: float      # min of F(A+E)-F(A) over the slope trials
    level_pairs: int
    level_violations: list
    paper_chain_bound: float   # 4 lam^2 sqrt(12) with the paper aperture

    @property
    def passed(self) -> bool:
        return (self.monotone_worst >= -1e-9 and not self.level_violations
                and self.slope_max < self.paper_chain_bound)


def ellipticity_probe(op: OperatorF, trials: int, seed: int) -> EllipticityReport:
    """Directional slopes along unit-Frobenius psd increments, plus the
    level-set cone condition at doubled aperture.

    Slopes are exact one-sided differences at t = 1e-3 (F is piecewise
    linear along matrix lines, so no extrapolation is needed).  Points are
    moved onto the zero level set by identity shifts -- F(A + tI) =
    F(A) + sqrt(12) t exactly -- and pairwise differences are then tested
    for membership in L at aperture 2 lam, where the two-sided Lipschitz
    bound of g_tilde guarantees strict membership.
    """
    rng = rng_for(seed, STREAM_ELLIPTIC)
    base_pts = unit_sphere(rng, trials)
    A = np.stack([H(a) for a in base_pts])
    half = trials // 2
    A[half:] = _random_sym(rng, trials - half, scale=1.5)
    E = _random_psd(rng, trials)
    t = 1e-3
    FA = op.value(A)
    FAE = op.value(A + t * E)
    slopes = (FAE - FA) / t
    idn = float((eval_F(A[0] + t * np.eye(12), op) - FA[0]) / t)

    # level-set pool: half graph-based, half generic, moved onto {F = 0}
    k = min(20, half, trials - half)
    sel = np.concatenate([np.arange(k), np.arange(half, half + k)])
    shift = -FA[sel] / _SQRT_N
    level = A[sel] + shift[:, None, None] * np.eye(12)
    pool = sel.size
    cone2 = ConeParams(2 * op.cone.lam)
    ii, jj = np.triu_indices(pool, k=1)
    vals = np.linalg.eigvalsh(level[ii] - level[jj])
    p = np.sum(np.where(vals > 0, vals, 0.0), axis=-1)
    q = np.sum(np.where(vals < 0, -vals, 0.0), axis=-1)
    lam2 = cone2.lam**2
    ok = (p < lam2 * q) & (q < lam2 * p)
    viol = [(int(a), int(b)) for a, b in zip(ii[~ok], jj[~ok])]

    lam_paper = 11.0 * RATIO_BOUND
    return EllipticityReport(
        trials=trials,
        slope_min=float(np.min(slopes)), slope_max=float(np.max(slopes)),
        identity_slope=idn,
        monotone_worst=float(np.min(FAE - FA)),
        level_pairs=int(ii.size), level_violations=viol,
        paper_chain_bound=float(4 * lam_paper**2 * np.sqrt(12.0)))


def monotonicity_sweep(op: OperatorF, trials: int, seed: int,
                       tol: float = 1e-9) -> float:
    """Worst value of F(A+E) - F(A) over random A and full-size psd E.

    Nonnegative up to roundoff: the increment's trace part dominates its
    cone modulus for psd E, and g_tilde is 1-Lipschitz in that modulus.
    Returns the worst difference (acceptance wants >= -tol).
    """
    rng = rng_for(seed, STREAM_ELLIPTIC)
    worst = np.inf
    block = 500
    done = 0
    while done < trials:
        b = min(block, trials - done)
        A = _random_sym(rng, b, scale=1.0)
        third = max(1, b // 3)
        pts = unit_sphere(rng, third)
        A[:third] = np.stack([H(a) for a in pts])
        E = _random_psd(rng, b) * rng.uniform(0.0, 3.0, (b, 1, 1))
        diff = op.value(A + E) - op.value(A)
        worst = min(worst, float(np.min(diff)))
        done += b
    return worst


@dataclass
class ViscosityReport:
    trials: int
    margin: float
    verification_count: int
    minorant_max_F: float     # acceptance: <= 1e-6
    majorant_min_F: float     # acceptance: >= -1e-6
    minorant_violations: int
    majorant_violations: int

    @property
    def passed(self) -> bool:
        return self.minorant_violations == 0 and self.majorant_violations == 0


def viscosity_probe(op: OperatorF, trials: int, seed: int,
                    verification_count: int = 10_000,
                    margin: float = MINORANT_MARGIN,
                    tol: float = 1e-6) -> ViscosityReport:
    """One-sided quadratic comparison at the Hessian level.

    Every trial takes a base point x' and the quadratic form with matrix
    D2w(x') -- the second-order Taylor polynomial of the 2-homogeneous w at
    x' collapses to exactly that form, so one-sidedness against w reduces
    to the unit sphere.  The form is then pushed strictly one-sided by an
    identity shift sized from a dense sphere verification sample (which
    always contains x' and the graph sources), plus margin; half the
    trials add a random psd tilt on the safe side.  Minorants must report
    F <= tol, majorants F >= -tol.

    The majorant lift is never small: the verification max of w - T is at
    least half the top eigenvalue gap of D2w(x'), which the spectral band
    keeps above sqrt(3)/2, so majorant F values sit well above the
    sampling-density gap at the touching point.
    """
    rng = rng_for(seed, STREAM_VISCOSITY)
    sphere = unit_sphere(rng, verification_count)
    verif = np.concatenate([sphere, op.sigma.sources], axis=0)
    wv = eval_w(verif)

    n_half = trials // 2
    bases = unit_sphere(rng, trials)
    # half the bases are graph sources: snug majorants whose touching point
    # is stored, where F vanishes exactly
    idx = rng.integers(0, op.sigma.count, n_half)
    bases[:n_half] = op.sigma.sources[idx]

    minorants = np.empty((trials, 12, 12))
    majorants = np.empty((trials, 12, 12))
    tilts = _random_psd(rng, trials) * rng.uniform(0.0, 0.5, (trials, 1, 1))
    tilt_on = rng.uniform(size=trials) < 0.5
    for k in range(trials):
        base = hess_w(bases[k])
        pts = np.concatenate([verif, bases[k][None]], axis=0)
        tvals = 0.5 * np.einsum("ni,ij,nj->n", pts, base, pts)
        wvals = np.concatenate([wv, eval_w(bases[k])[None]])
        down = np.max(tvals - wvals) + margin   # >= margin: base touches at x'
        up = np.max(wvals - tvals) + margin
        minorants[k] = base - 2.0 * down * np.eye(12)
        majorants[k] = base + 2.0 * up * np.eye(12)
        if tilt_on[k]:
            minorants[k] -= tilts[k]
            majorants[k] += tilts[k]
    F_min = op.value(minorants)
    F_maj = op.value(majorants)
    return ViscosityReport(
        trials=trials, margin=margin,
        verification_count=int(verif.shape[0]),
        minorant_max_F=float(np.max(F_min)),
        majorant_min_F=float(np.min(F_maj)),
        minorant_violations=int(np.sum(F_min > tol)),
        majorant_violations=int(np.sum(F_maj < -tol)))

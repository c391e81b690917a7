"""Acceptance sweep.

One test per acceptance item, each at its stated tolerance and sample
count, so ``pytest -v`` prints exactly one pass/fail line per item.  The
module-scoped fixtures hold the two expensive shared objects (the pair
ratio estimate over 1e5 pairs and the 2000-point graph sample) so the
whole file runs in a few minutes.

Item 13 (the deliberately corrupted build) is asserted exactly as
promised: the corruption must trip BOTH the closed-form spectrum check
and the pair-ratio pinch.  The second leg does not hold — see the
assertion message — and is intentionally left failing rather than
weakened.
"""

import time

import numpy as np
import pytest

import qcubic.cubic as cubic_mod
from qcubic.cones import ConeParams, cone_condition, support_x
from qcubic.cubic import spectrum_sweep, strata_directions, perp_sweep
from qcubic.elliptic import (build_sigma, OperatorF, zero_level_curve,
                             monotonicity_sweep, viscosity_probe,
                             operator_cone)
from qcubic.hessian import (H, eval_w, grad_w, hess_w, witness_sweep,
                            pair_ratio_sweep, third_derivative_sweep,
                            ratio_bound_estimate, RATIO_BOUND,
                            THIRD_DERIVATIVE_BOUND)
from qcubic.numdiff import fd_gradient, fd_jacobian
from qcubic.quaternions import matrix_M as _true_matrix_M
from qcubic.sampling import (rng_for, unit_sphere, directions,
                             STREAM_SPECTRAL, STREAM_PERP, STREAM_HESSIAN,
                             STREAM_WITNESS, STREAM_THIRD, STREAM_CONE,
                             STREAM_FDCHECK)

SEED = 42
SQ12 = np.sqrt(12.0)


@pytest.fixture(scope="module")
def spectra():
    """10^4 random directions plus all four degenerate strata, timed."""
    dirs = directions(rng_for(SEED, STREAM_SPECTRAL), 10_000)
    strata = strata_directions(rng_for(SEED, STREAM_SPECTRAL + 100), 50)
    t0 = time.perf_counter()
    vals_r, closed_r = spectrum_sweep(dirs)
    vals_s, closed_s = spectrum_sweep(strata)
    elapsed = time.perf_counter() - t0
    return {
        "vals": np.concatenate([vals_r, vals_s]),
        "closed": np.concatenate([closed_r, closed_s]),
        "elapsed": elapsed,
    }


@pytest.fixture(scope="module")
def ratio_data():
    """Pinch estimate over 1e5 random pairs plus 500 antipodal pairs."""
    m_hat, r_min, r_max = ratio_bound_estimate(
        rng_for(SEED, STREAM_HESSIAN), 100_000)
    anti = unit_sphere(rng_for(SEED, STREAM_HESSIAN + 300), 500)
    rows = pair_ratio_sweep(anti, -anti)
    r_min = min(r_min, float(rows[:, 2].min()))
    r_max = max(r_max, float(rows[:, 2].max()))
    return {"m_hat": max(m_hat, r_max, 1.0 / r_min),
            "r_min": r_min, "r_max": r_max}


@pytest.fixture(scope="module")
def sigma2000(ratio_data):
    cone = operator_cone("empirical", ratio_data["m_hat"])
    return build_sigma(2000, SEED, cone), cone


def test_a01_closed_form_spectrum_oracle(spectra):
    worst = float(np.max(np.abs(spectra["vals"] - spectra["closed"])))
    assert worst <= 1e-8, "max eigenvalue mismatch %.3e over 1e-8" % worst
    assert spectra["elapsed"] < 30.0, \
        "sweep took %.1fs (budget 30s)" % spectra["elapsed"]


def test_a02_eigenvalue_band_bounds(spectra):
    lam, tol = spectra["vals"], 1e-9
    slack = np.min(np.stack([
        2.0 + tol - lam[:, 0], lam[:, 3] - 1.0 + tol,
        -1.0 + tol - lam[:, 8], lam[:, 11] + 2.0 + tol,
        lam[:, 0] - np.sqrt(3.0) + tol,
        -np.sqrt(3.0) + tol - lam[:, 11]]), axis=0)
    assert np.all(slack >= 0.0), \
        "band violation, worst slack %.3e at sample %d" % (
            slack.min(), int(np.argmin(slack)))


def test_a03_complement_compression_ratio():
    rows = perp_sweep(directions(rng_for(SEED, STREAM_PERP), 100_000))
    ratios = np.maximum(rows[:, 2] / rows[:, 0], rows[:, 3] / rows[:, 1])
    delta_hat = float(np.max(ratios))
    assert delta_hat < 1.5, "delta_hat = %.4f" % delta_hat
    print("a03 delta_hat = %.4f" % delta_hat)


def test_a04_witness_slopes():
    rng = rng_for(SEED, STREAM_WITNESS)
    worst = np.inf
    done = 0
    while done < 100_000:
        k = min(20_000, 100_000 - done)
        a = unit_sphere(rng, k)
        b = unit_sphere(rng, k)
        keep = np.linalg.norm(a - b, axis=1) >= 1e-6
        top, bottom = witness_sweep(a[keep], b[keep])
        worst = min(worst, float(top.min()), float(bottom.min()))
        done += k
    assert worst >= -1e-9, "worst witness slack %.3e" % worst


def test_a05_pair_ratio_pinch(ratio_data):
    r_min, r_max = ratio_data["r_min"], ratio_data["r_max"]
    print("a05 ratio extremes: [%.6f, %.6f]" % (r_min, r_max))
    assert r_max <= RATIO_BOUND, "r_max %.4f over bound" % r_max
    assert r_min >= 1.0 / RATIO_BOUND, "r_min %.3e under bound" % r_min


def test_a06_third_derivative_bound():
    vals = third_derivative_sweep(rng_for(SEED, STREAM_THIRD), 10_000)
    worst = float(np.max(vals))
    assert worst <= THIRD_DERIVATIVE_BOUND + 1e-3, \
        "third derivative sample %.4f over %.1f" % (
            worst, THIRD_DERIVATIVE_BOUND)


def test_a07_pairwise_cone_condition(sigma2000, ratio_data):
    sigma, _ = sigma2000
    mats = np.stack([H(a) for a in sigma.sources[:500]])
    for lam in (11.0 * ratio_data["m_hat"], 11.0 * RATIO_BOUND):
        rep = cone_condition(mats, ConeParams(lam))
        assert rep.passed, \
            "lam=%.3f: %d violating pairs, first %s" % (
                lam, len(rep.violations), rep.violations[:3])


def test_a08_support_gauge_properties():
    cone = ConeParams(33.0)
    rng = rng_for(SEED, STREAM_CONE)

    assert float(support_x(np.zeros(77), cone)) == 0.0

    z = rng.standard_normal((200, 77))
    x1 = support_x(z, cone)
    for t in (0.1, 3.0, 10.0):
        xt = support_x(t * z, cone)
        assert np.max(np.abs(xt - t * x1)) <= 1e-9, "homogeneity at t=%r" % t

    z2 = rng.standard_normal((1000, 77))
    z3 = rng.standard_normal((1000, 77))
    gap = support_x(z2 + z3, cone) - support_x(z2, cone) - support_x(z3, cone)
    assert np.max(gap) <= 1e-9, "subadditivity slack %.3e" % np.max(gap)

    pts = rng.standard_normal((1000, 77))
    h = 1e-6
    grad_sq = np.zeros(1000)
    for j in range(77):
        shift = np.zeros(77)
        shift[j] = h
        xp = support_x(pts + shift, cone)
        xm = support_x(pts - shift, cone)
        grad_sq += ((xp - xm) / (2.0 * h)) ** 2
    worst = float(np.sqrt(grad_sq.max()))
    assert worst < SQ12, "|grad x| = %.4f not below sqrt(12)" % worst


def test_a09_zero_level_convergence(sigma2000):
    sigma, cone = sigma2000
    rep = zero_level_curve(sigma, cone, counts=(250, 500, 1000, 2000),
                           heldout_count=200, heldout_seed=7)
    assert rep.worst_ratio <= 5.0, \
        "held-out |F| reaches %.3f x the pair certificate" % rep.worst_ratio
    assert rep.monotone, "curve not decreasing: %r" % (rep.max_abs_F,)
    print("a09 maxF curve:", ["%.4f" % v for v in rep.max_abs_F])


def test_a10_degenerate_ellipticity(sigma2000):
    sigma, cone = sigma2000
    op = OperatorF(sigma.prefix(500), cone)
    worst = monotonicity_sweep(op, 10_000, SEED)
    assert worst >= -1e-9, \
        "psd increment decreased F by %.3e" % max(0.0, -worst)


def test_a11_viscosity_quadratics(sigma2000):
    sigma, cone = sigma2000
    rep = viscosity_probe(OperatorF(sigma, cone), 1000, SEED)
    assert rep.minorant_violations == 0 and rep.minorant_max_F <= 1e-6, \
        "touching minorant with F = %.3e > 1e-6" % rep.minorant_max_F
    assert rep.majorant_violations == 0 and rep.majorant_min_F >= -1e-6, \
        "touching majorant with F = %.3e < -1e-6" % rep.majorant_min_F


def test_a12_finite_difference_oracles():
    rng = rng_for(SEED, STREAM_FDCHECK)
    pts = unit_sphere(rng, 1000) * rng.uniform(0.5, 2.0, (1000, 1))
    worst_g = worst_h = 0.0
    for x in pts:
        g = grad_w(x)
        gf = fd_gradient(eval_w, x)
        worst_g = max(worst_g, float(np.max(np.abs(g - gf))
                                     / max(1.0, np.max(np.abs(g)))))
        hm = hess_w(x)
        hf = fd_jacobian(grad_w, x)
        worst_h = max(worst_h, float(np.max(np.abs(hm - 0.5 * (hf + hf.T)))
                                     / max(1.0, np.max(np.abs(hm)))))
    assert worst_g < 1e-6, "gradient FD relative error %.3e" % worst_g
    assert worst_h < 1e-6, "hessian FD relative error %.3e" % worst_h


def test_a13_negative_control(monkeypatch):
    def flipped(q):
        m = _true_matrix_M(q).copy()
        m[..., 0, 1] = -m[..., 0, 1]
        return m

    monkeypatch.setattr(cubic_mod, "matrix_M", flipped)

    dirs = directions(rng_for(SEED, STREAM_SPECTRAL), 2000)
    vals, closed = spectrum_sweep(dirs)
    mismatch = float(np.max(np.abs(vals - closed)))
    assert mismatch > 1e-8, \
        "corrupted build slipped past the spectrum oracle (%.3e)" % mismatch

    _, r_min, r_max = ratio_bound_estimate(
        rng_for(SEED, STREAM_HESSIAN), 20_000)
    assert r_max > RATIO_BOUND or r_min < 1.0 / RATIO_BOUND, (
        "corrupted build slipped past the ratio pinch: extremes "
        "[%.4f, %.4f] stay inside [1/B, B] with B = 1536 sqrt(3) ~ 2660. "
        "No sign-flip of a structure-matrix entry can widen the ratio "
        "three orders of magnitude (measured across all 16 entries and "
        "all 3 whole-block flips, on random / near / strata pairs), so "
        "this leg of the negative control cannot pass and is left red "
        "deliberately instead of being weakened." % (r_min, r_max))

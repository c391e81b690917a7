"""The degree-2 potential, its Hessian map, and the pairwise bounds."""

import numpy as np
import pytest

from qcubic.cubic import eval_P
from qcubic.hessian import (eval_w, grad_w, hess_w, H, pair_spectrum,
                            pair_ratio_sweep, witness_pair, witness_gaps,
                            witness_sweep, third_derivative_sweep,
                            ratio_bound_estimate, RATIO_BOUND,
                            THIRD_DERIVATIVE_BOUND, WITNESS_SLOPE)
from qcubic.numdiff import (fd_gradient, fd_jacobian, fd_hessian_from_values)
from qcubic.sampling import rng_for, unit_sphere, STREAM_HESSIAN


def _units(seed, count):
    return unit_sphere(rng_for(seed, STREAM_HESSIAN), count)


def test_w_is_cubic_over_radius():
    rng = np.random.default_rng(61)
    x = rng.standard_normal(12) * 2.3
    assert abs(eval_w(x) - eval_P(x) / np.linalg.norm(x)) < 1e-14


def test_w_two_homogeneous():
    rng = np.random.default_rng(62)
    x = rng.standard_normal(12)
    for t in (0.25, 3.0):
        assert abs(eval_w(t * x) - t * t * eval_w(x)) < 1e-12


def test_grad_w_euler_identity():
    # 2-homogeneity: x . grad w = 2 w
    rng = np.random.default_rng(63)
    x = rng.standard_normal(12)
    assert abs(x @ grad_w(x) - 2.0 * eval_w(x)) < 1e-12


def test_grad_w_finite_difference():
    rng = np.random.default_rng(64)
    for _ in range(10):
        x = rng.standard_normal(12)
        assert np.max(np.abs(grad_w(x) - fd_gradient(eval_w, x))) < 1e-8


def test_hess_w_finite_difference():
    rng = np.random.default_rng(65)
    for _ in range(10):
        x = rng.standard_normal(12)
        hm = hess_w(x)
        hf = fd_jacobian(grad_w, x)
        assert np.max(np.abs(hm - 0.5 * (hf + hf.T))) < 1e-7
        hv = fd_hessian_from_values(eval_w, x)
        assert np.max(np.abs(hm - hv)) < 1e-5


def test_hess_w_zero_homogeneous():
    rng = np.random.default_rng(66)
    x = rng.standard_normal(12)
    assert np.max(np.abs(hess_w(3.7 * x) - hess_w(x))) < 1e-12


def test_hess_w_odd():
    rng = np.random.default_rng(67)
    x = rng.standard_normal(12)
    assert np.max(np.abs(hess_w(-x) + hess_w(x))) < 1e-12


def test_laplacian_identity():
    # trace D2w = -15 P on the unit sphere (radial reduction of the cubic)
    a = _units(68, 50)
    traces = np.trace(hess_w(a), axis1=-2, axis2=-1)
    assert np.max(np.abs(traces + 15.0 * eval_P(a))) < 1e-12


def test_H_requires_unit_points():
    a = _units(69, 1)[0]
    assert np.max(np.abs(H(a) - hess_w(a))) == 0.0
    with pytest.raises(ValueError):
        H(2.0 * a)


def test_hess_w_batch_matches_single():
    pts = _units(70, 5) * 1.7
    batch = hess_w(pts)
    for k in range(5):
        assert np.max(np.abs(batch[k] - hess_w(pts[k]))) < 1e-14


def test_pair_spectrum_matches_ratio_sweep():
    a, b = _units(71, 2)
    vals = pair_spectrum(a, b)
    row = pair_ratio_sweep(a[None], b[None])[0]
    assert abs(vals[0] - row[0]) < 1e-10
    assert abs(vals[-1] - row[1]) < 1e-10
    assert abs(-vals[0] / vals[-1] - row[2]) < 1e-10
    with pytest.raises(ValueError):
        pair_spectrum(a, a)


def test_witness_pair_properties():
    a, b = _units(72, 2)
    e, f = witness_pair(a, b)
    assert abs(np.linalg.norm(e) - 1.0) < 1e-12
    assert abs(np.linalg.norm(f) - 1.0) < 1e-12
    # witnesses are orthogonal to both sphere points
    for v in (e, f):
        assert abs(v @ a) < 1e-9
        assert abs(v @ b) < 1e-9


def test_witness_gaps_positive():
    rng = rng_for(73, STREAM_HESSIAN)
    pts = unit_sphere(rng, 40)
    for k in range(20):
        res = witness_gaps(pts[2 * k], pts[2 * k + 1])
        assert res["top_slack"] >= -1e-9, res
        assert res["bottom_slack"] >= -1e-9, res


def test_witness_sweep_matches_pairs():
    a = _units(74, 30)
    b = _units(75, 30)
    top, bottom = witness_sweep(a, b)
    for k in (0, 11, 29):
        res = witness_gaps(a[k], b[k])
        assert abs(top[k] - res["top_slack"]) < 1e-10
        assert abs(bottom[k] - res["bottom_slack"]) < 1e-10
    with pytest.raises(ValueError):
        witness_sweep(a, a)


def test_witness_slope_constant():
    assert abs(WITNESS_SLOPE - 1.0 / (4.0 * np.sqrt(3.0))) < 1e-15


def test_antipodal_pair_is_doubled_hessian():
    a = _units(76, 3)
    d = pair_ratio_sweep(a, -a)
    vals = np.linalg.eigvalsh(2.0 * hess_w(a))
    assert np.max(np.abs(d[:, 0] - vals[:, -1])) < 1e-10
    assert np.max(np.abs(d[:, 1] - vals[:, 0])) < 1e-10


def test_third_derivative_sweep_bounded():
    vals = third_derivative_sweep(rng_for(77, STREAM_HESSIAN), 400)
    assert vals.shape == (400,)
    assert np.max(vals) <= THIRD_DERIVATIVE_BOUND + 1e-3


def test_ratio_bound_estimate():
    m_hat, r_min, r_max = ratio_bound_estimate(rng_for(78, STREAM_HESSIAN), 4000)
    assert 0 < r_min <= r_max
    assert m_hat == pytest.approx(max(r_max, 1.0 / r_min))
    assert r_max <= RATIO_BOUND
    assert r_min >= 1.0 / RATIO_BOUND
    # and same-seed determinism
    again = ratio_bound_estimate(rng_for(78, STREAM_HESSIAN), 4000)
    assert again[0] == m_hat

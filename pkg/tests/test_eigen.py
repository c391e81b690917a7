"""Reference Jacobi solver against LAPACK, both directions."""

import numpy as np
import pytest

from qcubic.eigen import jacobi_eigh, eigvalsh_desc, eigh_desc


def _random_sym(rng, n=12):
    m = rng.standard_normal((n, n))
    return m + m.T


def test_jacobi_matches_lapack():
    rng = np.random.default_rng(1)
    for _ in range(50):
        m = _random_sym(rng)
        vals, vecs = jacobi_eigh(m)
        ref = np.sort(np.linalg.eigvalsh(m))[::-1]
        assert np.max(np.abs(vals - ref)) < 1e-12
        # eigenvector residual
        assert np.max(np.abs(m @ vecs - vecs * vals[None, :])) < 1e-10


def test_jacobi_descending_and_orthogonal():
    rng = np.random.default_rng(2)
    m = _random_sym(rng)
    vals, vecs = jacobi_eigh(m)
    assert np.all(np.diff(vals) <= 0)
    assert np.max(np.abs(vecs.T @ vecs - np.eye(12))) < 1e-12


def test_jacobi_small_sizes():
    rng = np.random.default_rng(3)
    for n in (1, 2, 3, 5):
        m = _random_sym(rng, n)
        vals, _ = jacobi_eigh(m)
        ref = np.sort(np.linalg.eigvalsh(m))[::-1]
        assert np.max(np.abs(vals - ref)) < 1e-12


def test_jacobi_already_diagonal():
    vals, vecs = jacobi_eigh(np.diag([3.0, -1.0, 2.0]))
    assert np.allclose(vals, [3.0, 2.0, -1.0])
    assert np.allclose(np.abs(vecs), np.abs(np.eye(3)[:, [0, 2, 1]]))


def test_batched_descending():
    rng = np.random.default_rng(4)
    mats = rng.standard_normal((40, 12, 12))
    mats = mats + np.swapaxes(mats, -1, -2)
    vals = eigvalsh_desc(mats)
    assert vals.shape == (40, 12)
    assert np.all(np.diff(vals, axis=1) <= 0)
    for k in (0, 17, 39):
        ref = np.sort(np.linalg.eigvalsh(mats[k]))[::-1]
        assert np.max(np.abs(vals[k] - ref)) < 1e-12


def test_eigh_desc_vectors_consistent():
    rng = np.random.default_rng(5)
    mats = rng.standard_normal((7, 12, 12))
    mats = mats + np.swapaxes(mats, -1, -2)
    vals, vecs = eigh_desc(mats)
    recon = np.einsum("nik,nk,njk->nij", vecs, vals, vecs)
    assert np.max(np.abs(recon - mats)) < 1e-11


def test_jacobi_rejects_nonsymmetric():
    with pytest.raises(ValueError):
        jacobi_eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))

"""Coordinates on the 78-dimensional space of symmetric 12x12 matrices.

The inner product throughout is trace(a b).  The basis is frozen:

* index 0: the normalized identity I/sqrt(12) (the "s" axis),
* indices 1..11: traceless diagonal matrices, Helmert pattern
  diag(1,...,1,-k,0,...,0)/sqrt(k(k+1)) with k ones,
* indices 12..77: off-diagonal pairs (E_ij + E_ji)/sqrt(2) in
  lexicographic (i, j) order, i < j.

A symmetric matrix splits as ``mat = s * I/sqrt(12) + embed(z)`` where
``s = trace(mat)/sqrt(12)`` and z holds the 77 traceless coordinates.
Conversions are explicit; nothing here normalizes silently.
"""

from __future__ import annotations

import hashlib

import numpy as np

N = 12
DIM_Z = 77  # traceless coordinates: 11 diagonal + 66 off-diagonal


def _build_basis() -> np.ndarray:
    basis = np.zeros((DIM_Z + 1, N, N))
    basis[0] = np.eye(N) / np.sqrt(N)
    for k in range(1, N):
        d = np.zeros(N)
        d[:k] = 1.0
        d[k] = -float(k)
        basis[k] = np.diag(d / np.sqrt(k * (k + 1)))
    idx = N
    for i in range(N):
        for j in range(i + 1, N):
            basis[idx, i, j] = basis[idx, j, i] = 1.0 / np.sqrt(2.0)
            idx += 1
    return basis


_BASIS = _build_basis()
_BASIS_FLAT = _BASIS.reshape(DIM_Z + 1, N * N)

# Version stamp for cache files: any change to the basis table changes this.
BASIS_HASH = hashlib.sha256(_BASIS.tobytes()).hexdigest()[:16]


def basis() -> np.ndarray:
    """The frozen orthonormal basis, shape (78, 12, 12).  Read-only view."""
    view = _BASIS.view()
    view.flags.writeable = False
    return view


def to_coords(mat: np.ndarray):
    """Split symmetric matrices into (z, s) coordinates.

    mat: (..., 12, 12) symmetric.  Returns z of shape (..., 77) and s of
    shape (...,); s * sqrt(12) is the trace.
    """
    mat = np.asarray(mat, dtype=float)
    flat = mat.reshape(mat.shape[:-2] + (N * N,))
    coords = flat @ _BASIS_FLAT.T
    return coords[..., 1:], coords[..., 0]


def from_coords(z: np.ndarray, s) -> np.ndarray:
    """Inverse of to_coords: rebuild the symmetric matrix."""
    z = np.asarray(z, dtype=float)
    s = np.asarray(s, dtype=float)
    coords = np.concatenate([s[..., None], z], axis=-1)
    flat = coords @ _BASIS_FLAT
    return flat.reshape(z.shape[:-1] + (N, N))


def embed_traceless(z: np.ndarray) -> np.ndarray:
    """Traceless symmetric matrix with coordinates z (zero s component)."""
    z = np.asarray(z, dtype=float)
    flat = z @ _BASIS_FLAT[1:]
    return flat.reshape(z.shape[:-1] + (N, N))

"""Shared dense linear algebra helpers.

Everything here is a thin, opinionated wrapper around numpy's SVD/lstsq
machinery: one rank rule, one orthonormalization rule, one least-squares
solver, used consistently by the rest of the package so that every
decision threshold traces back to a single Tolerance value.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Tolerance:
    """Numerical policy knobs.

    rel       relative tolerance for residual comparisons
    rank_cut  singular values below rank_cut * sigma_max * max(shape)
              are treated as zero
    """

    rel: float = 1e-9
    rank_cut: float = 1e-10

    def __post_init__(self):
        if not (self.rel > 0 and np.isfinite(self.rel)):
            raise ValueError("rel must be positive and finite")
        if not (self.rank_cut > 0 and np.isfinite(self.rank_cut)):
            raise ValueError("rank_cut must be positive and finite")


DEFAULT_TOL = Tolerance()


def as_cmatrix(entries) -> np.ndarray:
    """Coerce to a 2-d complex128 array and reject non-finite entries."""
    a = np.asarray(entries, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix entries must be finite")
    return a


def opnorm(a: np.ndarray) -> float:
    """Spectral (largest singular value) norm."""
    a = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def rank(a, tol: Tolerance = DEFAULT_TOL, scale: float = 0.0) -> int:
    """Numerical rank: count singular values above the relative cut.

    The cut is anchored at the largest singular value, or at `scale` if
    that is larger; pass the natural scale of the data when the whole
    matrix may consist of roundoff noise."""
    a = as_cmatrix(a)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    cut = tol.rank_cut * max(s[0], scale) * max(a.shape)
    return int(np.sum(s > cut))


def fix_column_phases(q: np.ndarray, cut: float = 1e-8) -> np.ndarray:
    """Rotate each column so its first significant entry is real positive.

    Makes SVD/Gram-Schmidt output reproducible up to the underlying
    factorization; columns that are numerically zero are left alone.
    """
    q = np.array(q, dtype=np.complex128, copy=True)
    for j in range(q.shape[1]):
        col = q[:, j]
        idx = np.flatnonzero(np.abs(col) > cut * max(1.0, np.abs(col).max(initial=0.0)))
        if idx.size == 0:
            continue
        pivot = col[idx[0]]
        q[:, j] = col * (np.conj(pivot) / np.abs(pivot))
    return q


def orthonormal_basis(vectors, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the span of the given column vectors.

    Accepts a 2-d array whose columns are the vectors, or a sequence of
    1-d vectors.  Returns a matrix with orthonormal columns spanning the
    same subspace; the empty span gives a (dim, 0) matrix.
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        a = np.asarray(vectors, dtype=np.complex128)
    else:
        cols = [np.asarray(v, dtype=np.complex128).reshape(-1) for v in vectors]
        if not cols:
            return np.zeros((0, 0), dtype=np.complex128)
        a = np.column_stack(cols)
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], 0), dtype=np.complex128)
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("vector entries must be finite")
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[0], 0), dtype=np.complex128)
    cut = tol.rank_cut * s[0] * max(a.shape)
    r = int(np.sum(s > cut))
    return fix_column_phases(u[:, :r])


def nullspace(a, tol: Tolerance = DEFAULT_TOL, scale: float = 0.0) -> np.ndarray:
    """Orthonormal basis of the kernel, via SVD.  `scale` anchors the
    rank cut exactly as in `rank`."""
    a = as_cmatrix(a)
    if a.size == 0:
        return np.eye(a.shape[1], dtype=np.complex128)
    _, s, vh = np.linalg.svd(a)
    cut = tol.rank_cut * max(s[0] if s.size else 0.0, scale) * max(a.shape)
    r = int(np.sum(s > cut))
    return fix_column_phases(vh[r:].conj().T)


def complement_basis(q: np.ndarray, dim: int, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(q) in C^dim."""
    q = np.asarray(q, dtype=np.complex128)
    if q.size == 0:
        return np.eye(dim, dtype=np.complex128)
    return nullspace(q.conj().T, tol)


def solve_min_norm(a, b, tol: Tolerance = DEFAULT_TOL):
    """Minimum-norm least-squares solution of a x = b.

    Returns (x, residual) where residual is the Frobenius norm of a x - b,
    recomputed explicitly (the lstsq residual output is unreliable for
    rank-deficient systems).
    """
    a = as_cmatrix(a)
    b_arr = np.asarray(b, dtype=np.complex128)
    b2 = b_arr.reshape(-1, 1) if b_arr.ndim == 1 else b_arr
    if b2.shape[0] != a.shape[0]:
        raise ValueError(f"shape mismatch: a is {a.shape}, b has {b2.shape[0]} rows")
    rcond = tol.rank_cut * max(a.shape)
    x, _, _, _ = np.linalg.lstsq(a, b2, rcond=rcond)
    residual = float(np.linalg.norm(a @ x - b2))
    if b_arr.ndim == 1:
        x = x[:, 0]
    return x, residual


def projector(q: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the span of orthonormal columns q."""
    q = np.asarray(q, dtype=np.complex128)
    n = q.shape[0]
    if q.size == 0:
        return np.zeros((n, n), dtype=np.complex128)
    return q @ q.conj().T

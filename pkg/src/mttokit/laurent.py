"""Matrix- and vector-valued Laurent polynomials on the unit circle.

A value F with support [lo, hi] is stored as the dense block list
[F_lo, ..., F_hi]; all algebra happens on coefficients, never through
sampling.  Support endpoints are explicit: construction trims blocks that
are exactly zero but nothing is ever truncated by tolerance behind the
caller's back.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError


def _validate_coeffs(coeffs, block_ndim: int) -> np.ndarray:
    a = np.asarray(coeffs, dtype=np.complex128)
    if a.ndim != block_ndim + 1:
        raise ValueError(f"expected {block_ndim + 1}-d coefficient array, got shape {a.shape}")
    if a.shape[0] == 0:
        raise ValueError("need at least one coefficient block")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("coefficients must be finite")
    return a


def _trim(lo: int, coeffs: np.ndarray):
    """Drop exactly-zero edge blocks; canonical zero sits at frequency 0."""
    nz = [k for k in range(coeffs.shape[0]) if np.any(coeffs[k])]
    if not nz:
        return 0, np.zeros((1,) + coeffs.shape[1:], dtype=np.complex128)
    return lo + nz[0], np.ascontiguousarray(coeffs[nz[0] : nz[-1] + 1])


class _Laurent:
    """Support bookkeeping shared by the matrix and vector flavours."""

    _block_ndim = None  # set by subclasses

    def __init__(self, lo: int, coeffs):
        coeffs = _validate_coeffs(coeffs, self._block_ndim)
        self.lo, self.coeffs = _trim(int(lo), coeffs)

    @property
    def hi(self) -> int:
        return self.lo + self.coeffs.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    def coeff(self, k: int) -> np.ndarray:
        """Coefficient block at frequency k (zero outside the support)."""
        if self.lo <= k <= self.hi:
            return self.coeffs[k - self.lo]
        return np.zeros(self.coeffs.shape[1:], dtype=np.complex128)

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def shift(self, k: int):
        """Multiply by z**k (frequency shift)."""
        return type(self)(self.lo + k, self.coeffs)

    def reverse(self):
        """Substitute z -> 1/z: coefficient at k moves to -k."""
        return type(self)(-self.hi, self.coeffs[::-1])

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def _binop_coeffs(self, other, sign):
        if not isinstance(other, type(self)):
            return None
        if other.dim != self.dim:
            raise DimensionMismatchError(f"dimension mismatch: {self.dim} vs {other.dim}")
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        out = np.zeros((hi - lo + 1,) + self.coeffs.shape[1:], dtype=np.complex128)
        out[self.lo - lo : self.hi - lo + 1] = self.coeffs
        out[other.lo - lo : other.hi - lo + 1] += sign * other.coeffs
        return type(self)(lo, out)

    def __add__(self, other):
        out = self._binop_coeffs(other, 1)
        return NotImplemented if out is None else out

    def __sub__(self, other):
        out = self._binop_coeffs(other, -1)
        return NotImplemented if out is None else out

    def __neg__(self):
        return type(self)(self.lo, -self.coeffs)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return type(self)(self.lo, self.coeffs * complex(scalar))

    __rmul__ = __mul__

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, support=[{self.lo},{self.hi}])"


class MatLaurent(_Laurent):
    """Laurent polynomial with d x d matrix coefficients."""

    _block_ndim = 2

    def __init__(self, lo: int, coeffs):
        super().__init__(lo, coeffs)
        if self.coeffs.shape[1] != self.coeffs.shape[2]:
            raise ValueError("matrix coefficients must be square")

    @classmethod
    def constant(cls, mat) -> "MatLaurent":
        return cls(0, np.asarray(mat, dtype=np.complex128)[np.newaxis])

    @classmethod
    def zero(cls, dim: int) -> "MatLaurent":
        return cls(0, np.zeros((1, dim, dim)))

    @classmethod
    def identity(cls, dim: int) -> "MatLaurent":
        return cls.constant(np.eye(dim))

    def __matmul__(self, other):
        if isinstance(other, (MatLaurent, VecLaurent)):
            return multiply(self, other)
        return NotImplemented


class VecLaurent(_Laurent):
    """Laurent polynomial with vectors in C^d as coefficients."""

    _block_ndim = 1

    @classmethod
    def constant(cls, vec) -> "VecLaurent":
        return cls(0, np.asarray(vec, dtype=np.complex128)[np.newaxis])

    @classmethod
    def zero(cls, dim: int) -> "VecLaurent":
        return cls(0, np.zeros((1, dim)))


def multiply(f: MatLaurent, g):
    """Pointwise product F(z) G(z) by block convolution.

    g may be matrix- or vector-valued; the result has the same flavour.
    """
    if not isinstance(f, MatLaurent):
        raise TypeError("left factor must be a MatLaurent")
    if not isinstance(g, (MatLaurent, VecLaurent)):
        raise TypeError("right factor must be a MatLaurent or VecLaurent")
    if f.dim != g.dim:
        raise DimensionMismatchError(f"dimension mismatch: {f.dim} vs {g.dim}")
    nf, ng = f.coeffs.shape[0], g.coeffs.shape[0]
    out = np.zeros((nf + ng - 1,) + g.coeffs.shape[1:], dtype=np.complex128)
    for i in range(nf):
        blocks = np.einsum("ab,kb...->ka...", f.coeffs[i], g.coeffs)
        out[i : i + ng] += blocks
    return type(g)(f.lo + g.lo, out)


def boundary_adjoint(f: MatLaurent) -> MatLaurent:
    """Pointwise adjoint on the circle: F(z)* has coefficient (F_{-k})* at k."""
    adj = np.conj(np.transpose(f.coeffs[::-1], (0, 2, 1)))
    return MatLaurent(-f.hi, adj)


def tilde(f: MatLaurent) -> MatLaurent:
    """F~(z) = F(conj(z))*: every coefficient is replaced by its adjoint."""
    return MatLaurent(f.lo, np.conj(np.transpose(f.coeffs, (0, 2, 1))))


def evaluate(f, z: complex) -> np.ndarray:
    """Evaluate at a point.  z = 0 needs a nonnegative support."""
    z = complex(z)
    shape = f.coeffs.shape[1:]
    if z == 0:
        if f.lo < 0:
            raise ZeroDivisionError("cannot evaluate negative frequencies at z = 0")
        return f.coeff(0).copy()
    # split into Horner evaluations in z (analytic part) and 1/z (the rest)
    out = np.zeros(shape, dtype=np.complex128)
    if f.hi >= 0:
        acc = np.zeros(shape, dtype=np.complex128)
        for k in range(f.hi, max(f.lo, 0) - 1, -1):
            acc = acc * z + f.coeff(k)
        out += acc * z ** max(f.lo, 0)
    if f.lo < 0:
        w = 1.0 / z
        acc = np.zeros(shape, dtype=np.complex128)
        for k in range(f.lo, min(f.hi, -1) + 1):
            acc = acc * w + f.coeff(k)
        out += acc * w
    return out


def l2_inner(f: VecLaurent, g: VecLaurent) -> complex:
    """L^2 inner product on the circle, linear in the first argument."""
    if f.dim != g.dim:
        raise DimensionMismatchError(f"dimension mismatch: {f.dim} vs {g.dim}")
    lo = max(f.lo, g.lo)
    hi = min(f.hi, g.hi)
    total = 0.0 + 0.0j
    for k in range(lo, hi + 1):
        total += np.vdot(g.coeff(k), f.coeff(k))
    return complex(total)


def hs_inner(f: MatLaurent, g: MatLaurent) -> complex:
    """Hilbert-Schmidt-valued L^2 pairing: sum of trace(G_k* F_k)."""
    if f.dim != g.dim:
        raise DimensionMismatchError(f"dimension mismatch: {f.dim} vs {g.dim}")
    lo = max(f.lo, g.lo)
    hi = min(f.hi, g.hi)
    total = 0.0 + 0.0j
    for k in range(lo, hi + 1):
        total += np.trace(g.coeff(k).conj().T @ f.coeff(k))
    return complex(total)


def analytic_split(f: MatLaurent):
    """Write F = F_plus + (F_star)* with F_plus, F_star both analytic.

    F_plus keeps the frequencies >= 0; F_star collects the rest, so its
    support starts at 1 (or it is zero).  Recomposition is exact.
    """
    d = f.dim
    if f.hi >= 0:
        plus = MatLaurent(max(f.lo, 0), f.coeffs[max(f.lo, 0) - f.lo :])
    else:
        plus = MatLaurent.zero(d)
    if f.lo < 0:
        neg = f.coeffs[: min(f.hi, -1) - f.lo + 1]  # frequencies lo..-1
        star = np.conj(np.transpose(neg[::-1], (0, 2, 1)))  # F_star_j = (F_{-j})*
        f_star = MatLaurent(1, star)
    else:
        f_star = MatLaurent.zero(d)
    return plus, f_star


def inner_residual(theta: MatLaurent) -> float:
    """Largest deviation of the coefficient products sum_k A_k* A_{k+j}
    from delta_{j0} I, i.e. how far Theta*Theta is from the constant I."""
    if theta.lo < 0:
        raise ValueError("inner test requires an analytic argument")
    prod = multiply(boundary_adjoint(theta), theta)
    worst = 0.0
    eye = np.eye(theta.dim)
    for k in range(prod.lo, prod.hi + 1):
        target = eye if k == 0 else 0.0
        worst = max(worst, float(np.linalg.norm(prod.coeff(k) - target)))
    return worst


def is_inner(theta: MatLaurent, tol: float = 1e-10) -> bool:
    """Unitary-valued on the circle, tested exactly on coefficients."""
    return inner_residual(theta) <= tol


def purity_margin(theta: MatLaurent) -> float:
    """1 - ||Theta(0)|| in operator norm; positive means pure."""
    if theta.lo < 0:
        raise ValueError("purity is only defined for analytic arguments")
    return 1.0 - float(np.linalg.norm(theta.coeff(0), 2))


def is_pure(theta: MatLaurent, slack: float = 1e-9) -> bool:
    """Strict contraction at the origin, with a numerical safety margin."""
    return purity_margin(theta) > slack

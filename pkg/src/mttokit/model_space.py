"""Model spaces of polynomial matrix inner functions.

For an inner Theta of degree m with values in the d x d matrices, the
model space is the orthogonal complement of Theta H^2 inside H^2 of
C^d-valued functions.  Because every zero of Theta sits at the origin,
z^m H^2 is contained in Theta H^2 and the whole space embeds in the
polynomials of degree < m; all computations happen in that m*d
dimensional coefficient window.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import serialize
from .errors import (
    IdentityCheckError,
    NotInnerError,
    NotProjectionError,
    NotPureError,
    NotUnitaryError,
    ParseError,
)
from .laurent import (
    MatLaurent,
    VecLaurent,
    boundary_adjoint,
    evaluate,
    inner_residual,
    multiply,
    purity_margin,
    tilde,
)
from .numerics import DEFAULT_TOL, Tolerance, fix_column_phases, nullspace, rank

INNER_COEFF_TOL = 1e-10


def det_degree(theta: MatLaurent, cut: float = 1e-8) -> int:
    """Degree of det Theta(z), by exact polynomial expansion.

    Permutation expansion with scalar convolutions; fine for the small
    d this package targets.
    """
    if theta.lo < 0:
        raise ValueError("determinant degree needs an analytic argument")
    d = theta.dim
    width = theta.hi * d + 1
    total = np.zeros(width, dtype=np.complex128)
    pad = np.zeros(theta.hi + 1, dtype=np.complex128)
    for perm in itertools.permutations(range(d)):
        sign = 1.0
        seen = list(perm)
        for i in range(d):  # parity by counting inversions
            for j in range(i + 1, d):
                if seen[i] > seen[j]:
                    sign = -sign
        term = np.array([1.0 + 0.0j])
        for i in range(d):
            pad[:] = 0.0
            for k in range(theta.lo, theta.hi + 1):
                pad[k] = theta.coeff(k)[i, perm[i]]
            term = np.convolve(term, pad)
        total[: term.size] += sign * term
    mags = np.abs(total)
    big = np.flatnonzero(mags > cut * max(1.0, mags.max()))
    return int(big[-1]) if big.size else 0


def _constraint_matrix(theta: MatLaurent) -> np.ndarray:
    """Map sending the coefficients of a degree-<m polynomial f to the
    analytic-part coefficients of Theta* f; its kernel is the model space."""
    d, m = theta.dim, theta.hi
    c = np.zeros((m * d, m * d), dtype=np.complex128)
    for k in range(m):
        for j in range(m):
            c[k * d : (k + 1) * d, j * d : (j + 1) * d] = theta.coeff(j - k).conj().T
    return c


class InnerFunction:
    """A validated pure polynomial matrix inner function.

    Construction checks the coefficient identities for unitarity on the
    circle and strict contractivity at the origin, and computes the model
    space dimension n two independent ways (constraint-map nullity and
    determinant degree), refusing to continue if they disagree.
    """

    def __init__(self, theta: MatLaurent, tol: Tolerance = DEFAULT_TOL, _potapov=None):
        if theta.lo < 0:
            raise NotInnerError("inner functions must be analytic")
        res = inner_residual(theta)
        if res > INNER_COEFF_TOL:
            raise NotInnerError(f"coefficient unitarity residual {res:.3e}")
        if purity_margin(theta) <= tol.rel:
            raise NotPureError("value at the origin is not a strict contraction")
        self.theta = theta
        self.d = theta.dim
        self.m = theta.hi
        self._potapov = _potapov
        nullity = self.m * self.d - rank(_constraint_matrix(theta), tol, scale=1.0)
        deg = det_degree(theta)
        if nullity != deg:
            raise IdentityCheckError(
                f"model dimension mismatch: constraint nullity {nullity}, det degree {deg}"
            )
        self.n = nullity

    def __repr__(self):
        return f"InnerFunction(d={self.d}, m={self.m}, n={self.n})"

    def evaluate(self, z: complex) -> np.ndarray:
        return evaluate(self.theta, z)

    def tilde(self) -> "InnerFunction":
        """Coefficient-adjointed partner; swaps the roles of the two
        defect spaces and of the shift with its adjoint."""
        return InnerFunction(tilde(self.theta))

    def to_json(self) -> dict:
        doc = {"schema_version": serialize.SCHEMA_VERSION}
        if self._potapov is not None:
            u, factors = self._potapov
            doc["kind"] = "potapov"
            doc["left_unitary"] = serialize.matrix_to_json(u)
            doc["factors"] = [serialize.matrix_to_json(p) for p in factors]
        else:
            doc["kind"] = "coeffs"
            doc["laurent"] = serialize.laurent_to_json(self.theta)
        return doc


def make_inner_potapov(factors, left_unitary=None, tol: Tolerance = DEFAULT_TOL) -> InnerFunction:
    """Product U (I - P_1 + z P_1) ... (I - P_r + z P_r) of elementary
    factors built from orthogonal projections P_j."""
    mats = [np.asarray(p, dtype=np.complex128) for p in factors]
    if not mats:
        raise ValueError("need at least one factor")
    d = mats[0].shape[0]
    u = np.eye(d, dtype=np.complex128) if left_unitary is None else np.asarray(left_unitary, dtype=np.complex128)
    if u.shape != (d, d):
        raise NotUnitaryError(f"left unitary must be {d} x {d}")
    if np.linalg.norm(u.conj().T @ u - np.eye(d)) > 1e-10:
        raise NotUnitaryError("left factor is not unitary")
    theta = MatLaurent.constant(u)
    eye = np.eye(d)
    for p in mats:
        if p.shape != (d, d):
            raise NotProjectionError("factor dimensions disagree")
        if np.linalg.norm(p - p.conj().T) > 1e-10 or np.linalg.norm(p @ p - p) > 1e-10:
            raise NotProjectionError("factor is not an orthogonal projection")
        theta = multiply(theta, MatLaurent(0, np.stack([eye - p, p])))
    return InnerFunction(theta, tol, _potapov=(u, mats))


def inner_from_json(obj) -> InnerFunction:
    try:
        kind = obj["kind"]
    except (KeyError, TypeError) as exc:
        raise ParseError("inner function payload needs a 'kind' field") from exc
    if kind == "potapov":
        try:
            factors = [serialize.json_to_matrix(p) for p in obj["factors"]]
            u = serialize.json_to_matrix(obj["left_unitary"]) if obj.get("left_unitary") is not None else None
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad potapov payload: {exc}") from exc
        return make_inner_potapov(factors, u)
    if kind == "coeffs":
        if "laurent" not in obj:
            raise ParseError("coeffs payload needs a 'laurent' field")
        return InnerFunction(serialize.json_to_mat_laurent(obj["laurent"]))
    raise ParseError(f"unknown inner function kind {kind!r}")


class ModelSpaceBasis:
    """Deterministic orthonormal basis of the model space.

    The basis comes from Gram-Schmidt applied to the projections of the
    ambient coordinate vectors, taken in a fixed order, with each column's
    first significant entry rotated to the positive real axis.  The same
    Theta therefore always yields the same basis, which is what makes
    operator matrices comparable across runs.
    """

    def __init__(self, inner: InnerFunction, tol: Tolerance = DEFAULT_TOL):
        self.inner = inner
        self.tol = tol
        d, m, n = inner.d, inner.m, inner.n
        amb = m * d
        null = nullspace(_constraint_matrix(inner.theta), tol, scale=1.0)
        if null.shape[1] != n:
            raise IdentityCheckError("nullspace dimension disagrees with model dimension")
        proj = null @ null.conj().T
        accepted = []
        for j in range(amb):
            v = proj[:, j].copy()
            for _ in range(2):  # re-orthogonalize for stability
                for u in accepted:
                    v -= u * np.vdot(u, v)
            nv = np.linalg.norm(v)
            if nv > 1e-7:
                accepted.append(v / nv)
        if len(accepted) != n:
            raise IdentityCheckError(
                f"pivoted orthogonalization found {len(accepted)} directions, expected {n}"
            )
        self.q = fix_column_phases(np.column_stack(accepted)) if accepted else np.zeros((amb, 0), dtype=np.complex128)
        self._basis_id = None

    @property
    def n(self) -> int:
        return self.inner.n

    @property
    def basis_id(self) -> str:
        if self._basis_id is None:
            payload = {
                "theta": serialize.laurent_to_json(self.inner.theta),
                "basis": serialize.array_to_json(self.q),
            }
            self._basis_id = serialize.stable_hash(payload)
        return self._basis_id

    def embed_window(self, f: VecLaurent) -> np.ndarray:
        """Stack the coefficients of frequencies 0..m-1 (all that the
        model space can see) into one ambient vector."""
        d, m = self.inner.d, self.inner.m
        v = np.zeros(m * d, dtype=np.complex128)
        for k in range(max(f.lo, 0), min(f.hi, m - 1) + 1):
            v[k * d : (k + 1) * d] = f.coeff(k)
        return v

    def coords(self, f: VecLaurent) -> np.ndarray:
        """Coefficients against the basis; for f outside the model space
        these are the coordinates of its orthogonal projection."""
        if f.dim != self.inner.d:
            raise ValueError(f"dimension mismatch: {f.dim} vs {self.inner.d}")
        return self.q.conj().T @ self.embed_window(f)

    def from_coords(self, c) -> VecLaurent:
        c = np.asarray(c, dtype=np.complex128).reshape(-1)
        if c.size != self.n:
            raise ValueError(f"expected {self.n} coordinates, got {c.size}")
        amb = self.q @ c
        return VecLaurent(0, amb.reshape(self.inner.m, self.inner.d))

    def element(self, j: int) -> VecLaurent:
        return VecLaurent(0, self.q[:, j].reshape(self.inner.m, self.inner.d))

    def project(self, g: VecLaurent) -> VecLaurent:
        return self.from_coords(self.coords(g))

    def membership_residual(self, f: VecLaurent) -> float:
        """Distance witness for membership: energy at negative frequencies
        plus the analytic part of Theta* f."""
        neg = 0.0
        for k in range(f.lo, min(f.hi, -1) + 1):
            neg += float(np.linalg.norm(f.coeff(k)) ** 2)
        g = multiply(boundary_adjoint(self.inner.theta), f)
        pos = 0.0
        for k in range(max(g.lo, 0), g.hi + 1):
            pos += float(np.linalg.norm(g.coeff(k)) ** 2)
        return float(np.sqrt(neg + pos))


def model_dim(inner: InnerFunction) -> int:
    return inner.n


def kernel(basis: ModelSpaceBasis, lam: complex, x, return_witness: bool = False):
    """Reproducing kernel direction at lam applied to x in C^d.

    Computed by multiplying (I - Theta(z) Theta(lam)*) x with the
    geometric series of 1/(1 - conj(lam) z); the product must break off
    at degree m-1, and the discarded tail is checked against that.
    """
    inner = basis.inner
    lam = complex(lam)
    if abs(lam) >= 1:
        raise ValueError("kernel points must lie in the open unit disk")
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    if x.size != inner.d:
        raise ValueError(f"expected a vector in C^{inner.d}")
    m, d = inner.m, inner.d
    g = np.zeros((m + 1, d), dtype=np.complex128)
    g[0] = x
    tx = inner.evaluate(lam).conj().T @ x
    for k in range(m + 1):
        g[k] -= inner.theta.coeff(k) @ tx
    lb = np.conj(lam)
    c = np.zeros((2 * m + 1, d), dtype=np.complex128)
    for k in range(2 * m + 1):
        for i in range(0, min(k, m) + 1):
            c[k] += lb ** (k - i) * g[i]
    scale = 1.0 + float(np.linalg.norm(x))
    tail = float(np.linalg.norm(c[m:]))
    if tail > 1e-9 * scale:
        raise IdentityCheckError(f"kernel truncation tail {tail:.3e} did not vanish")
    out = VecLaurent(0, c[:m])
    mem = basis.membership_residual(out)
    if mem > 1e-9 * scale:
        raise IdentityCheckError(f"kernel left the model space, residual {mem:.3e}")
    return (out, tail) if return_witness else out


def tilde_kernel(basis: ModelSpaceBasis, lam: complex, y, return_witness: bool = False):
    """Difference-quotient kernel (Theta(z) - Theta(lam)) y / (z - lam),
    computed by synthetic division (exact in coefficients)."""
    inner = basis.inner
    lam = complex(lam)
    if abs(lam) >= 1:
        raise ValueError("kernel points must lie in the open unit disk")
    y = np.asarray(y, dtype=np.complex128).reshape(-1)
    if y.size != inner.d:
        raise ValueError(f"expected a vector in C^{inner.d}")
    m, d = inner.m, inner.d
    p = np.zeros((m + 1, d), dtype=np.complex128)
    for k in range(m + 1):
        p[k] = inner.theta.coeff(k) @ y
    p[0] -= inner.evaluate(lam) @ y
    q = np.zeros((m, d), dtype=np.complex128)
    q[m - 1] = p[m]
    for k in range(m - 1, 0, -1):
        q[k - 1] = p[k] + lam * q[k]
    rem = float(np.linalg.norm(p[0] + lam * q[0]))
    scale = 1.0 + float(np.linalg.norm(y))
    if rem > 1e-9 * scale:
        raise IdentityCheckError(f"synthetic division remainder {rem:.3e} did not vanish")
    out = VecLaurent(0, q)
    mem = basis.membership_residual(out)
    if mem > 1e-9 * scale:
        raise IdentityCheckError(f"difference-quotient kernel left the model space, residual {mem:.3e}")
    return (out, rem) if return_witness else out


def _theta_of(obj) -> MatLaurent:
    return obj.theta if isinstance(obj, InnerFunction) else obj


def tau_apply(theta, f: VecLaurent) -> VecLaurent:
    """Unitary map intertwining the model space of Theta with that of its
    coefficient-adjointed partner: frequency-reverse f, multiply by the
    coefficient-adjointed Theta, shift down by one."""
    th = _theta_of(theta)
    return multiply(tilde(th), f.reverse()).shift(-1)


def tau_adjoint_apply(theta, f: VecLaurent) -> VecLaurent:
    th = _theta_of(theta)
    return multiply(th, f.reverse()).shift(-1)


class SymbolSpaceBasis:
    """Orthonormal basis of the analytic matrix symbols orthogonal to
    Theta H^2 of matrices: the functions whose columns all lie in the
    model space.  Elements place one model-space basis function in one
    column slot, so there are n*d of them."""

    def __init__(self, basis: ModelSpaceBasis):
        self.basis = basis
        inner = basis.inner
        d, m, n = inner.d, inner.m, inner.n
        self.elements = []
        self.index = []
        for slot in range(d):
            for j in range(n):
                coeffs = np.zeros((m, d, d), dtype=np.complex128)
                coeffs[:, :, slot] = basis.q[:, j].reshape(m, d)
                self.elements.append(MatLaurent(0, coeffs))
                self.index.append((slot, j))

    def __len__(self):
        return len(self.elements)


def symbol_space_basis(basis: ModelSpaceBasis) -> SymbolSpaceBasis:
    return SymbolSpaceBasis(basis)


def symbol_space_dim_bruteforce(basis: ModelSpaceBasis) -> int:
    """Dimension of the symbol space found by brute force: nullity of the
    analytic-part constraint on matrix polynomials of degree < m."""
    inner = basis.inner
    d, m = inner.d, inner.m
    eye = np.eye(d)
    c = np.zeros((m * d * d, m * d * d), dtype=np.complex128)
    for k in range(m):
        for j in range(m):
            blk = np.kron(inner.theta.coeff(j - k).conj().T, eye)
            c[k * d * d : (k + 1) * d * d, j * d * d : (j + 1) * d * d] = blk
    return m * d * d - rank(c, basis.tol, scale=1.0)

"""Operators on a model space, as matrices in its deterministic basis.

The compressed shift, its defect spaces, the maps that invert the defect
operators on their ranges, rank-d modifications of the shift, and the
conjugation induced by a symmetric unitary all live here.  Everything is
an n x n matrix tied to a ModelSpaceBasis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IdentityCheckError, NotGammaSymmetricError, NotUnitaryError
from .laurent import MatLaurent, VecLaurent, multiply
from .model_space import ModelSpaceBasis, kernel, tilde_kernel
from .numerics import DEFAULT_TOL, complement_basis, opnorm, orthonormal_basis, projector, rank


@dataclass
class OperatorMatrix:
    """An operator on the model space in basis coordinates."""

    basis: ModelSpaceBasis
    mat: np.ndarray

    def __post_init__(self):
        self.mat = np.asarray(self.mat, dtype=np.complex128)
        n = self.basis.n
        if self.mat.shape != (n, n):
            raise ValueError(f"operator matrix must be {n} x {n}, got {self.mat.shape}")
        if not np.all(np.isfinite(self.mat.real)) or not np.all(np.isfinite(self.mat.imag)):
            raise ValueError("operator entries must be finite")

    def apply(self, f: VecLaurent) -> VecLaurent:
        return self.basis.from_coords(self.mat @ self.basis.coords(f))

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.basis, self.mat.conj().T)

    def to_json(self) -> dict:
        from . import serialize

        return {
            "schema_version": serialize.SCHEMA_VERSION,
            "n": self.basis.n,
            "basis_id": self.basis.basis_id,
            "entries": serialize.matrix_to_json(self.mat),
        }


def matrix_of(a) -> np.ndarray:
    return a.mat if isinstance(a, OperatorMatrix) else np.asarray(a, dtype=np.complex128)


def _backshift(f: VecLaurent) -> VecLaurent:
    """(f - f(0)) / z for analytic f."""
    return (f - VecLaurent.constant(f.coeff(0))).shift(-1)


def s_theta(basis: ModelSpaceBasis, check_tol: float = 1e-10):
    """Compressed shift and its adjoint, each assembled from its own
    action (compress z f, respectively drop the constant term and divide
    by z) and cross-checked against conjugate transposition."""
    n = basis.n
    s = np.zeros((n, n), dtype=np.complex128)
    s_adj = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        e = basis.element(j)
        s[:, j] = basis.coords(e.shift(1))
        s_adj[:, j] = basis.coords(_backshift(e))
    if np.linalg.norm(s_adj - s.conj().T) > check_tol:
        raise IdentityCheckError("adjoint shift disagrees with conjugate transpose")
    return OperatorMatrix(basis, s), OperatorMatrix(basis, s_adj)


@dataclass
class DefectSpaces:
    """Ranges of I - S S* and I - S* S, each of dimension d.

    d_basis / dt_basis are orthonormal column collections in basis
    coordinates; d_frame / dt_frame are the raw kernel frames at the
    origin (column j comes from the j-th coordinate vector of C^d).
    """

    d_basis: np.ndarray
    dt_basis: np.ndarray
    d_frame: np.ndarray
    dt_frame: np.ndarray

    @property
    def dim(self) -> int:
        return self.d_basis.shape[1]


def defect_spaces(basis: ModelSpaceBasis, tol=DEFAULT_TOL) -> DefectSpaces:
    inner = basis.inner
    d = inner.d
    eye = np.eye(d)
    k0 = np.column_stack([basis.coords(kernel(basis, 0.0, eye[:, i])) for i in range(d)])
    kt0 = np.column_stack([basis.coords(tilde_kernel(basis, 0.0, eye[:, i])) for i in range(d)])
    d_basis = orthonormal_basis(k0, tol)
    dt_basis = orthonormal_basis(kt0, tol)
    if d_basis.shape[1] != d or dt_basis.shape[1] != d:
        raise IdentityCheckError("defect spaces did not come out d-dimensional")
    s, s_adj = s_theta(basis)
    n = basis.n
    g = np.eye(n) - s.mat @ s_adj.mat
    gt = np.eye(n) - s_adj.mat @ s.mat
    for gg, qq, label in ((g, d_basis, "range of I - S S*"), (gt, dt_basis, "range of I - S* S")):
        if rank(gg, tol) != d:
            raise IdentityCheckError(f"{label} has unexpected rank")
        resid = np.linalg.norm(gg - projector(qq) @ gg)
        if resid > 1e-9 * max(1.0, np.linalg.norm(gg)):
            raise IdentityCheckError(f"{label} escapes its computed basis, residual {resid:.3e}")
    return DefectSpaces(d_basis, dt_basis, k0, kt0)


def eval0_matrix(basis: ModelSpaceBasis) -> np.ndarray:
    """Matrix of the evaluation-at-origin map, coordinates -> C^d."""
    return basis.q[: basis.inner.d, :]


def action_check(basis: ModelSpaceBasis, tol: float = 1e-9) -> dict:
    """Exercise the closed-form action of the shift pair on the defect
    decomposition and the containments between the pieces."""
    inner = basis.inner
    d, n = inner.d, basis.n
    s, s_adj = s_theta(basis)
    ds = defect_spaces(basis)
    p_d = projector(ds.d_basis)
    p_dt = projector(ds.dt_basis)
    comp_d = complement_basis(ds.d_basis, n)
    comp_dt = complement_basis(ds.dt_basis, n)
    theta0 = inner.theta.coeff(0)
    eye = np.eye(d)
    checks = []

    def record(name, residual):
        checks.append({"name": name, "residual": float(residual)})

    worst = 0.0
    for j in range(comp_dt.shape[1]):
        f = basis.from_coords(comp_dt[:, j])
        sf = basis.from_coords(s.mat @ comp_dt[:, j])
        worst = max(worst, (f.shift(1) - sf).norm())
    record("shift acts as multiplication off the second defect space", worst)

    worst = 0.0
    for i in range(d):
        lhs = s.mat @ basis.coords(tilde_kernel(basis, 0.0, eye[:, i]))
        rhs = -basis.coords(kernel(basis, 0.0, theta0 @ eye[:, i]))
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    record("shift sends difference-quotient directions into the first defect space", worst)

    worst = 0.0
    for j in range(comp_d.shape[1]):
        f = basis.from_coords(comp_d[:, j])
        bf = basis.from_coords(s_adj.mat @ comp_d[:, j])
        worst = max(worst, (_backshift(f) - bf).norm())
        worst = max(worst, float(np.linalg.norm(f.coeff(0))))  # those f vanish at 0
    record("adjoint shift divides by z off the first defect space", worst)

    worst = 0.0
    for i in range(d):
        lhs = s_adj.mat @ basis.coords(kernel(basis, 0.0, eye[:, i]))
        rhs = -basis.coords(tilde_kernel(basis, 0.0, theta0.conj().T @ eye[:, i]))
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    record("adjoint shift sends kernel directions into the second defect space", worst)

    record("shift maps second defect space into first", opnorm((np.eye(n) - p_d) @ s.mat @ p_dt))
    record("shift maps second complement into first complement", opnorm(p_d @ s.mat @ (np.eye(n) - p_dt)))
    record("adjoint shift maps first defect space into second", opnorm((np.eye(n) - p_dt) @ s_adj.mat @ p_d))
    record("adjoint shift maps first complement into second complement", opnorm(p_dt @ s_adj.mat @ (np.eye(n) - p_d)))

    g = np.eye(n) - s.mat @ s_adj.mat
    record(
        "defect operator is evaluation at zero followed by the kernel frame",
        opnorm(g - ds.d_frame @ eval0_matrix(basis)),
    )

    max_residual = max(c["residual"] for c in checks)
    return {"checks": checks, "max_residual": max_residual, "pass": max_residual <= tol}


def omega(basis: ModelSpaceBasis, ds: DefectSpaces, tol=DEFAULT_TOL) -> np.ndarray:
    """Left inverse of the kernel frame: the map sending the defect
    vector built from x back to x, extended by zero off the defect space."""
    om = np.linalg.pinv(ds.d_frame, rcond=tol.rank_cut * max(ds.d_frame.shape))
    resid = np.linalg.norm(om @ ds.d_frame - np.eye(ds.dim))
    if resid > 1e-9:
        raise IdentityCheckError(f"defect frame inversion residual {resid:.3e}")
    return om


def j_operators(basis: ModelSpaceBasis, ds: DefectSpaces, tol=DEFAULT_TOL):
    """Pseudo-inverses of the two defect operators.

    J satisfies (I - S S*) J = J* (I - S S*) = projector onto the first
    defect space, and likewise for the second; both identities are
    verified before returning.
    """
    s, s_adj = s_theta(basis)
    n = basis.n
    rcond = tol.rank_cut * n
    g = np.eye(n) - s.mat @ s_adj.mat
    gt = np.eye(n) - s_adj.mat @ s.mat
    j = np.linalg.pinv(g, rcond=rcond, hermitian=True)
    jt = np.linalg.pinv(gt, rcond=rcond, hermitian=True)
    p_d = projector(ds.d_basis)
    p_dt = projector(ds.dt_basis)
    for lhs, label in (
        (g @ j - p_d, "G J"),
        (j.conj().T @ g - p_d, "J* G"),
        (gt @ jt - p_dt, "Gt Jt"),
        (jt.conj().T @ gt - p_dt, "Jt* Gt"),
    ):
        if opnorm(lhs) > 1e-9:
            raise IdentityCheckError(f"{label} is not the defect projector")
    return j, jt


def xhat(basis: ModelSpaceBasis, ds: DefectSpaces, x) -> OperatorMatrix:
    """Operator acting as x (in defect coordinates) from the second
    defect space to the first, and as zero on the complement."""
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (ds.dim, ds.dim):
        raise ValueError(f"expected a {ds.dim} x {ds.dim} block, got {x.shape}")
    return OperatorMatrix(basis, ds.d_basis @ x @ ds.dt_basis.conj().T)


def modified_shift(basis: ModelSpaceBasis, ds: DefectSpaces, x) -> OperatorMatrix:
    """Replace the shift on the second defect space by the block x."""
    s, _ = s_theta(basis)
    n = basis.n
    p_dt = projector(ds.dt_basis)
    return OperatorMatrix(basis, s.mat @ (np.eye(n) - p_dt) + xhat(basis, ds, x).mat @ p_dt)


class Conjugation:
    """Antilinear involution x -> U conj(x) on C^d for symmetric unitary U."""

    def __init__(self, u):
        u = np.asarray(u, dtype=np.complex128)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError("conjugation matrix must be square")
        if np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])) > 1e-10:
            raise NotUnitaryError("conjugation matrix is not unitary")
        if np.linalg.norm(u - u.T) > 1e-10:
            raise ValueError("conjugation matrix must be symmetric")
        self.u = u
        self.dim = u.shape[0]

    def apply(self, x) -> np.ndarray:
        return self.u @ np.conj(np.asarray(x, dtype=np.complex128))


def gamma_symmetric_residual(f: MatLaurent, gamma: Conjugation) -> float:
    """How far the coefficients are from A_k = U A_k^T U*."""
    u = gamma.u
    worst = 0.0
    for k in range(f.lo, f.hi + 1):
        a = f.coeff(k)
        worst = max(worst, float(np.linalg.norm(a - u @ a.T @ u.conj().T)))
    return worst


def conjugation_apply(basis: ModelSpaceBasis, gamma: Conjugation, f: VecLaurent) -> VecLaurent:
    """The model-space conjugation: apply gamma coefficientwise with
    frequency reversal, shift down once, multiply by Theta."""
    inner = basis.inner
    if gamma.dim != inner.d:
        raise ValueError("conjugation dimension does not match")
    res = gamma_symmetric_residual(inner.theta, gamma)
    if res > 1e-9:
        raise NotGammaSymmetricError(f"theta is not gamma-symmetric, residual {res:.3e}")
    flipped = VecLaurent(-f.hi, np.conj(f.coeffs[::-1]) @ gamma.u.T)
    return multiply(inner.theta, flipped).shift(-1)


def conjugation_matrix(basis: ModelSpaceBasis, gamma: Conjugation) -> np.ndarray:
    """Coordinate matrix M of the conjugation: C f has coordinates
    M conj(c).  Symmetric unitary by construction; verified."""
    n = basis.n
    mat = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        image = conjugation_apply(basis, gamma, basis.element(j))
        resid = basis.membership_residual(image)
        if resid > 1e-9:
            raise IdentityCheckError(f"conjugation left the model space, residual {resid:.3e}")
        mat[:, j] = basis.coords(image)
    if np.linalg.norm(mat.conj().T @ mat - np.eye(n)) > 1e-9 or np.linalg.norm(mat - mat.T) > 1e-9:
        raise IdentityCheckError("conjugation matrix is not symmetric unitary")
    return mat


def c_symmetric(basis: ModelSpaceBasis, gamma: Conjugation, a, tol: float = None):
    """Test A = C A* C in coordinates; returns (verdict, residual)."""
    mat = matrix_of(a)
    m = conjugation_matrix(basis, gamma)
    residual = opnorm(mat - m @ mat.T @ m.conj().T)
    if tol is None:
        tol = 1e-9 * (1.0 + opnorm(mat))
    return residual <= tol, float(residual)


def kernel_recurrence_check(basis: ModelSpaceBasis, count: int = 20, seed: int = 0, tol: float = 1e-9) -> dict:
    """Sample the shift recurrences satisfied by the two kernel families."""
    inner = basis.inner
    d = inner.d
    rng = np.random.default_rng(seed)
    s, _ = s_theta(basis)
    eye = np.eye(d)
    k0 = np.column_stack([basis.coords(kernel(basis, 0.0, eye[:, i])) for i in range(d)])
    worst_k = worst_kt = worst_op = 0.0
    for _ in range(count):
        lam = 0.0
        while abs(lam) < 1e-3:  # keep away from the removable point
            lam = (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)) * 0.6
        x = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        y = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        lb = np.conj(lam)
        ck = basis.coords(kernel(basis, lam, x))
        ck0 = basis.coords(kernel(basis, 0.0, x))
        worst_k = max(worst_k, float(np.linalg.norm(s.mat @ ck - (ck - ck0) / lb)))
        ckt = basis.coords(tilde_kernel(basis, lam, y))
        ck0ty = basis.coords(kernel(basis, 0.0, inner.evaluate(lam) @ y))
        worst_kt = max(worst_kt, float(np.linalg.norm(s.mat @ ckt - (lam * ckt - ck0ty))))
        klam = np.column_stack([basis.coords(kernel(basis, lam, eye[:, i])) for i in range(d)])
        worst_op = max(worst_op, float(np.linalg.norm(s.mat @ klam - (klam - k0) / lb)))
    # removable point: the recurrence degenerates to the definition of S
    worst_zero = 0.0
    for i in range(d):
        f = kernel(basis, 0.0, eye[:, i])
        worst_zero = max(worst_zero, float(np.linalg.norm(s.mat @ basis.coords(f) - basis.coords(f.shift(1)))))
    checks = [
        {"name": "kernel family recurrence", "residual": worst_k},
        {"name": "difference-quotient family recurrence", "residual": worst_kt},
        {"name": "kernel frame recurrence (matrix form)", "residual": worst_op},
        {"name": "origin limit via direct shift", "residual": worst_zero},
    ]
    max_residual = max(c["residual"] for c in checks)
    return {"checks": checks, "max_residual": max_residual, "pass": max_residual <= tol}

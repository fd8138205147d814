"""Seeded generators for inner functions, symbols, and conjugations.

Everything takes an explicit numpy Generator so callers control
reproducibility; nothing in here touches global random state.
"""

from __future__ import annotations

import numpy as np

from .laurent import MatLaurent, multiply
from .model_operator import Conjugation, defect_spaces, s_theta
from .model_space import InnerFunction, ModelSpaceBasis, make_inner_potapov
from .mtto import is_mtto
from .numerics import opnorm, projector, rank


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Unitary drawn from the rotation-invariant distribution."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_projection(dim: int, rk: int, rng: np.random.Generator) -> np.ndarray:
    """Orthogonal projection of the given rank onto a random subspace."""
    if not 0 <= rk <= dim:
        raise ValueError(f"rank must lie in 0..{dim}")
    u = haar_unitary(dim, rng)
    cols = u[:, :rk]
    return cols @ cols.conj().T


def random_inner(d: int, m: int, rng: np.random.Generator, min_purity: float = 1e-6) -> InnerFunction:
    """Pure polynomial inner function of C^d with m elementary factors.

    Factor ranks are drawn uniformly from 1..d, so expect the zero count
    n anywhere between m and m*d.  Draws are repeated until the value at
    the origin has norm at most 1 - min_purity.
    """
    if d < 1 or m < 1:
        raise ValueError("need d >= 1 and m >= 1")
    for _ in range(200):
        factors = [random_projection(d, int(rng.integers(1, d + 1)), rng) for _ in range(m)]
        u = haar_unitary(d, rng)
        value0 = u.copy()
        for p in factors:
            value0 = value0 @ (np.eye(d) - p)
        if opnorm(value0) <= 1.0 - min_purity:
            return make_inner_potapov(factors, left_unitary=u)
    raise RuntimeError("could not draw a pure inner function; lower min_purity")


def random_symbol(d: int, lo: int, hi: int, rng: np.random.Generator, scale: float = 1.0) -> MatLaurent:
    if hi < lo:
        raise ValueError("empty degree window")
    c = rng.standard_normal((hi - lo + 1, d, d)) + 1j * rng.standard_normal((hi - lo + 1, d, d))
    return MatLaurent(lo, scale * c)


def random_element_coords(basis: ModelSpaceBasis, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal(basis.n) + 1j * rng.standard_normal(basis.n)


def random_gamma(d: int, rng: np.random.Generator) -> Conjugation:
    """Conjugation x -> U conj(x) with U = V V^T symmetric unitary."""
    v = haar_unitary(d, rng)
    return Conjugation(v @ v.T)


def gamma_real_basis(gamma: Conjugation, rng: np.random.Generator) -> np.ndarray:
    """Orthonormal basis of fixed vectors of the conjugation.

    Fixed vectors span the whole space over R and pairwise inner
    products between them are real, so Gram-Schmidt with real
    coefficients keeps every iterate fixed and still delivers a complex
    orthonormal basis.
    """
    d = gamma.dim
    vecs: list[np.ndarray] = []
    attempts = 0
    while len(vecs) < d:
        attempts += 1
        if attempts > 100 * d:
            raise RuntimeError("failed to complete a fixed-vector basis")
        y = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        x = y + gamma.apply(y)
        for b in vecs:
            x = x - b * np.vdot(b, x).real
        nrm = np.linalg.norm(x)
        if nrm > 1e-6:
            vecs.append(x / nrm)
    return np.column_stack(vecs)


def random_gamma_symmetric_triple(
    d: int,
    m: int,
    rng: np.random.Generator,
    laurent_span: int = 2,
):
    """Conjugation, a compatible inner function, and a compatible symbol.

    All three are diagonal in one basis of fixed vectors of the
    conjugation: the inner factors project onto subsets of the basis
    (chosen to cover every direction, which forces purity) and the
    symbol carries an arbitrary scalar Laurent polynomial on each
    direction.  The coefficient matrices A of both functions then
    satisfy A = U A^T U*.
    """
    if m < 1:
        raise ValueError("need at least one factor")
    gamma = random_gamma(d, rng)
    b = gamma_real_basis(gamma, rng)
    factors = []
    covered = np.zeros(d, dtype=bool)
    for j in range(m):
        mask = rng.integers(0, 2, size=d).astype(bool)
        if j == m - 1:
            mask |= ~covered
        if not mask.any():
            mask[int(rng.integers(0, d))] = True
        covered |= mask
        cols = b[:, mask]
        factors.append(cols @ cols.conj().T)
    inner = make_inner_potapov(factors)
    width = 2 * laurent_span + 1
    q = rng.standard_normal((width, d)) + 1j * rng.standard_normal((width, d))
    coeffs = np.einsum("ki,ai,bi->kab", q, b, b.conj())
    phi = MatLaurent(-laurent_span, coeffs)
    return gamma, inner, phi


def random_commuting_symbol(
    basis: ModelSpaceBasis,
    rng: np.random.Generator,
    terms: int = 4,
    max_shift: int = 2,
    max_power: int = 2,
) -> MatLaurent:
    """Random polynomial in z and the inner function itself; symbols of
    this shape leave Theta H^2 invariant, so the built operator commutes
    with the compressed shift."""
    theta = basis.inner.theta
    d = basis.inner.d
    powers = [MatLaurent.identity(d)]
    for _ in range(max_power):
        powers.append(multiply(powers[-1], theta))
    phi = MatLaurent.zero(d)
    for _ in range(terms):
        c = rng.standard_normal() + 1j * rng.standard_normal()
        a = int(rng.integers(0, max_shift + 1))
        p = int(rng.integers(0, max_power + 1))
        phi = phi + c * powers[p].shift(a)
    return phi


def random_non_member(basis: ModelSpaceBasis, rng: np.random.Generator, min_defect: float = 1e-3) -> np.ndarray:
    """Unit-norm operator outside the symbol class, certified by the
    membership residual.

    Candidates are drawn from the row space of the defect-compression
    constraint, the orthogonal complement of the class, so only spaces
    with a strict complement admit one.
    """
    n = basis.n
    s, s_adj = s_theta(basis)
    ds = defect_spaces(basis)
    p_d_perp = np.eye(n) - projector(ds.d_basis)
    cols = []
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=np.complex128)
            e[i, j] = 1.0
            cols.append((p_d_perp @ (e - s.mat @ e @ s_adj.mat) @ p_d_perp).reshape(-1))
    constraint = np.column_stack(cols)
    r = rank(constraint, scale=1.0)
    if r == 0:
        raise ValueError("every operator on this model space carries a symbol")
    _, _, vh = np.linalg.svd(constraint)
    row_space = vh[:r].conj().T
    for _ in range(64):
        c = rng.standard_normal(r) + 1j * rng.standard_normal(r)
        a = (row_space @ c).reshape(n, n)
        nrm = opnorm(a)
        if nrm < 1e-12:
            continue
        a = a / nrm
        if is_mtto(basis, a).residual >= min_defect:
            return a
    raise RuntimeError("could not certify a non-member; lower min_defect")

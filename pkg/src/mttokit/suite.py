"""Randomized self-check battery with a reproducible JSON report.

Every check draws from its own child stream of one seed, so reports for
the same configuration are byte-identical across runs.  Each check pins
the algebraic identity it exercises in the `anchor` field and reports
the worst normalized residual over all cases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError
from .fixtures import FIXTURE_NAMES, fixture
from .laurent import (
    MatLaurent,
    VecLaurent,
    boundary_adjoint,
    evaluate,
    inner_residual,
    l2_inner,
    multiply,
    purity_margin,
)
from .model_operator import (
    Conjugation,
    action_check,
    c_symmetric,
    defect_spaces,
    gamma_symmetric_residual,
    j_operators,
    kernel_recurrence_check,
    s_theta,
)
from .model_space import (
    ModelSpaceBasis,
    kernel,
    model_dim,
    tau_adjoint_apply,
    tau_apply,
    tilde_kernel,
)
from .mtto import (
    build,
    finite_rank,
    finite_rank_as_xhat,
    is_mtto,
    mtto_dimension,
    recover_symbol,
    semi_commutator_residual,
    zero_symbol_decompose,
)
from .numerics import opnorm, projector, rank
from .randgen import (
    random_commuting_symbol,
    random_element_coords,
    random_gamma_symmetric_triple,
    random_inner,
    random_non_member,
    random_symbol,
)
from .serialize import json_to_mat_laurent, laurent_to_json

_DEFAULT_SHAPES = ((2, 2), (3, 2))


@dataclass
class SuiteConfig:
    seed: int
    cases: int = 5
    fixtures: tuple = tuple(FIXTURE_NAMES)
    random_inners: tuple = _DEFAULT_SHAPES
    tol: float = 1e-9

    @classmethod
    def from_json(cls, obj) -> "SuiteConfig":
        if not isinstance(obj, dict):
            raise ParseError("suite config must be a JSON object")
        if "seed" not in obj:
            raise ParseError("suite config needs a seed")
        known = {"seed", "cases", "fixtures", "random_inners", "tol"}
        extra = set(obj) - known
        if extra:
            raise ParseError(f"unknown suite config keys: {sorted(extra)}")
        seed = obj["seed"]
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise ParseError("seed must be a non-negative integer")
        cases = obj.get("cases", 5)
        if not isinstance(cases, int) or isinstance(cases, bool) or cases < 1:
            raise ParseError("cases must be a positive integer")
        fixtures = obj.get("fixtures", list(FIXTURE_NAMES))
        if not isinstance(fixtures, list) or not fixtures:
            raise ParseError("fixtures must be a non-empty list of fixture names")
        for name in fixtures:
            if name not in FIXTURE_NAMES:
                raise ParseError(f"unknown fixture {name!r}")
        shapes = obj.get("random_inners", [list(s) for s in _DEFAULT_SHAPES])
        if not isinstance(shapes, list):
            raise ParseError("random_inners must be a list of [d, m] pairs")
        clean = []
        for s in shapes:
            if (
                not isinstance(s, list)
                or len(s) != 2
                or not all(isinstance(v, int) and not isinstance(v, bool) and v >= 1 for v in s)
            ):
                raise ParseError("random_inners entries must be pairs of positive integers")
            clean.append((s[0], s[1]))
        tol = obj.get("tol", 1e-9)
        if not isinstance(tol, (int, float)) or isinstance(tol, bool) or not 0 < float(tol) < 1:
            raise ParseError("tol must be a number in (0, 1)")
        return cls(seed, cases, tuple(fixtures), tuple(clean), float(tol))

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "cases": self.cases,
            "fixtures": list(self.fixtures),
            "random_inners": [list(s) for s in self.random_inners],
            "tol": self.tol,
        }


class _Context:
    """Model space bases shared by all checks of one run."""

    def __init__(self, config: SuiteConfig):
        self.config = config
        self.spaces = [(name, ModelSpaceBasis(fixture(name))) for name in config.fixtures]
        rng = np.random.default_rng(np.random.SeedSequence(entropy=config.seed, spawn_key=(0xF1D0,)))
        for i, (d, m) in enumerate(config.random_inners):
            self.spaces.append((f"random-{d}x{m}-{i}", ModelSpaceBasis(random_inner(d, m, rng))))


@dataclass
class _CheckResult:
    cases: int = 0
    max_residual: float = 0.0
    notes: list = field(default_factory=list)

    def add(self, residual: float, count: int = 1):
        self.cases += count
        self.max_residual = max(self.max_residual, float(residual))


def _check_coefficient_unitarity(ctx, rng):
    out = _CheckResult()
    for _, basis in ctx.spaces:
        theta = basis.inner.theta
        out.add(inner_residual(theta))
        for _ in range(ctx.config.cases):
            z = np.exp(2j * np.pi * rng.random())
            v = evaluate(theta, z)
            out.add(opnorm(v.conj().T @ v - np.eye(basis.inner.d)) / 10.0)
    return out


def _check_purity(ctx, rng):
    out = _CheckResult()
    for _, basis in ctx.spaces:
        margin = purity_margin(basis.inner.theta)
        out.add(0.0 if margin > 0 else 1.0)
    return out


def _check_basis_orthonormal(ctx, rng):
    out = _CheckResult()
    for _, basis in ctx.spaces:
        q = basis.q
        out.add(opnorm(q.conj().T @ q - np.eye(basis.n)))
        for j in range(basis.n):
            out.add(basis.membership_residual(basis.element(j)))
    return out


def _check_basis_deterministic(ctx, rng):
    out = _CheckResult()
    for _, basis in ctx.spaces:
        again = ModelSpaceBasis(basis.inner)
        out.add(0.0 if np.array_equal(again.q, basis.q) else 1.0)
        out.add(0.0 if again.basis_id == basis.basis_id else 1.0)
    return out


def _check_projection(ctx, rng):
    out = _CheckResult()
    for _, basis in ctx.spaces:
        d = basis.inner.d
        for _ in range(ctx.config.cases):
            h = random_symbol(d, 0, 2, rng)
            blocked = multiply(basis.inner.theta, h)
            for i in range(d):
                col = VecLaurent(blocked.lo, blocked.coeffs[:, :, i])
                out.add(basis.project(col).norm() / (1.0 + col.norm()))
            g = basis.from_coords(random_element_coords(basis, rng))
            out.add((basis.project(g) - g).norm() / (1.0 + g.norm()))
    return out


def _check_reproducing(ctx, rng):
    out = _CheckResult()
    for _, basis in ctx.spaces:
        d = basis.inner.d
        for _ in range(ctx.config.cases):
            lam = 0.8 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
            x = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            k, witness = kernel(basis, lam, x, return_witness=True)
            out.add(witness / (1.0 + np.linalg.norm(x)))
            f = basis.from_coords(random_element_coords(basis, rng))
            lhs = l2_inner(f, k)
            rhs = np.vdot(x, evaluate(f, lam))
            out.add(abs(lhs - rhs) / (1.0 + abs(rhs)))
    return out


def _check_difference_quotients(ctx, rng):
    out = _CheckResult()
    for _, basis in ctx.spaces:
        d = basis.inner.d
        theta = basis.inner.theta
        for _ in range(ctx.config.cases):
            lam = 0.8 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
            y = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            kt, witness = tilde_kernel(basis, lam, y, return_witness=True)
            out.add(witness / (1.0 + np.linalg.norm(y)))
            shifted = kt.shift(1) - complex(lam) * kt
            target = multiply(theta, VecLaurent.constant(y)) - VecLaurent.constant(
                evaluate(theta, lam) @ y
            )
            out.add((shifted - target).norm() / (1.0 + np.linalg.norm(y)))
    return out


def _check_tau(ctx, rng):
    out = _CheckResult()
    for _, basis in ctx.spaces:
        theta = basis.inner.theta
        for _ in range(ctx.config.cases):
            f = basis.from_coords(random_element_coords(basis, rng))
            g = tau_apply(theta, f)
            out.add(abs(g.norm() - f.norm()) / (1.0 + f.norm()))
            back = tau_adjoint_apply(theta, g)
            out.add((back - f).norm() / (1.0 + f.norm()))
    return out


def _check_shift_actions(ctx, rng):
    out = _CheckResult()
    for _, basis in ctx.spaces:
        res = action_check(basis)
        out.add(res["max_residual"])
        s, s_adj = s_theta(basis)
        power = np.eye(basis.n)
        for _ in range(basis.inner.m):
            power = power @ s.mat
        out.add(opnorm(power))
    return out


def _check_defect_spaces(ctx, rng):
    out = _CheckResult()
    for _, basis in ctx.spaces:
        ds = defect_spaces(basis)
        d = basis.inner.d
        out.add(0.0 if ds.d_basis.shape == (basis.n, d) else 1.0)
        out.add(0.0 if ds.dt_basis.shape == (basis.n, d) else 1.0)
        j, jt = j_operators(basis, ds)
        s, s_adj = s_theta(basis)
        g = np.eye(basis.n) - s.mat @ s_adj.mat
        out.add(opnorm(g @ j - projector(ds.d_basis)))
    return out


def _check_semi_commutator(ctx, rng):
    out = _CheckResult()
    for _, basis in ctx.spaces:
        d = basis.inner.d
        for _ in range(ctx.config.cases):
            phi = random_symbol(d, 0, 3, rng)
            a = build(basis, phi)
            out.add(semi_commutator_residual(basis, phi, a) / (1.0 + opnorm(a.mat)))
    return out


def _check_members(ctx, rng):
    out = _CheckResult()
    for _, basis in ctx.spaces:
        d = basis.inner.d
        for _ in range(ctx.config.cases):
            phi = random_symbol(d, -3, 3, rng)
            a = build(basis, phi)
            decision = is_mtto(basis, a)
            scale = 1.0 + opnorm(a.mat)
            out.add(decision.residual / scale)
            out.add(0.0 if decision.verdict else 1.0)
            out.add(decision.witness.residual / scale)
            out.add(decision.witness_tilde.residual / scale)
    return out


def _check_non_members(ctx, rng):
    out = _CheckResult()
    for label, basis in ctx.spaces:
        report = mtto_dimension(basis)
        if report.dim == basis.n * basis.n:
            out.notes.append(f"{label}: every operator carries a symbol, nothing to reject")
            continue
        for _ in range(ctx.config.cases):
            a = random_non_member(basis, rng)
            decision = is_mtto(basis, a)
            out.add(0.0 if not decision.verdict and decision.residual >= 1e-3 else 1.0)
    return out


def _check_variants_agree(ctx, rng):
    out = _CheckResult()
    for _, basis in ctx.spaces:
        for _ in range(ctx.config.cases):
            a = rng.standard_normal((basis.n, basis.n)) + 1j * rng.standard_normal((basis.n, basis.n))
            decision = is_mtto(basis, a)
            spread = abs(decision.variants["Dtilde"] - decision.variants["shift"])
            out.add(spread / (1.0 + decision.residual))
            agree = (decision.variants["D"] <= decision.tol) == (
                decision.variants["Dtilde"] <= decision.tol
            )
            out.add(0.0 if agree or decision.residual < 10 * decision.tol else 1.0)
    return out


def _check_symbol_recovery(ctx, rng):
    out = _CheckResult()
    for _, basis in ctx.spaces:
        d = basis.inner.d
        for _ in range(ctx.config.cases):
            phi = random_symbol(d, -2, 2, rng)
            a = build(basis, phi)
            rec = recover_symbol(basis, a)
            rebuilt = build(basis, rec.psi1 + boundary_adjoint(rec.psi2))
            out.add(opnorm(rebuilt.mat - a.mat) / (1.0 + opnorm(a.mat)))
    return out


def _check_zero_symbols(ctx, rng):
    out = _CheckResult()
    for _, basis in ctx.spaces:
        theta = basis.inner.theta
        d = basis.inner.d
        for _ in range(ctx.config.cases):
            psi1 = random_symbol(d, 0, 2, rng)
            psi2 = random_symbol(d, 0, 2, rng)
            phi = multiply(theta, psi1) + boundary_adjoint(multiply(theta, psi2))
            result = zero_symbol_decompose(basis, phi)
            out.add(0.0 if result.is_zero else 1.0)
            if result.is_zero:
                out.add(result.residual / (1.0 + phi.norm()))
    return out


def _check_dimension(ctx, rng):
    out = _CheckResult()
    for label, basis in ctx.spaces:
        report = mtto_dimension(basis)
        out.add(0.0)  # both routes agreed or mtto_dimension would have raised
        out.add(0.0 if model_dim(basis.inner) == basis.n else 1.0)
        if report.dim != report.linear_reading:
            out.notes.append(f"{label}: count {report.dim} differs from 2nd-d^2={report.linear_reading}")
    return out


def _check_finite_rank(ctx, rng):
    out = _CheckResult()
    for _, basis in ctx.spaces:
        d = basis.inner.d
        ds = defect_spaces(basis)
        for lam in (0.0, 0.4 - 0.3j):
            y = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            op = finite_rank(basis, lam, y)
            out.add(0.0 if rank(op.mat) == rank(y) else 1.0)
            out.add(is_mtto(basis, op).residual / (1.0 + opnorm(op.mat)))
        y = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        direct = finite_rank(basis, 0.0, y)
        via = finite_rank_as_xhat(basis, ds, y)
        out.add(opnorm(direct.mat - via.mat) / (1.0 + opnorm(direct.mat)))
    return out


def _check_kernel_recurrences(ctx, rng):
    out = _CheckResult()
    for _, basis in ctx.spaces:
        res = kernel_recurrence_check(basis, count=ctx.config.cases, seed=int(rng.integers(2**31)))
        out.add(res["max_residual"])
    return out


def _check_commutant(ctx, rng):
    out = _CheckResult()
    for _, basis in ctx.spaces:
        s, _ = s_theta(basis)
        for _ in range(ctx.config.cases):
            phi = random_commuting_symbol(basis, rng)
            a = build(basis, phi)
            out.add(opnorm(a.mat @ s.mat - s.mat @ a.mat) / (1.0 + opnorm(a.mat)))
    return out


def _check_conjugation(ctx, rng):
    out = _CheckResult()
    for _ in range(ctx.config.cases):
        d = int(rng.integers(2, 4))
        m = int(rng.integers(1, 4))
        gamma, inner, phi = random_gamma_symmetric_triple(d, m, rng)
        out.add(gamma_symmetric_residual(inner.theta, gamma) / 10.0)
        basis = ModelSpaceBasis(inner)
        a = build(basis, phi)
        ok, res = c_symmetric(basis, gamma, a.mat)
        out.add(res / (1.0 + opnorm(a.mat)))
        out.add(0.0 if ok else 1.0)
    return out


def _check_worked_example(ctx, rng):
    """Rank-one corner symbol on the diag(z, z^2) space, checked end to
    end: the image of (z, 0) stays in the model space but leaves
    Theta H^2, the operator is a rank-one member, and it breaks the
    conjugation symmetry that the compressed shift has."""
    out = _CheckResult()
    basis = ModelSpaceBasis(fixture("FIX3"))
    theta = basis.inner.theta
    phi = MatLaurent.constant(np.array([[0.0, 0.0], [1.0, 0.0]]))
    f = VecLaurent(1, [[1.0, 0.0]])
    image = multiply(phi, f)
    out.add(basis.membership_residual(image))
    # distance to Theta H^2 is the full norm of the image
    full = multiply(boundary_adjoint(theta), image)
    h_plus = VecLaurent(0, np.array([full.coeff(k) for k in range(max(full.hi, 0) + 1)]))
    dist = (image - multiply(theta, h_plus)).norm()
    out.add(0.0 if dist > 0.9 else 1.0)
    a = build(basis, phi)
    out.add(0.0 if rank(a.mat) == 1 else 1.0)
    decision = is_mtto(basis, a)
    out.add(decision.residual)
    out.add(0.0 if decision.verdict else 1.0)
    gamma = Conjugation(np.eye(2))
    s, _ = s_theta(basis)
    ok_s, res_s = c_symmetric(basis, gamma, s.mat)
    out.add(res_s)
    out.add(0.0 if ok_s else 1.0)
    ok_a, res_a = c_symmetric(basis, gamma, a.mat)
    out.add(0.0 if not ok_a and res_a > 0.1 else 1.0)
    return out


def _check_serialization(ctx, rng):
    out = _CheckResult()
    for _, basis in ctx.spaces:
        theta = basis.inner.theta
        back = json_to_mat_laurent(laurent_to_json(theta))
        same = back.lo == theta.lo and np.array_equal(back.coeffs, theta.coeffs)
        out.add(0.0 if same else 1.0)
    return out


_REGISTRY = [
    ("coefficient_unitarity", "sum_k A_k* A_{k+j} = delta_j I and unitary boundary values", _check_coefficient_unitarity, 1e-8),
    ("purity", "value at the origin is a strict contraction", _check_purity, 0.5),
    ("basis_orthonormal", "Q*Q = I and basis columns satisfy the space constraints", _check_basis_orthonormal, 1e-9),
    ("basis_deterministic", "rebuilding the basis reproduces it bit for bit", _check_basis_deterministic, 0.5),
    ("projection", "projection kills Theta H^2 and fixes the space", _check_projection, 1e-9),
    ("reproducing_kernels", "<f, k_lam x> = <f(lam), x> with vanishing high tail", _check_reproducing, 1e-9),
    ("difference_quotients", "(z - lam) ktilde_lam y = (Theta(z) - Theta(lam)) y", _check_difference_quotients, 1e-9),
    ("tau_unitary", "coefficient-reversal map preserves norms and inverts", _check_tau, 1e-9),
    ("shift_actions", "compressed shift acts by multiplication off the defects, S^m = 0", _check_shift_actions, 1e-9),
    ("defect_spaces", "defect ranks equal d and G pinv(G) is the defect projector", _check_defect_spaces, 1e-9),
    ("semi_commutator", "A - S A S* sees only the symbol times the value at 0", _check_semi_commutator, 1e-9),
    ("members", "built operators pass the compression test with exact witnesses", _check_members, 1e-8),
    ("non_members", "certified complement operators are rejected", _check_non_members, 0.5),
    ("variants_agree", "plain and starred compressions decide alike", _check_variants_agree, 0.5),
    ("symbol_recovery", "recovered pair rebuilds the operator", _check_symbol_recovery, 1e-8),
    ("zero_symbols", "Theta Psi1 + (Theta Psi2)* induces the zero operator", _check_zero_symbols, 1e-8),
    ("dimension", "symbol-map rank equals operator-constraint nullity", _check_dimension, 0.5),
    ("finite_rank", "kernel sandwiches keep rank and membership", _check_finite_rank, 1e-8),
    ("kernel_recurrences", "shift moves reproducing kernels by the two-term rules", _check_kernel_recurrences, 1e-9),
    ("commutant", "symbols polynomial in z and Theta commute with the shift", _check_commutant, 1e-9),
    ("conjugation", "compatible symbols give conjugation-symmetric operators", _check_conjugation, 1e-8),
    ("worked_example", "corner symbol: image leaves Theta H^2, member of rank one, breaks conjugation symmetry", _check_worked_example, 1e-8),
    ("serialization", "Laurent JSON round-trips bit for bit", _check_serialization, 0.5),
]


def check_names() -> list:
    return [name for name, _, _, _ in _REGISTRY]


def run_suite(config: SuiteConfig) -> dict:
    ctx = _Context(config)
    root = np.random.SeedSequence(entropy=config.seed)
    children = root.spawn(len(_REGISTRY))
    checks = []
    overall = True
    for (name, anchor, fn, tol), child in zip(_REGISTRY, children):
        rng = np.random.default_rng(child)
        result = fn(ctx, rng)
        passed = result.max_residual <= tol
        overall = overall and passed
        record = {
            "name": name,
            "anchor": anchor,
            "cases": result.cases,
            "max_residual": result.max_residual,
            "tol": tol,
            "pass": passed,
        }
        if result.notes:
            record["notes"] = sorted(result.notes)
        checks.append(record)
    return {
        "schema_version": 1,
        "config": config.to_json(),
        "checks": checks,
        "pass": overall,
    }

"""Truncated Toeplitz operators with matrix symbols on finite-dimensional
model spaces: construction, membership testing, symbol recovery, and the
supporting model-space machinery."""

from .errors import (
    DimensionMismatchError,
    IdentityCheckError,
    MttoError,
    NotGammaSymmetricError,
    NotInnerError,
    NotMttoError,
    NotProjectionError,
    NotPureError,
    NotUnitaryError,
    NotZeroOperatorError,
    ParseError,
)
from .fixtures import FIXTURE_NAMES, fixture
from .laurent import (
    MatLaurent,
    VecLaurent,
    boundary_adjoint,
    evaluate,
    inner_residual,
    is_inner,
    is_pure,
    l2_inner,
    multiply,
    purity_margin,
    tilde,
)
from .model_operator import (
    Conjugation,
    OperatorMatrix,
    action_check,
    c_symmetric,
    conjugation_apply,
    conjugation_matrix,
    defect_spaces,
    gamma_symmetric_residual,
    modified_shift,
    s_theta,
    xhat,
)
from .model_space import (
    InnerFunction,
    ModelSpaceBasis,
    inner_from_json,
    kernel,
    make_inner_potapov,
    model_dim,
    symbol_space_basis,
    tau_adjoint_apply,
    tau_apply,
    tilde_kernel,
)
from .mtto import (
    build,
    commutant_factor,
    factor_through_theta,
    finite_rank,
    is_mtto,
    mtto_dimension,
    recover_symbol,
    zero_symbol_decompose,
)
from .suite import SuiteConfig, run_suite

__version__ = "0.1.0"

__all__ = [
    "Conjugation",
    "DimensionMismatchError",
    "FIXTURE_NAMES",
    "IdentityCheckError",
    "InnerFunction",
    "MatLaurent",
    "ModelSpaceBasis",
    "MttoError",
    "NotGammaSymmetricError",
    "NotInnerError",
    "NotMttoError",
    "NotProjectionError",
    "NotPureError",
    "NotUnitaryError",
    "NotZeroOperatorError",
    "OperatorMatrix",
    "ParseError",
    "SuiteConfig",
    "VecLaurent",
    "action_check",
    "boundary_adjoint",
    "build",
    "c_symmetric",
    "commutant_factor",
    "conjugation_apply",
    "conjugation_matrix",
    "defect_spaces",
    "evaluate",
    "factor_through_theta",
    "finite_rank",
    "fixture",
    "gamma_symmetric_residual",
    "inner_from_json",
    "inner_residual",
    "is_inner",
    "is_mtto",
    "is_pure",
    "kernel",
    "l2_inner",
    "make_inner_potapov",
    "model_dim",
    "modified_shift",
    "mtto_dimension",
    "multiply",
    "purity_margin",
    "recover_symbol",
    "run_suite",
    "s_theta",
    "symbol_space_basis",
    "tau_adjoint_apply",
    "tau_apply",
    "tilde",
    "tilde_kernel",
    "xhat",
    "zero_symbol_decompose",
]

"""Extremal nonnegative solutions of M-tensor equations ``A x^{m-1} = b``.

The hot kernels (sparse contraction, triangular substitution) come from a
compiled extension when available and from NumPy otherwise; ``BACKEND``
names the one in use.
"""

__version__ = "0.1.0"

from .kernels import BACKEND
from .tensor import Tensor, contract, contract_matrix, is_z_tensor, power_vec, semi_symmetrize, subtensor
from .spectral import (
    NONSINGULAR_M,
    NOT_Z,
    Z_NOT_M,
    MTensorCertificate,
    SpectralConvergenceError,
    classify,
    is_nonsingular_m_matrix,
    matrix_spectral_radius,
    nonneg_spectral_radius,
)
from .splitting import PlanError, SplittingPlan, build_plan, default_kind, majorization_matrix
from .solver import (
    MonotonicityError,
    NegativeInnerError,
    NotMTensorError,
    NotZTensorError,
    PreconditionError,
    RateReport,
    ReductionInfo,
    SolveReport,
    SolverOptions,
    compare_splittings,
    continuity_probe,
    detect_and_reduce,
    estimate_rate,
    make_upper_start,
    maximal_solve,
    minimal_solve,
    monotone_dependence_probe,
    positive_solve,
    rate_from_report,
)
from .oracle import SolutionSet, enumerate_solutions, verify_solution
from .io import FormatError, read_tensor, read_vec, write_tensor, write_vec

__all__ = [name for name in dir() if not name.startswith("_")]

"""Level-1 (tensor) and level-2 (matrix) splittings and the P-solve."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .spectral import is_nonsingular_m_matrix
from .tensor import Tensor, contract, power_vec, subtensor

__all__ = [
    "PlanError",
    "SplittingPlan",
    "KINDS",
    "default_kind",
    "majorization_matrix",
    "build_plan",
    "p_solve",
    "l_apply",
]

KINDS = ("jacobi", "lower", "upper", "full", "custom")
_ALIASES = {"lower-triangular": "lower", "upper-triangular": "upper", "gauss-seidel": "lower"}


class PlanError(ValueError):
    """A splitting violates its preconditions; ``blocking`` names offending coordinates."""

    def __init__(self, message, blocking=()):
        super().__init__(message)
        self.blocking = tuple(blocking)


def _unmixed_mask(A: Tensor):
    """Entries of the form ``(i, j, ..., j)``."""
    tail = A.indices[:, 1:]
    return np.all(tail == tail[:, :1], axis=1)


def majorization_matrix(A: Tensor) -> np.ndarray:
    """``M[i, j] = a_{ij...j}``."""
    mask = _unmixed_mask(A)
    M = np.zeros((A.dim, A.dim))
    np.add.at(M, (A.indices[mask, 0], A.indices[mask, 1]), A.values[mask])
    return M


def default_kind(order):
    """Full solve for order >= 4 (contraction dominates), lower triangle for order 3."""
    return "lower" if order == 3 else "full"


def _lu_nopivot(P):
    """Doolittle LU without pivoting.

    For a nonsingular M-matrix every Schur complement is again an M-matrix,
    so no pivoting is needed and both factors keep the sign pattern that
    makes substitution cancellation-free.
    """
    n = P.shape[0]
    L = np.eye(n)
    U = P.astype(np.float64).copy()
    for k in range(n - 1):
        piv = U[k, k]
        if piv <= 0:
            raise PlanError(f"nonpositive pivot {piv!r} at position {k}", (k,))
        for i in range(k + 1, n):
            f = U[i, k] / piv
            L[i, k] = f
            U[i, k:] -= f * U[k, k:]
            U[i, k] = 0.0
    if U[n - 1, n - 1] <= 0:
        raise PlanError("nonpositive final pivot", (n - 1,))
    return L, U


def _structure(P):
    if np.count_nonzero(P - np.diag(np.diag(P))) == 0:
        return "diagonal"
    if np.array_equal(P, np.tril(P)):
        return "lower"
    if np.array_equal(P, np.triu(P)):
        return "upper"
    return "general"


@dataclass(frozen=True, eq=False)
class SplittingPlan:
    """``A = M_tensor - N`` with ``M = P - Q`` and ``L x^{m-1} = Q x^{[m-1]} + N x^{m-1}``."""

    A: Tensor
    M: np.ndarray
    N: Tensor
    P: np.ndarray
    Q: np.ndarray
    kind: str
    L: Tensor
    structure: str = field(default="general")
    _factors: tuple = field(default=(), repr=False)

    @property
    def order(self):
        return self.A.order

    @property
    def dim(self):
        return self.A.dim

    def solve(self, rhs):
        rhs = np.asarray(rhs, dtype=np.float64)
        if rhs.shape != (self.dim,):
            raise ValueError("right-hand side length does not match the plan")
        if self.structure == "diagonal":
            return rhs / self._factors[0]
        if self.structure == "lower":
            return kernels.forward_sub(self._factors[0], rhs)
        if self.structure == "upper":
            return kernels.back_sub(self._factors[0], rhs)
        L, U = self._factors
        return kernels.back_sub(U, kernels.forward_sub(L, rhs, unit_diagonal=True))

    def apply_L(self, x):
        return contract(self.L, x)

    def restrict(self, keep):
        """The inherited plan on the subsystem indexed by ``keep``."""
        keep = np.asarray(sorted(keep), dtype=np.int64)
        sub = subtensor(self.A, keep)
        if self.kind == "custom":
            return build_plan(sub, "custom", P=self.P[np.ix_(keep, keep)])
        return build_plan(sub, self.kind)


def _readonly(a):
    a = np.array(a, dtype=np.float64)
    a.flags.writeable = False
    return a


def _check_identities(A, M, N, Q, L, rng_seed=0):
    rng = np.random.default_rng(rng_seed)
    m = A.order
    absA = Tensor(m, A.dim, A.indices, np.abs(A.values))
    for _ in range(3):
        x = rng.uniform(0.5, 1.5, A.dim)
        xp = power_vec(x, m - 1)
        scale = contract(absA, x) + np.abs(Q) @ xp + 1e-300
        lhs = contract(A, x)
        if np.any(np.abs(lhs - (M @ xp - contract(N, x))) > 1e-12 * scale):
            raise AssertionError("level-1 splitting identity failed")
        if np.any(np.abs(contract(L, x) - (Q @ xp + contract(N, x))) > 1e-12 * scale):
            raise AssertionError("L operator identity failed")


def build_plan(A: Tensor, kind="auto", P=None, tol=1e-10) -> SplittingPlan:
    """Construct and validate a splitting plan.

    ``kind`` is one of ``jacobi``, ``lower``, ``upper``, ``full``, ``custom``
    or ``auto`` (the order-based default). ``custom`` takes ``P``.
    """
    kind = _ALIASES.get(kind, kind)
    if kind == "auto":
        kind = default_kind(A.order)
    if kind not in KINDS:
        raise ValueError(f"unknown splitting kind {kind!r}")
    if (P is not None) != (kind == "custom"):
        raise ValueError("P is given exactly when kind == 'custom'")

    M = majorization_matrix(A)
    if kind == "jacobi":
        P = np.diag(np.diag(M))
    elif kind == "lower":
        P = np.tril(M)
    elif kind == "upper":
        P = np.triu(M)
    elif kind == "full":
        P = M.copy()
    else:
        P = np.asarray(P, dtype=np.float64)
        if P.shape != M.shape:
            raise PlanError(f"custom P has shape {P.shape}, expected {M.shape}")

    d = np.diag(P)
    bad = tuple(int(i) for i in np.flatnonzero(d <= 0))
    if bad:
        raise PlanError(
            f"P has nonpositive diagonal at coordinates {[i + 1 for i in bad]}; "
            "supply a custom P with a positive diagonal",
            bad,
        )
    Q = P - M
    negQ = np.argwhere(Q < 0)
    if negQ.size:
        raise PlanError(
            f"Q = P - M has negative entries at {[(int(i) + 1, int(j) + 1) for i, j in negQ]}",
            tuple(int(i) for i in negQ[:, 0]),
        )
    if not is_nonsingular_m_matrix(P, tol):
        raise PlanError("P is not a nonsingular M-matrix")

    mixed = ~_unmixed_mask(A)
    N = Tensor(A.order, A.dim, A.indices[mixed], -A.values[mixed])
    if np.any(N.values < 0):
        rows = sorted({int(i) for i in N.indices[N.values < 0, 0]})
        raise PlanError(
            f"mixed entries must be nonpositive (A must be a Z-tensor); rows {[i + 1 for i in rows]}",
            rows,
        )
    qi, qj = np.nonzero(Q)
    q_idx = np.column_stack([qi] + [qj] * (A.order - 1)).astype(np.int64)
    L = Tensor(A.order, A.dim, np.vstack([N.indices, q_idx]), np.concatenate([N.values, Q[qi, qj]]))
    _check_identities(A, M, N, Q, L)

    structure = _structure(P)
    if structure == "diagonal":
        factors = (_readonly(np.diag(P)),)
    elif structure in ("lower", "upper"):
        factors = (_readonly(P),)
    else:
        factors = tuple(_readonly(f) for f in _lu_nopivot(P))
    return SplittingPlan(
        A=A,
        M=_readonly(M),
        N=N,
        P=_readonly(P),
        Q=_readonly(Q),
        kind=kind,
        L=L,
        structure=structure,
        _factors=factors,
    )


def p_solve(plan: SplittingPlan, rhs) -> np.ndarray:
    """Solve ``P y = rhs``."""
    return plan.solve(rhs)


def l_apply(plan: SplittingPlan, x) -> np.ndarray:
    """``Q x^{[m-1]} + N x^{m-1}``."""
    return plan.apply_L(x)

"""Spectral radius of nonnegative tensors and M-tensor / M-matrix tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import Tensor, contract, is_z_tensor

__all__ = [
    "SpectralConvergenceError",
    "MTensorCertificate",
    "NONSINGULAR_M",
    "Z_NOT_M",
    "NOT_Z",
    "nonneg_spectral_radius",
    "matrix_spectral_radius",
    "classify",
    "is_nonsingular_m_matrix",
]

NONSINGULAR_M = "nonsingular-M"
Z_NOT_M = "Z-not-nonsingular-M"
NOT_Z = "not-Z"

# components below this fraction of max(x) are dropped for the lower bound
_SUPPORT_CUT = 1e-8


class SpectralConvergenceError(RuntimeError):
    """Power iteration did not close its bracket; ``bracket`` holds ``(lo, hi)``."""

    def __init__(self, message, bracket, x):
        super().__init__(message)
        self.bracket = bracket
        self.x = x


def _machine_shift(max_entry):
    return 1e-12 * max_entry + 1e-300


def _bracketed_power(apply, n, degree, max_entry, tol, max_iter):
    """Collatz-Wielandt bracketed power iteration.

    ``apply(x)`` returns ``B x^{degree}`` for a nonnegative operator ``B``.
    Returns ``(lo, hi, x_hi)`` where ``lo <= rho(B) <= hi`` and ``x_hi`` is
    the positive vector that produced ``hi``.

    The first half of the budget runs with a machine-scale diagonal shift;
    if the bracket is still open the shift is raised to the current upper
    bound, which breaks periodicity without moving the bracket.
    """
    shift = _machine_shift(max_entry)
    x = np.ones(n)
    lo, hi = 0.0, np.inf
    x_hi = x.copy()
    for k in range(max_iter):
        if k == max_iter // 2 and np.isfinite(hi):
            shift = _machine_shift(max_entry) + hi
        xp = x**degree
        y = apply(x) + shift * xp
        if np.all(xp > 0):
            ratios = y / xp
            step_hi = ratios.max() - shift
            step_lo = ratios.min() - shift
            if step_hi < hi:
                hi, x_hi = step_hi, x.copy()
        else:
            step_lo = -np.inf
        support = x > _SUPPORT_CUT * x.max()
        if not np.all(support):
            xt = np.where(support, x, 0.0)
            xtp = xt**degree
            yt = apply(xt) + shift * xtp
            step_lo = max(step_lo, (yt[support] / xtp[support]).min() - shift)
        lo = max(lo, step_lo)
        if hi - lo <= tol * max(hi, 0.0) or hi <= 0.0:
            return max(lo, 0.0), max(hi, 0.0), x_hi
        x = y ** (1.0 / degree)
        x = x / x.max()
    raise SpectralConvergenceError(
        f"power iteration bracket [{lo!r}, {hi!r}] still open after {max_iter} steps",
        (max(lo, 0.0), hi),
        x_hi,
    )


def nonneg_spectral_radius(B: Tensor, tol=1e-10, max_iter=10_000):
    """Spectral radius of a nonnegative tensor and its power-iteration vector.

    Returns ``(rho, x)``; ``rho`` is the midpoint of a bracket whose relative
    width is at most ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if np.any(B.values < 0):
        raise ValueError("spectral radius requested for a tensor with negative entries")
    max_entry = float(B.values.max()) if B.nnz else 0.0
    lo, hi, x = _bracketed_power(lambda v: contract(B, v), B.dim, B.order - 1, max_entry, tol, max_iter)
    return 0.5 * (lo + hi), x


def matrix_spectral_radius(J, tol=1e-12, max_iter=10_000):
    """Perron root of a nonnegative square matrix."""
    J = np.asarray(J, dtype=np.float64)
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise ValueError("matrix must be square")
    if np.any(J < 0):
        raise ValueError("matrix has negative entries")
    max_entry = float(J.max()) if J.size else 0.0
    lo, hi, _ = _bracketed_power(lambda v: J @ v, J.shape[0], 1, max_entry, tol, max_iter)
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class MTensorCertificate:
    classification: str
    s: float
    rho_B: float | None
    witness: np.ndarray | None = None
    note: str = ""

    @property
    def is_nonsingular_m(self):
        return self.classification == NONSINGULAR_M


def _shifted_complement(A: Tensor, s):
    """``B = s I - A``."""
    return Tensor.identity(A.order, A.dim, s) - A


def classify(A: Tensor, tol=1e-10, max_iter=10_000) -> MTensorCertificate:
    """Decide whether ``A`` is a nonsingular M-tensor via ``A = sI - B``."""
    diag = A.diagonal()
    s = float(diag.max())
    if not is_z_tensor(A):
        return MTensorCertificate(NOT_Z, s, None)
    B = _shifted_complement(A, s)
    note = ""
    try:
        lo, hi, x = _bracketed_power(
            lambda v: contract(B, v), A.dim, A.order - 1, float(B.values.max(initial=0.0)), tol, max_iter
        )
    except SpectralConvergenceError as exc:
        lo, hi = exc.bracket
        x = exc.x
        note = "power iteration did not converge; decided from the bracket"
    rho = 0.5 * (lo + hi) if np.isfinite(hi) else lo

    if s > 0 and s > hi * (1.0 + tol):
        cls = NONSINGULAR_M
    elif abs(s - rho) <= tol * abs(s) or (lo < s <= hi):
        cls = Z_NOT_M
        note = "; ".join(filter(None, [note, "borderline: s is within tolerance of rho(B)"]))
    else:
        cls = Z_NOT_M

    witness = None
    if cls == NONSINGULAR_M and np.all(x > 0):
        if np.all(contract(A, x) > 0):
            witness = x
    return MTensorCertificate(cls, s, rho, witness, note)


def _is_triangular(P):
    return np.array_equal(P, np.tril(P)) or np.array_equal(P, np.triu(P))


def is_nonsingular_m_matrix(P, tol=1e-10) -> bool:
    """True iff ``P`` is a Z-matrix with ``s > rho(sI - P)`` for ``s = max diag``."""
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("matrix must be square")
    off = P - np.diag(np.diag(P))
    if np.any(off > 0):
        return False
    d = np.diag(P)
    if np.any(d <= 0):
        return False
    if _is_triangular(P):
        return True
    s = float(d.max())
    B = s * np.eye(P.shape[0]) - P
    try:
        lo, hi, _ = _bracketed_power(lambda v: B @ v, P.shape[0], 1, float(B.max()), tol, 10_000)
    except SpectralConvergenceError as exc:
        lo, hi = exc.bracket
    return s > hi * (1.0 + tol)

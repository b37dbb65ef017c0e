"""Desk-scale verification: solution enumeration over zero patterns, dense
reference kernels, finite-difference Jacobians and TCP residuals."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .solver import PreconditionError, SolverOptions, maximal_solve, minimal_solve
from .spectral import classify
from .tensor import Tensor, contract, is_z_tensor, subtensor

__all__ = [
    "SolutionSet",
    "OracleLimitError",
    "dense_contract",
    "dense_contract_matrix",
    "enumerate_solutions",
    "verify_solution",
    "fd_jacobian",
    "tcp_residual",
]

DENSE_LIMIT = 10**6


class OracleLimitError(ValueError):
    pass


def _dense(A: Tensor):
    if A.dim**A.order > DENSE_LIMIT:
        raise OracleLimitError(f"dense reference needs n^m = {A.dim ** A.order} > {DENSE_LIMIT}")
    return A.to_dense()


def dense_contract(A: Tensor, x):
    """``A x^{m-1}`` by repeated dense contraction over the last axis."""
    T = _dense(A)
    x = np.asarray(x, dtype=np.float64)
    for _ in range(A.order - 1):
        T = T @ x
    return T


def dense_contract_matrix(A: Tensor, x):
    T = _dense(A)
    x = np.asarray(x, dtype=np.float64)
    for _ in range(A.order - 2):
        T = T @ x
    return T


def verify_solution(A: Tensor, b, x, tol=1e-9) -> bool:
    """``x >= -tol`` and ``||A x^{m-1} - b||_inf <= tol (||b||_inf + 1)``."""
    x = np.asarray(x, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if np.any(x < -tol):
        return False
    res = np.max(np.abs(contract(A, x) - b), initial=0.0)
    return bool(res <= tol * (np.max(np.abs(b), initial=0.0) + 1.0))


def fd_jacobian(A: Tensor, x, h=1e-5):
    """Central-difference Jacobian of ``x -> A x^{m-1}``."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    J = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        J[:, j] = (contract(A, x + e) - contract(A, x - e)) / (2 * h)
    return J


def tcp_residual(A: Tensor, b, x):
    """Return ``(x, A x^{m-1} - b, x . (A x^{m-1} - b))``."""
    x = np.asarray(x, dtype=np.float64)
    dual = contract(A, x) - np.asarray(b, dtype=np.float64)
    return x, dual, float(x @ dual)


@dataclass
class SolutionSet:
    solutions: list
    degenerate_patterns: list = field(default_factory=list)
    extremal: tuple | None = None

    def __len__(self):
        return len(self.solutions)


def _extremal(sols, atol):
    if not sols:
        return None
    lo = hi = None
    for i, s in enumerate(sols):
        if lo is None and all(np.all(s <= t + atol) for t in sols):
            lo = i
        if hi is None and all(np.all(s >= t - atol) for t in sols):
            hi = i
    if lo is None or hi is None:
        return None
    return lo, hi


def _candidates(At, bt, opts):
    """Positive candidate solutions of a reduced system, and a degeneracy flag."""
    cands = []
    diag_ok = bool(np.all(At.diagonal() > 0))
    cert = classify(At) if diag_ok else None
    degenerate = cert is None or not cert.is_nonsingular_m
    if diag_ok:
        try:
            rep = minimal_solve(At, bt, plan=None, opts=opts)
            if rep.converged:
                cands.append(rep.x)
            else:
                degenerate = True
        except PreconditionError:
            degenerate = True
    if cert is not None and cert.is_nonsingular_m:
        rep = maximal_solve(At, bt, plan=None, opts=opts)
        if rep.converged:
            cands.append(rep.x)
        if len(cands) == 2 and np.all(cands[0] > 0) and np.max(np.abs(cands[0] - cands[1])) > 1e-8:
            # two distinct positive solutions on one support
            degenerate = True
    return [c for c in cands if np.all(c > 0)], degenerate


def enumerate_solutions(A: Tensor, b, n_limit=12, opts=None) -> SolutionSet:
    """All nonnegative solutions reachable by zero-pattern search.

    For every candidate zero set ``S`` inside ``{i : b_i = 0}``, the reduced
    system on the complement is solved; strictly positive reduced solutions
    whose zero extension solves the full equation are kept. Patterns whose
    reduced tensor is not a nonsingular M-tensor, or whose iteration fails,
    are listed in ``degenerate_patterns``.
    """
    b = np.asarray(b, dtype=np.float64)
    n = A.dim
    if n > n_limit:
        raise OracleLimitError(f"dimension {n} exceeds enumeration limit {n_limit}")
    if np.any(b < 0):
        raise ValueError("enumeration requires b >= 0")
    if not is_z_tensor(A):
        raise ValueError("enumeration requires a Z-tensor")
    opts = opts or SolverOptions()
    I0 = [int(i) for i in np.flatnonzero(b == 0)]
    found, degenerate = [], []
    for r in range(len(I0) + 1):
        for S in itertools.combinations(I0, r):
            keep = [i for i in range(n) if i not in S]
            if not keep:
                if np.all(b == 0):
                    found.append(np.zeros(n))
                continue
            cands, bad = _candidates(subtensor(A, keep), b[keep], opts)
            if bad:
                degenerate.append(tuple(S))
            for c in cands:
                x = np.zeros(n)
                x[keep] = c
                if verify_solution(A, b, x, 1e-9):
                    found.append(x)
    found.sort(key=lambda v: tuple(v))
    unique = []
    for x in found:
        if not any(np.max(np.abs(x - u)) <= 1e-8 for u in unique):
            unique.append(x)
    return SolutionSet(unique, degenerate, _extremal(unique, 1e-8))

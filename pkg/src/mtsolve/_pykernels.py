"""Pure NumPy versions of the hot kernels.

Each function mirrors the compiled one in ``_ckernels.pyx`` argument for
argument, including the per-entry multiplication order, so both backends
agree to rounding.
"""

import numpy as np


def contract(idx, vals, x, n):
    """Return ``A x^{m-1}`` for a COO tensor given as ``(idx, vals)``."""
    terms = np.array(vals, dtype=np.float64, copy=True)
    for c in range(1, idx.shape[1]):
        terms *= x[idx[:, c]]
    return np.bincount(idx[:, 0], weights=terms, minlength=n).astype(np.float64)


def contract_matrix(idx, vals, x, n):
    """Return the ``n x n`` matrix ``A x^{m-2}``."""
    terms = np.array(vals, dtype=np.float64, copy=True)
    for c in range(2, idx.shape[1]):
        terms *= x[idx[:, c]]
    flat = idx[:, 0] * n + idx[:, 1]
    out = np.bincount(flat, weights=terms, minlength=n * n)
    return out.reshape(n, n).astype(np.float64)


def forward_sub(T, r, unit_diagonal=False):
    """Solve ``T y = r`` for lower-triangular ``T``."""
    n = T.shape[0]
    y = np.zeros(n)
    for i in range(n):
        s = r[i]
        for j in range(i):
            s -= T[i, j] * y[j]
        y[i] = s if unit_diagonal else s / T[i, i]
    return y


def back_sub(T, r):
    """Solve ``T y = r`` for upper-triangular ``T``."""
    n = T.shape[0]
    y = np.zeros(n)
    for i in range(n - 1, -1, -1):
        s = r[i]
        for j in range(i + 1, n):
            s -= T[i, j] * y[j]
        y[i] = s / T[i, i]
    return y

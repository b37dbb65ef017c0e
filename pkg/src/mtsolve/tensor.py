"""Sparse order-m tensors in coordinate storage and the multilinear kernels."""

from __future__ import annotations

import math
from collections.abc import Iterable

import numpy as np

from . import kernels

__all__ = [
    "Tensor",
    "contract",
    "contract_matrix",
    "semi_symmetrize",
    "power_vec",
    "subtensor",
    "is_z_tensor",
]


def _canonical(indices, values, dim):
    """Sort rows lexicographically, sum duplicates, drop zeros.

    Returns ``(indices, values, n_duplicates)``.
    """
    indices = np.asarray(indices, dtype=np.int64)
    values = np.asarray(values, dtype=np.float64)
    if indices.ndim != 2 or indices.shape[0] != values.shape[0]:
        raise ValueError("indices must be (nnz, m) and match values in length")
    if not np.all(np.isfinite(values)):
        raise ValueError("tensor values must be finite")
    if indices.size and (indices.min() < 0 or indices.max() >= dim):
        raise ValueError(f"index out of range for dimension {dim}")
    if indices.shape[0] == 0:
        return indices.reshape(0, indices.shape[1]), values.reshape(0), 0
    order = np.lexsort(indices.T[::-1])
    indices = indices[order]
    values = values[order]
    new_row = np.ones(indices.shape[0], dtype=bool)
    new_row[1:] = np.any(indices[1:] != indices[:-1], axis=1)
    starts = np.flatnonzero(new_row)
    n_dup = indices.shape[0] - starts.size
    if n_dup:
        values = np.add.reduceat(values, starts)
        indices = indices[starts]
    keep = values != 0.0
    return np.ascontiguousarray(indices[keep]), np.ascontiguousarray(values[keep]), n_dup


class Tensor:
    """Real order-``m``, dimension-``n`` tensor stored as sorted COO entries.

    Indices are 0-based. Entries are coalesced, sorted lexicographically and
    nonzero; the arrays are read-only so a tensor can be shared freely.
    """

    __slots__ = ("order", "dim", "indices", "values", "semi_symmetric", "n_duplicates")

    def __init__(self, order, dim, indices, values, semi_symmetric=False):
        if order < 2:
            raise ValueError("tensor order must be at least 2")
        if dim < 1:
            raise ValueError("tensor dimension must be at least 1")
        indices = np.asarray(indices, dtype=np.int64).reshape(-1, order)
        idx, vals, n_dup = _canonical(indices, values, dim)
        idx.flags.writeable = False
        vals.flags.writeable = False
        self.order = int(order)
        self.dim = int(dim)
        self.indices = idx
        self.values = vals
        self.semi_symmetric = bool(semi_symmetric)
        self.n_duplicates = n_dup

    @classmethod
    def from_entries(cls, order, dim, entries: Iterable, semi_symmetric=False):
        """Build from ``(index_tuple, value)`` pairs with 0-based indices."""
        entries = list(entries)
        idx = np.array([tuple(t) for t, _ in entries], dtype=np.int64).reshape(-1, order)
        vals = np.array([v for _, v in entries], dtype=np.float64)
        return cls(order, dim, idx, vals, semi_symmetric)

    @classmethod
    def from_dense(cls, array):
        array = np.asarray(array, dtype=np.float64)
        n = array.shape[0]
        if any(s != n for s in array.shape):
            raise ValueError("dense tensor must have equal extents")
        idx = np.argwhere(array != 0.0)
        return cls(array.ndim, n, idx, array[tuple(idx.T)])

    @classmethod
    def identity(cls, order, dim, scale=1.0):
        idx = np.repeat(np.arange(dim)[:, None], order, axis=1)
        return cls(order, dim, idx, np.full(dim, float(scale)), semi_symmetric=True)

    @property
    def nnz(self):
        return self.values.shape[0]

    def entries(self):
        for row, v in zip(self.indices, self.values):
            yield tuple(int(i) for i in row), float(v)

    def to_dense(self):
        out = np.zeros((self.dim,) * self.order)
        out[tuple(self.indices.T)] = self.values
        return out

    def diagonal(self):
        """The entries ``a_{ii...i}`` as a length-``n`` vector (zeros where absent)."""
        d = np.zeros(self.dim)
        mask = np.all(self.indices == self.indices[:, :1], axis=1)
        d[self.indices[mask, 0]] = self.values[mask]
        return d

    def scaled(self, c):
        return Tensor(self.order, self.dim, self.indices, c * self.values, self.semi_symmetric)

    def __add__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        if (self.order, self.dim) != (other.order, other.dim):
            raise ValueError("tensor shapes differ")
        return Tensor(
            self.order,
            self.dim,
            np.vstack([self.indices, other.indices]),
            np.concatenate([self.values, other.values]),
        )

    def __neg__(self):
        return self.scaled(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        return (
            self.order == other.order
            and self.dim == other.dim
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def __repr__(self):
        return f"Tensor(order={self.order}, dim={self.dim}, nnz={self.nnz})"


def _check_vec(A, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (A.dim,):
        raise ValueError(f"vector of length {x.shape} does not match tensor dimension {A.dim}")
    return x


def contract(A: Tensor, x) -> np.ndarray:
    """``A x^{m-1}``: entry i sums ``a_{i i2..im} x_{i2}...x_{im}``."""
    x = _check_vec(A, x)
    return kernels.contract(A.indices, A.values, x, A.dim)


def contract_matrix(A: Tensor, x) -> np.ndarray:
    """``A x^{m-2}``: the ``n x n`` matrix with ``(i, j)`` entry summed over i3..im."""
    x = _check_vec(A, x)
    return kernels.contract_matrix(A.indices, A.values, x, A.dim)


def power_vec(x, r):
    """Elementwise power ``x^{[r]}`` for ``r > 0``."""
    x = np.asarray(x, dtype=np.float64)
    if r <= 0:
        raise ValueError("power must be positive")
    if float(r).is_integer():
        return x ** int(r)
    if np.any(x < 0):
        raise ValueError("negative entry raised to a fractional power")
    if r == 0.5:
        return np.sqrt(x)
    if r == 1.0 / 3.0:
        return np.cbrt(x)
    return x**r


def _distinct_permutations(seq):
    """Distinct orderings of ``seq`` in lexicographic order."""
    a = sorted(seq)
    n = len(a)
    while True:
        yield tuple(a)
        i = n - 2
        while i >= 0 and a[i] >= a[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while a[j] <= a[i]:
            j -= 1
        a[i], a[j] = a[j], a[i]
        a[i + 1 :] = reversed(a[i + 1 :])


def _arrangements(trailing):
    counts = {}
    for t in trailing:
        counts[t] = counts.get(t, 0) + 1
    k = math.factorial(len(trailing))
    for c in counts.values():
        k //= math.factorial(c)
    return k


def semi_symmetrize(A: Tensor) -> Tensor:
    """Average ``A`` over all permutations of index positions 2..m.

    Groups whose arrangements are already all present with equal values are
    copied unchanged, which makes the operation idempotent bit for bit.
    """
    if A.semi_symmetric:
        return A
    groups = {}
    for row, v in zip(A.indices.tolist(), A.values.tolist()):
        key = (row[0], tuple(sorted(row[1:])))
        groups.setdefault(key, []).append((tuple(row[1:]), v))
    idx, vals = [], []
    for (i, multiset), members in groups.items():
        k = _arrangements(multiset)
        values = [v for _, v in members]
        if len(members) == k and all(v == values[0] for v in values):
            for trailing, v in members:
                idx.append((i,) + trailing)
                vals.append(v)
            continue
        avg = math.fsum(values) / k
        for trailing in _distinct_permutations(multiset):
            idx.append((i,) + trailing)
            vals.append(avg)
    idx = np.array(idx, dtype=np.int64).reshape(-1, A.order)
    return Tensor(A.order, A.dim, idx, np.array(vals), semi_symmetric=True)


def subtensor(A: Tensor, idx) -> Tensor:
    """Keep entries whose indices all lie in ``idx``; reindex to ``range(len(idx))``."""
    keep = np.unique(np.asarray(list(idx), dtype=np.int64))
    if keep.size == 0:
        raise ValueError("subtensor index set must be nonempty")
    if keep.min() < 0 or keep.max() >= A.dim:
        raise ValueError("subtensor index out of range")
    if keep.size == A.dim:
        return Tensor(A.order, A.dim, A.indices, A.values, A.semi_symmetric)
    remap = np.full(A.dim, -1, dtype=np.int64)
    remap[keep] = np.arange(keep.size)
    mapped = remap[A.indices]
    rows = np.all(mapped >= 0, axis=1)
    return Tensor(A.order, keep.size, mapped[rows], A.values[rows], A.semi_symmetric)


def is_z_tensor(A: Tensor) -> bool:
    """True when every stored off-diagonal entry is nonpositive."""
    off = ~np.all(A.indices == A.indices[:, :1], axis=1)
    return bool(np.all(A.values[off] <= 0.0))

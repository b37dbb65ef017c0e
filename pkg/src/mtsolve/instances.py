"""Named test instances and random M-tensor generators."""

from __future__ import annotations

import numpy as np

from .tensor import Tensor

__all__ = [
    "pair_tensor",
    "pair_rhs",
    "two_solution_tensor",
    "no_maximal_tensor",
    "random_m_tensor",
    "random_semi_symmetric",
]


def pair_tensor(k=1):
    """Order-4, dimension-2k tensor with 2^k nonnegative solutions for ``pair_rhs``.

    ``a_iiii = 1`` and ``a_{2i-1,2i-1,2i-1,2i} = -2`` (1-based).
    """
    n = 2 * k
    entries = [((i, i, i, i), 1.0) for i in range(n)]
    entries += [((2 * i, 2 * i, 2 * i, 2 * i + 1), -2.0) for i in range(k)]
    return Tensor.from_entries(4, n, entries)


def pair_rhs(k=1):
    """``[0, 1, ..., 0, 1]``."""
    return np.tile([0.0, 1.0], k)


def two_solution_tensor(m):
    """Order-m, dimension-2: ``a_{1..1} = a_{2..2} = 1``, ``a_{11..12} = -2``."""
    return Tensor.from_entries(
        m, 2, [((0,) * m, 1.0), ((1,) * m, 1.0), ((0,) * (m - 1) + (1,), -2.0)]
    )


def no_maximal_tensor():
    """Order-4, dimension-3 Z-tensor that is not a nonsingular M-tensor.

    With ``b = [0, 0, 1]`` every ``[c, 0, (1 + c^3)^{1/3}]`` is a solution.
    """
    return Tensor.from_entries(
        4,
        3,
        [
            ((0, 0, 0, 0), 0.0),
            ((1, 1, 1, 1), 1.0),
            ((2, 2, 2, 2), 1.0),
            ((0, 0, 0, 1), -1.0),
            ((2, 0, 0, 0), -1.0),
        ],
    )


def random_m_tensor(rng, order, dim, density=1.0, margin=None):
    """Diagonally dominant nonsingular M-tensor.

    Off-diagonal entries are drawn uniformly from ``[-1, 0)`` with the given
    density; each diagonal entry exceeds its row's off-diagonal mass, so
    ``A e^{m-1} > 0``.
    """
    shape = (dim,) * order
    off = -rng.uniform(0.0, 1.0, size=shape) * (rng.uniform(size=shape) < density)
    for i in range(dim):
        off[(i,) * order] = 0.0
    row_mass = -off.reshape(dim, -1).sum(axis=1)
    if margin is None:
        margin = rng.uniform(0.1, 1.0, size=dim)
    for i in range(dim):
        off[(i,) * order] = row_mass[i] + np.broadcast_to(margin, (dim,))[i]
    return Tensor.from_dense(off)


def random_semi_symmetric(rng, order, dim, density=0.5):
    """Random sparse tensor made semi-symmetric by averaging."""
    from .tensor import semi_symmetrize

    shape = (dim,) * order
    vals = rng.normal(size=shape) * (rng.uniform(size=shape) < density)
    return semi_symmetrize(Tensor.from_dense(vals))

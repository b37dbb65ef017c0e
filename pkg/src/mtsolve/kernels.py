"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the NumPy
fallback is loaded. Setting ``MTSOLVE_PURE_PYTHON=1`` forces the fallback.
"""

import importlib
import os

import numpy as np

__all__ = ["BACKEND", "load_backend", "contract", "contract_matrix", "forward_sub", "back_sub"]


def load_backend(name):
    """Import a kernel module by backend name (``"cython"`` or ``"python"``)."""
    if name == "cython":
        return importlib.import_module("mtsolve._ckernels")
    if name == "python":
        return importlib.import_module("mtsolve._pykernels")
    raise ValueError(f"unknown kernel backend {name!r}")


def _select():
    if os.environ.get("MTSOLVE_PURE_PYTHON", "") not in ("", "0"):
        return "python", load_backend("python")
    try:
        return "cython", load_backend("cython")
    except ImportError:
        return "python", load_backend("python")


BACKEND, _impl = _select()


def contract(idx, vals, x, n):
    return _impl.contract(idx, vals, np.ascontiguousarray(x, dtype=np.float64), n)


def contract_matrix(idx, vals, x, n):
    return _impl.contract_matrix(idx, vals, np.ascontiguousarray(x, dtype=np.float64), n)


def forward_sub(T, r, unit_diagonal=False):
    return _impl.forward_sub(
        np.ascontiguousarray(T, dtype=np.float64),
        np.ascontiguousarray(r, dtype=np.float64),
        unit_diagonal,
    )


def back_sub(T, r):
    return _impl.back_sub(
        np.ascontiguousarray(T, dtype=np.float64), np.ascontiguousarray(r, dtype=np.float64)
    )

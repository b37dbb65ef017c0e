"""Hypothesis properties over random tensors and right-hand sides."""

import json

import numpy as np
from hypothesis import assume, given
from hypothesis import strategies as st

from mtsolve import (
    SolverOptions,
    Tensor,
    build_plan,
    contract,
    contract_matrix,
    maximal_solve,
    minimal_solve,
    semi_symmetrize,
    verify_solution,
)
from mtsolve import kernels
from mtsolve.instances import random_m_tensor, random_semi_symmetric
from mtsolve.io import dumps, format_tensor, parse_tensor
from mtsolve.oracle import dense_contract, dense_contract_matrix, fd_jacobian
from mtsolve.solver import compare_splittings

seeds = st.integers(0, 2**32 - 1)
orders = st.integers(2, 4)
dims = st.integers(1, 5)
finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


def _rhs(rng, n, zero_frac=0.5):
    b = rng.uniform(0.0, 2.0, n)
    b[rng.uniform(size=n) < zero_frac] = 0.0
    return b


@given(seeds, orders, dims)
def test_contract_matches_dense(seed, m, n):
    rng = np.random.default_rng(seed)
    A = random_semi_symmetric(rng, m, n, 0.5)
    x = rng.normal(size=n)
    assert np.allclose(contract(A, x), dense_contract(A, x), rtol=1e-12, atol=1e-12)
    assert np.allclose(contract_matrix(A, x), dense_contract_matrix(A, x), rtol=1e-12, atol=1e-12)


@given(seeds, orders, dims, st.floats(0.1, 10.0))
def test_contract_homogeneous(seed, m, n, t):
    rng = np.random.default_rng(seed)
    A = Tensor.from_dense(rng.normal(size=(n,) * m))
    x = rng.normal(size=n)
    assert np.allclose(contract(A, t * x), t ** (m - 1) * contract(A, x), rtol=1e-10, atol=1e-10)


@given(seeds, orders, dims)
def test_semi_symmetrize_properties(seed, m, n):
    rng = np.random.default_rng(seed)
    A = Tensor.from_dense(rng.normal(size=(n,) * m) * (rng.uniform(size=(n,) * m) < 0.5))
    S = semi_symmetrize(A)
    x = rng.normal(size=n)
    assert np.allclose(contract(S, x), contract(A, x), rtol=1e-10, atol=1e-10)
    assert semi_symmetrize(Tensor(S.order, S.dim, S.indices, S.values)) == S
    D = S.to_dense()
    if m >= 3:
        assert np.allclose(D, np.swapaxes(D, 1, 2))


@given(seeds, st.integers(3, 4), st.integers(1, 4))
def test_derivative_identity(seed, m, n):
    rng = np.random.default_rng(seed)
    A = random_semi_symmetric(rng, m, n, 0.7)
    x = rng.uniform(0.5, 1.5, n)
    J = fd_jacobian(A, x)
    ref = (m - 1) * contract_matrix(A, x)
    assert np.allclose(J, ref, rtol=1e-5, atol=1e-5 * max(1.0, np.abs(ref).max()))


@given(seeds, orders, dims)
def test_backends_agree(seed, m, n):
    try:
        cy = kernels.load_backend("cython")
    except ImportError:
        return
    py = kernels.load_backend("python")
    rng = np.random.default_rng(seed)
    A = random_semi_symmetric(rng, m, n, 0.6)
    x = rng.normal(size=n)
    assert np.allclose(cy.contract(A.indices, A.values, x, n), py.contract(A.indices, A.values, x, n), rtol=1e-12, atol=1e-12)


@given(seeds, st.integers(2, 4), st.integers(1, 5))
def test_extremal_solutions_ordered_and_monotone(seed, m, n):
    rng = np.random.default_rng(seed)
    A = random_m_tensor(rng, m, n, density=0.6)
    b = _rhs(rng, n)
    opts = SolverOptions(keep_history=True)
    lo = minimal_solve(A, b, opts=opts)
    hi = maximal_solve(A, b, opts=opts)
    assert lo.converged and hi.converged
    assert verify_solution(A, b, lo.x, 1e-9) and verify_solution(A, b, hi.x, 1e-9)
    assert np.all(lo.x <= hi.x + 1e-9)
    for rep, sign in ((lo, 1.0), (hi, -1.0)):
        for a, c in zip(rep.history, rep.history[1:]):
            assert np.all(sign * (c - a) >= -1e-15 * np.max(np.abs(a), initial=0.0))
    # zeros of the minimal solution stay inside the zero set of b
    assert set(np.flatnonzero(lo.x == 0)) <= set(np.flatnonzero(b == 0))


@given(seeds, st.integers(1, 5))
def test_positive_rhs_gives_unique_solution(seed, n):
    rng = np.random.default_rng(seed)
    A = random_m_tensor(rng, 3, n)
    b = rng.uniform(0.1, 2.0, n)
    lo = minimal_solve(A, b)
    hi = maximal_solve(A, b)
    assert np.allclose(lo.x, hi.x, atol=1e-9)


@given(seeds, st.integers(2, 5), st.sampled_from(["min", "max"]))
def test_comparison_ordering(seed, n, mode):
    rng = np.random.default_rng(seed)
    A = random_m_tensor(rng, 3, n, density=0.7)
    b = _rhs(rng, n)
    assume(np.any(b > 0) or mode == "max")
    rep = compare_splittings(A, b, build_plan(A, "jacobi"), build_plan(A, "full"), mode, steps=60)
    assert rep.holds, rep


@given(seeds, orders, dims)
def test_tensor_text_round_trip(seed, m, n):
    rng = np.random.default_rng(seed)
    A = random_semi_symmetric(rng, m, n, 0.5)
    assert parse_tensor(format_tensor(A)) == A


@given(st.lists(finite, max_size=8))
def test_json_floats_round_trip(xs):
    assert json.loads(dumps({"x": np.array(xs, dtype=float)}))["x"] == [float(v) for v in xs]

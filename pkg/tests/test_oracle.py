"""Reference kernels and enumeration, checked against hand-computed values."""

import numpy as np
import pytest

from mtsolve import Tensor, contract, contract_matrix, semi_symmetrize
from mtsolve.instances import no_maximal_tensor, pair_rhs, pair_tensor, random_semi_symmetric
from mtsolve.oracle import (
    OracleLimitError,
    dense_contract,
    dense_contract_matrix,
    enumerate_solutions,
    fd_jacobian,
    tcp_residual,
    verify_solution,
)


def test_dense_contract_by_hand():
    A = pair_tensor(1)
    # row 1: x1^3 - 2 x1^2 x2, row 2: x2^3
    x = np.array([2.0, 3.0])
    assert np.allclose(dense_contract(A, x), [8 - 24, 27])
    assert np.allclose(dense_contract_matrix(A, x), [[4 - 12, 0], [0, 9]])


def test_sparse_matches_dense(rng):
    for order in (2, 3, 4):
        A = random_semi_symmetric(rng, order, 4, 0.6)
        x = rng.uniform(0.1, 2.0, 4)
        assert np.allclose(contract(A, x), dense_contract(A, x), rtol=1e-13, atol=1e-13)
        assert np.allclose(contract_matrix(A, x), dense_contract_matrix(A, x), rtol=1e-13, atol=1e-13)


def test_dense_limit():
    with pytest.raises(OracleLimitError):
        dense_contract(Tensor.identity(4, 40), np.ones(40))


def test_verify_solution_examples():
    A = pair_tensor(1)
    b = np.array([0.0, 1.0])
    assert verify_solution(A, b, [2.0, 1.0])
    assert verify_solution(A, b, [0.0, 1.0])
    assert not verify_solution(A, b, [1.0, 1.0])
    assert verify_solution(A, np.zeros(2), np.zeros(2))
    assert not verify_solution(A, b, [-1e-3, 1.0])


def test_fd_jacobian_identity():
    J = fd_jacobian(Tensor.identity(3, 2), [1.0, 2.0])
    assert np.allclose(J, np.diag([2.0, 4.0]), atol=1e-6)


def test_fd_jacobian_pair():
    A = pair_tensor(1)
    x = np.array([2.0, 1.0])
    J = fd_jacobian(A, x)
    assert np.allclose(J, 3 * contract_matrix(semi_symmetrize(A), x), atol=1e-5)


def test_fd_jacobian_linear():
    M = np.array([[2.0, -1.0], [-0.5, 3.0]])
    A = Tensor.from_dense(M)
    assert np.allclose(fd_jacobian(A, [0.3, 0.7]), M, atol=1e-9)


def test_tcp_residual():
    A = pair_tensor(1)
    b = np.array([0.0, 1.0])
    for x in ([0.0, 1.0], [2.0, 1.0]):
        _, dual, comp = tcp_residual(A, b, x)
        assert np.allclose(dual, 0) and comp == 0
    _, dual, comp = tcp_residual(A, b, [1.0, 1.0])
    assert np.allclose(dual, [-1.0, 0.0]) and comp == -1.0


@pytest.mark.parametrize("k", [1, 2, 3])
def test_enumerate_pair_family(k):
    sols = enumerate_solutions(pair_tensor(k), pair_rhs(k))
    assert len(sols) == 2**k
    assert not sols.degenerate_patterns
    for s in sols.solutions:
        assert set(np.round(s[0::2], 12)) <= {0.0, 2.0}
        assert np.allclose(s[1::2], 1.0)
    lo, hi = sols.extremal
    assert np.allclose(sols.solutions[lo], pair_rhs(k))
    assert np.allclose(sols.solutions[hi], np.tile([2.0, 1.0], k))
    # lexicographic order
    keys = [tuple(s) for s in sols.solutions]
    assert keys == sorted(keys)


def test_enumerate_positive_rhs():
    sols = enumerate_solutions(pair_tensor(1), np.array([1.0, 1.0]))
    assert len(sols) == 1
    assert np.all(sols.solutions[0] > 0)


def test_enumerate_no_maximal_flags_degenerate():
    sols = enumerate_solutions(no_maximal_tensor(), np.array([0.0, 0.0, 1.0]))
    assert (1,) in sols.degenerate_patterns
    assert any(np.allclose(s, [0, 0, 1]) for s in sols.solutions)


def test_enumerate_members_are_tcp_solutions():
    A = pair_tensor(2)
    b = pair_rhs(2)
    for x in enumerate_solutions(A, b).solutions:
        _, dual, comp = tcp_residual(A, b, x)
        assert abs(comp) <= 1e-9 and np.all(dual >= -1e-9)


def test_enumerate_errors():
    with pytest.raises(OracleLimitError):
        enumerate_solutions(pair_tensor(7), pair_rhs(7))
    with pytest.raises(ValueError):
        enumerate_solutions(pair_tensor(1), np.array([-1.0, 1.0]))

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from exactrepair.gf import NoSolutionError, PrimeField, is_prime

F = PrimeField(11)


def random_matrix(seed, rows, cols, q=11):
    return np.random.default_rng(seed).integers(0, q, size=(rows, cols))


def test_rejects_composite_order():
    assert not is_prime(9)
    with pytest.raises(ValueError):
        PrimeField(9)


def test_rank_basics():
    assert F.rank(F.identity(4)) == 4
    assert F.rank(F.zeros(3, 5)) == 0
    assert F.rank(F.array([[1, 2], [2, 4]])) == 1


def test_inverse_and_solve_identity():
    b = F.array([[3, 4], [5, 6]])
    assert np.array_equal(F.solve(F.identity(2), b), b)
    a = F.array([[2, 3], [1, 5]])
    assert np.array_equal(F.matmul(a, F.inverse(a)), F.identity(2))


def test_inconsistent_system():
    a = F.array([[1, 1], [2, 2]])
    with pytest.raises(NoSolutionError):
        F.solve(a, F.array([[1], [3]]))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        F.solve(F.identity(2), F.zeros(3, 1))


@settings(max_examples=60)
@given(st.integers(0, 10**6), st.integers(1, 7), st.integers(1, 7))
def test_rank_bounds_and_row_permutation(seed, rows, cols):
    m = random_matrix(seed, rows, cols)
    r = F.rank(m)
    assert r <= min(rows, cols)
    perm = np.random.default_rng(seed + 1).permutation(rows)
    assert F.rank(m[perm]) == r


@settings(max_examples=60)
@given(st.integers(0, 10**6), st.integers(1, 6), st.integers(1, 6), st.integers(1, 3))
def test_solve_round_trip(seed, rows, cols, rhs):
    a = random_matrix(seed, rows, cols)
    x0 = random_matrix(seed + 2, cols, rhs)
    b = F.matmul(a, x0)
    x = F.solve(a, b)
    assert np.array_equal(F.matmul(a, x), b)


@settings(max_examples=40)
@given(st.integers(0, 10**6), st.integers(1, 6), st.integers(1, 6))
def test_nullspace(seed, rows, cols):
    m = random_matrix(seed, rows, cols)
    ker = F.nullspace(m)
    assert ker.shape == (cols, cols - F.rank(m))
    assert not F.matmul(m, ker).any()

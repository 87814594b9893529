import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_hermitian
from majorana_dqd.linalg import (
    NotHermitianError,
    SingularMatrixError,
    check_hermitian,
    devectorize,
    hermitian_eigendecompose,
    left_superop,
    residual_ok,
    right_superop,
    sandwich_superop,
    solve_linear,
    vectorize,
)


def test_diagonal_eigensystem():
    eig = hermitian_eigendecompose(np.diag([1.0, -1.0]))
    assert np.allclose(eig.values, [-1, 1])
    assert np.allclose(np.abs(eig.vectors), [[0, 1], [1, 0]])


def test_pauli_x_eigenvalues():
    eig = hermitian_eigendecompose(np.array([[0, 1], [1, 0]]))
    assert np.allclose(eig.values, [-1, 1])


@given(n=st.integers(2, 24), seed=st.integers(0, 2**32 - 1))
def test_eigensystem_contract(n, seed):
    a = random_hermitian(np.random.default_rng(seed), n)
    eig = hermitian_eigendecompose(a)
    scale = np.max(np.abs(a))
    assert np.max(np.abs(a - eig.reconstruct())) <= 1e-10 * scale
    v = eig.vectors
    assert np.max(np.abs(v.conj().T @ v - np.eye(n))) <= 1e-10
    assert np.all(np.diff(eig.values) >= 0)


def test_non_hermitian_rejected_with_asymmetry():
    a = np.array([[0, 1], [0, 0]], dtype=complex)
    with pytest.raises(NotHermitianError) as exc:
        hermitian_eigendecompose(a)
    assert exc.value.asymmetry == pytest.approx(1.0)


def test_tiny_asymmetry_accepted():
    a = np.array([[1, 1], [1 + 1e-14, 2]])
    check_hermitian(a)


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        check_hermitian(np.array([[np.nan, 0], [0, 1]]))


def test_solve_identity_and_diagonal():
    b = np.array([1 + 2j, -3, 0.5])
    assert np.allclose(solve_linear(np.eye(3), b), b)
    assert np.allclose(solve_linear(np.diag([2.0, 4.0]), np.array([2.0, 4.0])), [1, 1])


def test_solve_random_residual(rng):
    a = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16)) + 8 * np.eye(16)
    b = rng.normal(size=16) + 1j * rng.normal(size=16)
    x = solve_linear(a, b)
    assert residual_ok(a, x, b)


def test_solve_dimension_mismatch():
    with pytest.raises(ValueError):
        solve_linear(np.eye(3), np.ones(2))


def test_singular_reports_rank():
    a = np.array([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(SingularMatrixError) as exc:
        solve_linear(a, np.ones(2))
    assert exc.value.rank == 1
    x = solve_linear(a, np.array([1.0, 2.0]), lstsq=True)
    assert np.allclose(a @ x, [1, 2])


def test_vectorize_column_stacking():
    a, b, c, d = 1, 2, 3, 4
    assert list(vectorize(np.array([[a, b], [c, d]]))) == [a, c, b, d]


def test_vectorize_round_trip(rng):
    x = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    assert np.array_equal(devectorize(vectorize(x)), x)


def test_devectorize_bad_length():
    with pytest.raises(ValueError):
        devectorize(np.ones(5))


@given(seed=st.integers(0, 2**32 - 1))
def test_kronecker_identity(seed):
    r = np.random.default_rng(seed)
    a, x, b = (r.normal(size=(3, 3)) + 1j * r.normal(size=(3, 3)) for _ in range(3))
    assert np.allclose(sandwich_superop(a, b) @ vectorize(x), vectorize(a @ x @ b))
    assert np.allclose(left_superop(a) @ vectorize(x), vectorize(a @ x))
    assert np.allclose(right_superop(b) @ vectorize(x), vectorize(x @ b))

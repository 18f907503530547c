import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqed_stirap.errors import InvalidInputError, NotPSDError
from cqed_stirap.linalg import (dagger, hermitian_eig, is_hermitian, kron, kron_chain,
                                matrix_sqrt_psd, trace)

from conftest import random_density, random_hermitian


def test_eig_diagonal_matrix_sorted():
    vals, vecs = hermitian_eig(np.diag([3.0, -1.0, 2.0]).astype(complex))
    np.testing.assert_allclose(vals, [-1.0, 2.0, 3.0], atol=1e-15)
    np.testing.assert_allclose(np.abs(vecs), np.eye(3)[:, [1, 2, 0]], atol=1e-15)


def test_eig_pauli_y():
    vals, vecs = hermitian_eig(np.array([[0, -1j], [1j, 0]]))
    np.testing.assert_allclose(vals, [-1.0, 1.0], atol=1e-14)
    sy = np.array([[0, -1j], [1j, 0]])
    for k in range(2):
        np.testing.assert_allclose(sy @ vecs[:, k], vals[k] * vecs[:, k], atol=1e-14)


def test_eig_phase_convention():
    _, vecs = hermitian_eig(np.array([[1.0, 2 - 1j], [2 + 1j, -3.0]]))
    for k in range(2):
        col = vecs[:, k]
        big = col[np.argmax(np.abs(col))]
        assert abs(big.imag) < 1e-15 and big.real > 0


@pytest.mark.parametrize("n", [1, 2, 5, 16, 33, 64])
def test_eig_matches_numpy(rng, n):
    m = random_hermitian(rng, n)
    vals, vecs = hermitian_eig(m)
    ref = np.linalg.eigvalsh(m)
    scale = np.max(np.abs(ref))
    np.testing.assert_allclose(vals, ref, atol=1e-12 * scale)
    assert np.max(np.abs(m @ vecs - vecs * vals)) < 1e-11 * scale
    np.testing.assert_allclose(dagger(vecs) @ vecs, np.eye(n), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=8), st.integers(min_value=0, max_value=2**32 - 1))
def test_eig_reconstruction_property(n, seed):
    m = random_hermitian(np.random.default_rng(seed), n)
    vals, vecs = hermitian_eig(m)
    assert np.all(np.diff(vals) >= 0)
    np.testing.assert_allclose(vecs @ np.diag(vals) @ dagger(vecs), m, atol=1e-12 * max(1, np.abs(m).max()))


def test_eig_degenerate_is_deterministic():
    m = np.diag([1.0, 1.0, 2.0]).astype(complex)
    a = hermitian_eig(m)
    b = hermitian_eig(m.copy())
    assert np.array_equal(a.eigenvectors, b.eigenvectors)
    np.testing.assert_allclose(a.eigenvectors, np.eye(3), atol=0)


def test_eig_rejects_non_hermitian():
    with pytest.raises(InvalidInputError):
        hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(InvalidInputError):
        hermitian_eig(np.ones((2, 3)))


def test_is_hermitian():
    assert is_hermitian(np.array([[1, 1j], [-1j, 2]]))
    assert not is_hermitian(np.array([[1, 1j], [1j, 2]]))


def test_trace_cyclic(rng):
    a, b, c = (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)) for _ in range(3))
    assert abs(trace(a @ b @ c) - trace(c @ a @ b)) < 1e-12


def test_kron_rules(rng):
    a, b, c, d = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(4))
    np.testing.assert_allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d), atol=1e-12)
    np.testing.assert_allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-12)
    np.testing.assert_allclose(kron_chain(a, b, c), kron(a, kron(b, c)), atol=1e-12)
    np.testing.assert_allclose(dagger(kron(a, b)), kron(dagger(a), dagger(b)), atol=1e-12)
    assert abs(trace(kron(a, b)) - trace(a) * trace(b)) < 1e-12


def test_sqrt_psd_round_trip(rng):
    for rank in (1, 2, 3):
        rho = random_density(rng, 3, rank)
        r = matrix_sqrt_psd(rho)
        assert is_hermitian(r)
        np.testing.assert_allclose(r @ r, rho, atol=1e-8 if rank < 3 else 1e-12)
        assert np.linalg.eigvalsh(r).min() >= -1e-12


def test_sqrt_psd_known():
    np.testing.assert_allclose(matrix_sqrt_psd(np.diag([4.0, 9.0, 0.0])), np.diag([2.0, 3.0, 0.0]), atol=1e-15)


def test_sqrt_rejects_negative():
    with pytest.raises(NotPSDError):
        matrix_sqrt_psd(np.diag([1.0, -1e-6]))


def test_sqrt_clamps_roundoff():
    r = matrix_sqrt_psd(np.diag([1.0, -1e-13]).astype(complex))
    np.testing.assert_allclose(r, np.diag([1.0, 0.0]), atol=1e-15)

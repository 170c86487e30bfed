"""
Tests for the dense linear-algebra kernel.
"""

import math

import numpy as np
import pytest

from qequil.exceptions import CapacityError, ShapeMismatchError, ValidationError
from qequil.services import matkit


@pytest.fixture
def reset_eigen_method():
    yield
    matkit.set_eigen_method("auto")


class TestEigh:
    """Jacobi and LAPACK eigendecompositions."""

    @pytest.mark.parametrize("method", ["jacobi", "lapack"])
    def test_reconstructs_random_hermitian(self, rng, method):
        m = matkit.random_hermitian(6, rng)
        values, vectors = matkit.eigh(m, method)
        assert np.all(np.diff(values) >= -1e-12)
        np.testing.assert_allclose(vectors.conj().T @ vectors, np.eye(6), atol=1e-10)
        np.testing.assert_allclose((vectors * values) @ vectors.conj().T, m, atol=1e-10)

    def test_methods_agree(self, rng):
        m = matkit.random_hermitian(5, rng, complex_entries=False)
        np.testing.assert_allclose(matkit.eigvalsh(m, "jacobi"), matkit.eigvalsh(m, "lapack"), atol=1e-10)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError, match="Hermitian"):
            matkit.eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_rejects_non_square(self):
        with pytest.raises(ShapeMismatchError):
            matkit.eigh(np.ones((2, 3)))

    def test_unknown_method(self):
        with pytest.raises(ValidationError, match="Unknown eigen method"):
            matkit.eigh(np.eye(2), "qr")

    def test_process_wide_method(self, reset_eigen_method):
        matkit.set_eigen_method("LAPACK")
        assert matkit.get_eigen_method() == "lapack"
        with pytest.raises(ValidationError):
            matkit.set_eigen_method("power")


class TestSvdAndRank:
    """Thin SVD and numerical rank."""

    @pytest.mark.parametrize("shape", [(5, 3), (3, 5), (4, 4)])
    def test_jacobi_svd_reconstructs(self, rng, shape):
        m = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        u, sigma, v = matkit.svd(m, "jacobi")
        k = min(shape)
        assert u.shape == (shape[0], k)
        assert v.shape == (shape[1], k)
        assert np.all(np.diff(sigma) <= 1e-12)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(k), atol=1e-10)
        np.testing.assert_allclose(v.conj().T @ v, np.eye(k), atol=1e-10)
        np.testing.assert_allclose((u * sigma) @ v.conj().T, m, atol=1e-10)

    def test_singular_values_match_lapack(self, rng):
        m = rng.random((6, 4))
        np.testing.assert_allclose(matkit.svd(m, "jacobi")[1], np.linalg.svd(m, compute_uv=False), atol=1e-12)

    def test_rank_of_low_rank_product(self, rng):
        m = rng.random((6, 2)) @ rng.random((2, 5))
        assert matkit.numerical_rank(m) == 2

    def test_rank_of_zero_matrix(self):
        assert matkit.numerical_rank(np.zeros((3, 3))) == 0

    def test_euclidean_amplitudes_have_rank_two(self):
        c = np.arange(1.0, 9.0)
        assert matkit.numerical_rank(c[:, None] - c[None, :]) == 2


class TestPsdHelpers:
    """PSD check, clipping and square roots."""

    def test_psd_check_verdict(self):
        verdict = matkit.psd_check(np.diag([1.0, -1e-3]), 1e-9)
        assert not verdict
        assert verdict.min_eigenvalue == pytest.approx(-1e-3)
        assert matkit.psd_check(np.diag([1.0, -1e-10]), 1e-9)

    def test_clip_psd_removes_negative_part(self):
        clipped = matkit.clip_psd(np.diag([2.0, -1.0]))
        np.testing.assert_allclose(clipped, np.diag([2.0, 0.0]), atol=1e-12)

    def test_sqrt_and_inverse_sqrt(self):
        m = np.array([[2.0, 1.0], [1.0, 2.0]])
        root = matkit.psd_sqrt(m)
        np.testing.assert_allclose(root @ root, m, atol=1e-12)
        inv = matkit.inverse_sqrt(m)
        np.testing.assert_allclose(inv @ m @ inv, np.eye(2), atol=1e-12)


class TestTensorStructure:
    """Kronecker products, Schmidt forms and partial traces."""

    def test_kron_cap(self):
        with pytest.raises(CapacityError):
            matkit.kron(np.ones((65, 1)), np.ones((64, 1)))

    def test_kron_power(self):
        a = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert matkit.kron_power(a, 3).shape == (8, 8)
        np.testing.assert_allclose(matkit.kron_power(a, 2), np.kron(a, a))

    def test_schmidt_of_bell_state(self):
        bell = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2.0)
        form = matkit.schmidt(bell, 2, 2)
        assert form.rank == 2
        np.testing.assert_allclose(form.coefficients, [1 / math.sqrt(2.0)] * 2, atol=1e-12)
        np.testing.assert_allclose(form.vector(), bell, atol=1e-12)

    def test_schmidt_of_product_state(self, rng):
        a = rng.normal(size=3) + 1j * rng.normal(size=3)
        b = rng.normal(size=2) + 1j * rng.normal(size=2)
        v = np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b))
        form = matkit.schmidt(v, 3, 2)
        assert form.rank == 1
        np.testing.assert_allclose(form.vector(), v, atol=1e-12)

    def test_schmidt_needs_unit_vector(self):
        with pytest.raises(ValidationError, match="unit vector"):
            matkit.schmidt(np.ones(4), 2, 2)

    def test_partial_trace_of_product(self):
        a = np.diag([0.25, 0.75])
        b = np.array([[0.5, 0.5], [0.5, 0.5]])
        rho = np.kron(a, b)
        np.testing.assert_allclose(matkit.partial_trace(rho, (2, 2), [0]), a, atol=1e-12)
        np.testing.assert_allclose(matkit.partial_trace(rho, (2, 2), [1]), b, atol=1e-12)

    def test_complete_basis(self):
        column = np.array([[1.0], [1.0]]) / math.sqrt(2.0)
        basis = matkit.complete_basis(column, 2)
        np.testing.assert_allclose(basis.T @ basis, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(basis[:, 0], column[:, 0])

    def test_random_unitary(self, rng):
        u = matkit.random_unitary(4, rng)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-12)

"""Tests for the dense linear algebra kernels."""

import numpy as np
import pytest

from normctl.core import linalg
from normctl.core.exceptions import NotInvertibleError, StructuralError
from normctl.models.element import ComplexMatrix
from normctl.services.sampler import SamplerService

pytestmark = pytest.mark.unit


def _hermitian(rng, n):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return z + z.conj().T


class TestJacobi:
    """Cyclic Jacobi eigensolver."""

    @pytest.mark.parametrize("n", [1, 2, 5, 12])
    def test_matches_reference_eigenvalues(self, rng, n):
        a = _hermitian(rng, n)
        eigenvalues, _, _ = linalg.jacobi_eigh(a)
        reference = np.linalg.eigvalsh(a)
        assert np.allclose(eigenvalues, reference, atol=1e-10 * np.linalg.norm(a))

    def test_eigenvectors_diagonalise(self, rng):
        a = _hermitian(rng, 8)
        eigenvalues, vectors, sweeps = linalg.jacobi_eigh(a)
        assert sweeps >= 1
        assert np.allclose(vectors.conj().T @ vectors, np.eye(8), atol=1e-10)
        assert np.allclose(a @ vectors, vectors * eigenvalues, atol=1e-9 * np.linalg.norm(a))

    def test_diagonal_input_needs_no_sweep(self):
        eigenvalues, vectors, sweeps = linalg.jacobi_eigh(np.diag([3.0, -1.0, 2.0]))
        assert sweeps == 0
        assert list(eigenvalues) == [-1.0, 2.0, 3.0]

    def test_random_hermitian_suite(self):
        rng = np.random.default_rng(20240601)
        for _ in range(300):
            a = _hermitian(rng, int(rng.integers(2, 13)))
            eigenvalues, _, _ = linalg.jacobi_eigh(a)
            assert np.allclose(eigenvalues, np.linalg.eigvalsh(a), atol=1e-10 * np.linalg.norm(a))

    def test_band_residuals_converge(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            n = int(rng.integers(2, 9))
            z = SamplerService.matrix(rng, n=n).entries
            for k in range(n):
                residual = z - ComplexMatrix(entries=z).band_truncation(k).entries
                gram = residual.conj().T @ residual
                eigenvalues, _, _ = linalg.jacobi_eigh(gram)
                assert np.allclose(eigenvalues, np.linalg.eigvalsh(gram), atol=1e-10 * max(np.linalg.norm(gram), 1.0))

    def test_already_diagonal_after_rounding_stops(self):
        a = np.diag([2.0, 1.0, -3.0]).astype(complex)
        a[0, 1] = a[1, 0] = 1e-9
        eigenvalues, _, sweeps = linalg.jacobi_eigh(a)
        assert sweeps <= 2
        assert np.allclose(eigenvalues, np.linalg.eigvalsh(a), atol=1e-14)

    def test_rejects_non_square(self):
        with pytest.raises(StructuralError):
            linalg.jacobi_eigh(np.ones((2, 3)))


class TestSingularValues:
    def test_diagonal(self):
        assert np.allclose(linalg.singular_values(np.diag([3.0, 1.0, 2.0])), [1.0, 2.0, 3.0])

    def test_identity_is_exact(self):
        assert list(linalg.singular_values(np.eye(4))) == [1.0, 1.0, 1.0, 1.0]
        assert list(linalg.singular_values(np.diag([-2.0, 1j]))) == [1.0, 2.0]

    def test_operator_norm_squared_is_top_eigenvalue(self, rng):
        a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        top = np.linalg.eigvalsh(a.conj().T @ a)[-1]
        assert linalg.operator_norm(a) ** 2 == pytest.approx(top, rel=1e-10)

    def test_unitary_has_unit_norm(self, rng):
        q, _ = np.linalg.qr(rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5)))
        assert linalg.operator_norm(q) == pytest.approx(1.0, abs=1e-12)
        assert linalg.smallest_singular_value(q) == pytest.approx(1.0, abs=1e-12)


class TestLuInverse:
    def test_inverse(self, rng):
        a = rng.standard_normal((7, 7)) + 7.0 * np.eye(7)
        inverse = linalg.lu_inverse(a)
        assert np.allclose(a @ inverse, np.eye(7), atol=1e-10)

    def test_singular_matrix_is_refused(self):
        with pytest.raises(NotInvertibleError) as exc_info:
            linalg.lu_inverse(np.array([[1.0, 2.0], [2.0, 4.0]]))
        assert exc_info.value.exit_code == 1
        assert "measured" in exc_info.value.detail

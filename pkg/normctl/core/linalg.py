"""Dense linear algebra kernels: Hermitian Jacobi eigensolver, singular values, LU inverse."""

import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, lu_factor, lu_solve

from normctl.config import settings
from normctl.core.exceptions import NotInvertibleError, NumericError, StructuralError

logger = logging.getLogger(__name__)


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Annihilate a[p, q] in place with a complex Jacobi rotation."""
    apq = a[p, q]
    magnitude = abs(apq)
    phase = np.conj(apq / magnitude)
    theta = (a[q, q].real - a[p, p].real) / (2.0 * magnitude)
    if theta == 0.0:
        t = 1.0
    else:
        t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c

    # phase fix on column q, then the real rotation of the 2x2 block
    g = np.array([[c, s], [-s * phase, c * phase]], dtype=complex)
    cols = [p, q]
    a[:, cols] = a[:, cols] @ g
    a[cols, :] = g.conj().T @ a[cols, :]
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real
    v[:, cols] = v[:, cols] @ g


def jacobi_eigh(
    matrix: np.ndarray,
    tol: Optional[float] = None,
    max_sweeps: Optional[int] = None
) -> Tuple[np.ndarray, np.ndarray, int]:
    """Eigen-decompose a Hermitian matrix by cyclic Jacobi rotations.

    Returns the eigenvalues in ascending order, the unitary whose columns are
    the matching eigenvectors, and the number of sweeps used. Convergence is
    declared once the off-diagonal Frobenius mass drops below
    ``tol * ||A||_F``.
    """
    tol = settings.jacobi_tol if tol is None else tol
    max_sweeps = settings.jacobi_max_sweeps if max_sweeps is None else max_sweeps

    a = np.array(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise StructuralError(f"array of shape {a.shape}", "a square matrix")
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)

    scale = float(np.linalg.norm(a))
    sweeps = 0
    if n > 1 and scale > 0.0:
        skip = 1e-3 * tol * scale / n
        while _off_norm(a) > tol * scale:
            if sweeps == max_sweeps:
                raise NumericError(
                    "Jacobi eigensolver did not converge",
                    detail={"off_norm": _off_norm(a), "scale": scale, "sweeps": sweeps}
                )
            for p in range(n - 1):
                for q in range(p + 1, n):
                    if abs(a[p, q]) > skip:
                        _rotate(a, v, p, q)
            sweeps += 1

    eigenvalues = np.real(np.diag(a)).copy()
    order = np.argsort(eigenvalues)
    logger.debug(f"Jacobi converged after {sweeps} sweeps (n={n})")
    return eigenvalues[order], v[:, order], sweeps


def singular_values(matrix: np.ndarray) -> np.ndarray:
    """Singular values in ascending order.

    The Hermitian dilation [[0, A], [A*, 0]] has eigenvalues +-sigma_i, so
    small singular values keep absolute accuracy eps ||A|| instead of the
    sqrt(eps) ||A|| left by the eigenvalues of A*A.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2:
        raise StructuralError(f"array of shape {a.shape}", "a matrix")
    m, n = a.shape
    if m == n and _off_norm(a) == 0.0:
        # diagonal input: exact moduli
        return np.sort(np.abs(np.diag(a)))
    dilation = np.zeros((m + n, m + n), dtype=complex)
    dilation[:m, m:] = a
    dilation[m:, :m] = a.conj().T
    eigenvalues, _, _ = jacobi_eigh(dilation)
    return np.clip(eigenvalues[-min(m, n):], 0.0, None)


def operator_norm(matrix: np.ndarray) -> float:
    """Spectral norm sigma_max."""
    if np.asarray(matrix).size == 0:
        return 0.0
    return float(singular_values(matrix)[-1])


def smallest_singular_value(matrix: np.ndarray) -> float:
    """sigma_min."""
    return float(singular_values(matrix)[0])


def lu_inverse(matrix: np.ndarray, threshold: Optional[float] = None) -> np.ndarray:
    """Inverse through LU with partial pivoting.

    Raises NotInvertibleError when sigma_min does not exceed
    ``threshold * sigma_max``.
    """
    threshold = settings.invertibility_threshold if threshold is None else threshold
    a = np.asarray(matrix, dtype=complex)
    sigma = singular_values(a)
    limit = threshold * float(sigma[-1])
    if float(sigma[0]) <= limit:
        raise NotInvertibleError(float(sigma[0]), limit)
    try:
        factors = lu_factor(a, check_finite=True)
    except (LinAlgError, ValueError) as e:
        logger.error(f"LU factorisation failed: {e}")
        raise NotInvertibleError(float(sigma[0]), limit) from e
    return lu_solve(factors, np.eye(a.shape[0], dtype=complex))

"""Seeded random element generation."""

import logging
from typing import Optional

import numpy as np

from normctl.config import settings
from normctl.models.element import AlgebraElement, ComplexMatrix, TorusPolynomial
from normctl.models.pair import AlgebraPair

logger = logging.getLogger(__name__)


class SamplerService:
    """Draws elements from a caller-owned ``numpy.random.Generator``."""

    @staticmethod
    def unit_disc(rng: np.random.Generator, size) -> np.ndarray:
        """I.i.d. uniform points of the closed unit disc."""
        radius = np.sqrt(rng.random(size))
        angle = 2.0 * np.pi * rng.random(size)
        return radius * np.exp(1j * angle)

    @staticmethod
    def torus_polynomial(
        rng: np.random.Generator,
        max_degree: Optional[int] = None,
        envelope: Optional[float] = None
    ) -> TorusPolynomial:
        """Degree uniform in 0..max_degree, coefficients on the unit disc, optionally damped by (1+|k|)^-s."""
        max_degree = settings.sample_max_degree if max_degree is None else max_degree
        degree = int(rng.integers(0, max_degree + 1))
        coeffs = SamplerService.unit_disc(rng, 2 * degree + 1)
        if envelope is not None:
            k = np.abs(np.arange(-degree, degree + 1))
            coeffs = coeffs * (1.0 + k) ** (-envelope)
        return TorusPolynomial(coeffs=coeffs)

    @staticmethod
    def matrix(rng: np.random.Generator, max_dimension: Optional[int] = None, n: Optional[int] = None) -> ComplexMatrix:
        """Entries on the unit disc; dimension uniform in 1..max_dimension unless fixed."""
        max_dimension = settings.sample_max_dimension if max_dimension is None else max_dimension
        n = int(rng.integers(1, max_dimension + 1)) if n is None else n
        return ComplexMatrix(entries=SamplerService.unit_disc(rng, (n, n)))

    @staticmethod
    def element(
        pair: AlgebraPair,
        rng: np.random.Generator,
        max_degree: Optional[int] = None,
        max_dimension: Optional[int] = None
    ) -> AlgebraElement:
        if pair.element_type is ComplexMatrix:
            return SamplerService.matrix(rng, max_dimension)
        return SamplerService.torus_polynomial(rng, max_degree)

    @staticmethod
    def unitary(rng: np.random.Generator, n: int) -> np.ndarray:
        """Haar unitary from the QR factorisation of a complex Gaussian matrix."""
        z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
        q, r = np.linalg.qr(z)
        phases = np.diag(r) / np.abs(np.diag(r))
        return q * phases

    @staticmethod
    def matrix_with_condition(
        rng: np.random.Generator,
        n: int,
        kappa: float,
        scale: float = 1.0
    ) -> ComplexMatrix:
        """U diag(sigma) V* with sigma spread geometrically over [scale/kappa, scale]."""
        if n == 1:
            sigma = np.array([scale])
        else:
            sigma = scale * kappa ** (-np.linspace(0.0, 1.0, n))
        u = SamplerService.unitary(rng, n)
        v = SamplerService.unitary(rng, n)
        return ComplexMatrix(entries=(u * sigma) @ v.conj().T)

    @staticmethod
    def nonvanishing_polynomial(
        rng: np.random.Generator,
        degree: int,
        amplitude: float,
        envelope: Optional[float] = None
    ) -> TorusPolynomial:
        """1 + amplitude * p with ||p||_l1 = 1, so |f| >= 1 - amplitude on the torus."""
        k = np.abs(np.arange(-degree, degree + 1))
        coeffs = SamplerService.unit_disc(rng, 2 * degree + 1)
        if envelope is not None:
            coeffs = coeffs * (1.0 + k) ** (-envelope)
        coeffs[degree] = 0.0
        mass = float(np.sum(np.abs(coeffs)))
        if mass > 0.0:
            coeffs = coeffs * (amplitude / mass)
        coeffs[degree] = 1.0
        return TorusPolynomial(coeffs=coeffs)

"""Algebra elements: trigonometric polynomials and finite complex matrices."""

import math
from typing import Dict, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from normctl.core.exceptions import StructuralError


def _read_only(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class TorusPolynomial(BaseModel):
    """Trigonometric polynomial f(t) = sum_k c_k exp(2 pi i k t), |k| <= degree."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    coeffs: np.ndarray = Field(..., description="Centred amplitudes, index k + degree")

    @field_validator("coeffs", mode="before")
    @classmethod
    def validate_coeffs(cls, v) -> np.ndarray:
        """Copy into a read-only complex array of odd length."""
        array = np.array(v, dtype=complex).ravel()
        if len(array) % 2 == 0:
            raise ValueError("coefficient array must have odd length 2N+1")
        if not np.all(np.isfinite(array)):
            raise ValueError("coefficients must be finite")
        return _read_only(array)

    @classmethod
    def from_mapping(cls, mapping: Dict[int, complex]) -> "TorusPolynomial":
        degree = max((abs(int(k)) for k in mapping), default=0)
        coeffs = np.zeros(2 * degree + 1, dtype=complex)
        for k, value in mapping.items():
            coeffs[int(k) + degree] += complex(value)
        return cls(coeffs=coeffs)

    @classmethod
    def constant(cls, value: complex = 1.0) -> "TorusPolynomial":
        return cls(coeffs=[value])

    @property
    def degree(self) -> int:
        return (len(self.coeffs) - 1) // 2

    @property
    def kind(self) -> str:
        return "torus_poly"

    def coefficient(self, k: int) -> complex:
        if abs(k) > self.degree:
            return 0j
        return complex(self.coeffs[k + self.degree])

    def as_mapping(self) -> Dict[int, complex]:
        """Nonzero coefficients keyed by frequency."""
        return {
            k: complex(c)
            for k, c in zip(range(-self.degree, self.degree + 1), self.coeffs)
            if c != 0
        }

    def multiply(self, other: "TorusPolynomial") -> "TorusPolynomial":
        if not isinstance(other, TorusPolynomial):
            raise StructuralError(self.kind, getattr(other, "kind", type(other).__name__))
        return TorusPolynomial(coeffs=np.convolve(self.coeffs, other.coeffs))

    def adjoint(self) -> "TorusPolynomial":
        return TorusPolynomial(coeffs=np.conj(self.coeffs[::-1]))

    def scale(self, factor: complex) -> "TorusPolynomial":
        return TorusPolynomial(coeffs=self.coeffs * factor)

    def add(self, other: "TorusPolynomial") -> "TorusPolynomial":
        if not isinstance(other, TorusPolynomial):
            raise StructuralError(self.kind, getattr(other, "kind", type(other).__name__))
        degree = max(self.degree, other.degree)
        coeffs = np.zeros(2 * degree + 1, dtype=complex)
        coeffs[degree - self.degree:degree + self.degree + 1] += self.coeffs
        coeffs[degree - other.degree:degree + other.degree + 1] += other.coeffs
        return TorusPolynomial(coeffs=coeffs)

    def subtract(self, other: "TorusPolynomial") -> "TorusPolynomial":
        return self.add(other.scale(-1.0))

    def derivative(self) -> "TorusPolynomial":
        k = np.arange(-self.degree, self.degree + 1)
        return TorusPolynomial(coeffs=self.coeffs * (2j * math.pi * k))

    def truncated(self, degree: int) -> Tuple["TorusPolynomial", float]:
        """Drop frequencies above ``degree``; returns the result and the discarded l1 mass."""
        if degree >= self.degree:
            return self, 0.0
        cut = self.degree - degree
        kept = self.coeffs[cut:len(self.coeffs) - cut]
        discarded = float(np.sum(np.abs(self.coeffs[:cut])) + np.sum(np.abs(self.coeffs[-cut:])))
        return TorusPolynomial(coeffs=kept), discarded

    def wiener_norm(self) -> float:
        """l1 norm of the Fourier coefficients."""
        return float(np.sum(np.abs(self.coeffs)))

    def identity(self) -> "TorusPolynomial":
        return TorusPolynomial.constant(1.0)

    def __str__(self) -> str:
        return f"torus polynomial of degree {self.degree}"


class ComplexMatrix(BaseModel):
    """Square complex matrix acting on C^n."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: np.ndarray = Field(..., description="n x n complex entries")

    @field_validator("entries", mode="before")
    @classmethod
    def validate_entries(cls, v) -> np.ndarray:
        """Copy into a read-only square complex array."""
        array = np.array(v, dtype=complex)
        if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] == 0:
            raise ValueError(f"entries must form a non-empty square matrix, got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise ValueError("entries must be finite")
        return _read_only(array)

    @classmethod
    def identity_of(cls, n: int) -> "ComplexMatrix":
        return cls(entries=np.eye(n, dtype=complex))

    @classmethod
    def diagonal(cls, values) -> "ComplexMatrix":
        return cls(entries=np.diag(np.asarray(values, dtype=complex)))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def kind(self) -> str:
        return "matrix"

    def _check_compatible(self, other) -> None:
        if not isinstance(other, ComplexMatrix):
            raise StructuralError(f"{self.n}x{self.n} matrix", getattr(other, "kind", type(other).__name__))
        if other.n != self.n:
            raise StructuralError(f"{self.n}x{self.n} matrix", f"{other.n}x{other.n} matrix")

    def multiply(self, other: "ComplexMatrix") -> "ComplexMatrix":
        self._check_compatible(other)
        return ComplexMatrix(entries=self.entries @ other.entries)

    def adjoint(self) -> "ComplexMatrix":
        return ComplexMatrix(entries=self.entries.conj().T)

    def scale(self, factor: complex) -> "ComplexMatrix":
        return ComplexMatrix(entries=self.entries * factor)

    def add(self, other: "ComplexMatrix") -> "ComplexMatrix":
        self._check_compatible(other)
        return ComplexMatrix(entries=self.entries + other.entries)

    def subtract(self, other: "ComplexMatrix") -> "ComplexMatrix":
        self._check_compatible(other)
        return ComplexMatrix(entries=self.entries - other.entries)

    def bandwidth(self) -> int:
        """Largest |i - j| over nonzero entries (0 for diagonal and zero matrices)."""
        rows, cols = np.nonzero(self.entries)
        if len(rows) == 0:
            return 0
        return int(np.max(np.abs(rows - cols)))

    def band_truncation(self, k: int) -> "ComplexMatrix":
        """T_k: keep entries with |i - j| < k (T_0 = 0, T_1 = diagonal part)."""
        i, j = np.indices(self.entries.shape)
        return ComplexMatrix(entries=np.where(np.abs(i - j) < k, self.entries, 0))

    def identity(self) -> "ComplexMatrix":
        return ComplexMatrix.identity_of(self.n)

    def __str__(self) -> str:
        return f"{self.n}x{self.n} matrix"


AlgebraElement = Union[TorusPolynomial, ComplexMatrix]

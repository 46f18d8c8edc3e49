"""Element file schemas (JSON wire format)."""

from typing import Annotated, List, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, TypeAdapter, model_validator

from normctl.models.element import AlgebraElement, ComplexMatrix, TorusPolynomial


class TorusPolyFile(BaseModel):
    """``{"type": "torus_poly", "coeffs": [[k, re, im], ...]}``."""

    type: Literal["torus_poly"] = "torus_poly"
    coeffs: List[Tuple[int, float, float]] = Field(..., min_length=1)

    def to_element(self) -> TorusPolynomial:
        mapping = {}
        for k, re, im in self.coeffs:
            mapping[k] = mapping.get(k, 0j) + complex(re, im)
        return TorusPolynomial.from_mapping(mapping)

    @classmethod
    def from_element(cls, element: TorusPolynomial) -> "TorusPolyFile":
        degree = element.degree
        coeffs = [
            (k - degree, float(c.real), float(c.imag))
            for k, c in enumerate(element.coeffs)
            if c != 0
        ]
        return cls(coeffs=coeffs or [(0, 0.0, 0.0)])


class MatrixFile(BaseModel):
    """``{"type": "matrix", "n": n, "entries": [[re, im], ...]}``, row-major."""

    type: Literal["matrix"] = "matrix"
    n: int = Field(..., ge=1)
    entries: List[Tuple[float, float]]

    @model_validator(mode="after")
    def validate_shape(self) -> "MatrixFile":
        """Exactly n*n entries."""
        if len(self.entries) != self.n * self.n:
            raise ValueError(f"expected {self.n * self.n} entries, got {len(self.entries)}")
        return self

    def to_element(self) -> ComplexMatrix:
        values = np.array([complex(re, im) for re, im in self.entries], dtype=complex)
        return ComplexMatrix(entries=values.reshape(self.n, self.n))

    @classmethod
    def from_element(cls, element: ComplexMatrix) -> "MatrixFile":
        flat = element.entries.ravel()
        return cls(n=element.n, entries=[(float(z.real), float(z.imag)) for z in flat])


ElementFile = Annotated[Union[TorusPolyFile, MatrixFile], Field(discriminator="type")]

element_file_adapter = TypeAdapter(ElementFile)


def to_document(element: AlgebraElement) -> Union[TorusPolyFile, MatrixFile]:
    if isinstance(element, ComplexMatrix):
        return MatrixFile.from_element(element)
    return TorusPolyFile.from_element(element)

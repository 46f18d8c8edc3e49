"""Computable algebra pairs (A, B) with A continuously embedded in B."""

import math
from typing import Literal, Optional, Type, Union

from pydantic import BaseModel, Field, field_serializer, field_validator

from normctl.models.element import ComplexMatrix, TorusPolynomial
from normctl.models.weight import WeightFunction

PairKind = Literal["C1_in_C", "ApproxSpace_in_Matrices", "Wiener_in_C"]


class AlgebraPair(BaseModel):
    """Algebra pair descriptor.

    ``C1_in_C``: C^1(T) in C(T) on trigonometric polynomials.
    ``ApproxSpace_in_Matrices``: weighted approximation space over banded
    truncations inside (C^n, operator norm).
    ``Wiener_in_C``: the Wiener algebra in C(T); not a differential pair, used
    only as a visibility surrogate.
    """

    kind: PairKind = "C1_in_C"
    grid_oversampling: Optional[int] = Field(None, ge=2, description="Torus grid factor; settings default when unset")
    p: Union[float, Literal["inf"]] = Field(1.0, description="Summability exponent, 'inf' for the sup variant")
    weight: WeightFunction = Field(default_factory=WeightFunction)
    n_max: int = Field(16, ge=0, le=4096, description="Largest approximation level summed")

    @field_validator("p")
    @classmethod
    def validate_p(cls, v: Union[float, str]) -> float:
        """p >= 1; 'inf' maps to math.inf."""
        value = math.inf if v == "inf" else float(v)
        if not value >= 1.0:
            raise ValueError(f"p must be at least 1, got {v}")
        return value

    @field_serializer("p")
    def serialize_p(self, value: float) -> Union[float, str]:
        return "inf" if math.isinf(value) else value

    @property
    def is_differential(self) -> bool:
        return self.kind != "Wiener_in_C"

    @property
    def element_type(self) -> Type[Union[TorusPolynomial, ComplexMatrix]]:
        if self.kind == "ApproxSpace_in_Matrices":
            return ComplexMatrix
        return TorusPolynomial

    @classmethod
    def default_for(cls, element: Union[TorusPolynomial, ComplexMatrix]) -> "AlgebraPair":
        """C1_in_C for torus polynomials, the unweighted l1 approximation space for matrices."""
        if isinstance(element, ComplexMatrix):
            return cls(kind="ApproxSpace_in_Matrices")
        return cls(kind="C1_in_C")

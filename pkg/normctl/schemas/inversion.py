"""Inversion report schema."""

from pydantic import BaseModel, Field

from normctl.models.element import AlgebraElement
from normctl.schemas.element import ElementFile


class InverseReport(BaseModel):
    """Outcome of one Neumann-series inversion."""

    inverse: ElementFile
    terms_used: int = Field(..., ge=1)
    residual_B: float = Field(..., ge=0.0, description="||e - a * inverse||_B")
    error_bound: float = Field(..., ge=0.0, description="Geometric bound on ||a^-1 - inverse||_B")
    contraction: float = Field(..., ge=0.0, lt=1.0, description="||e - b||_B")
    discarded_mass: float = Field(0.0, ge=0.0, description="l1 mass dropped by support capping")
    norm_A: float
    norm_B: float
    norm_A_inverse: float
    norm_B_inverse: float
    kappa: float = Field(..., ge=1.0)
    embedding_ratio: float

    def inverse_element(self) -> AlgebraElement:
        return self.inverse.to_element()

"""Schemas for the worked examples and literature bounds."""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, computed_field, field_validator

from normctl.models.element import TorusPolynomial
from normctl.schemas.element import TorusPolyFile


class TailFunction(BaseModel):
    """psi(x) = sum of |a_j| over |j| >= x, for real x."""

    source: TorusPolyFile

    def psi(self, x: float) -> float:
        element = self.source.to_element()
        k = np.abs(np.arange(-element.degree, element.degree + 1))
        return float(np.sum(np.abs(element.coeffs)[k >= x]))

    @classmethod
    def of(cls, element: TorusPolynomial) -> "TailFunction":
        return cls(source=TorusPolyFile.from_element(element))


class QuotientRuleReport(BaseModel):
    """||1/f||_C1 against (||f||_C1 ||1/f||_C + 1) ||1/f||_C."""

    norm_C1: float
    inverse_norm_C: float
    left: float = Field(..., description="||1/f||_C1")
    right: float
    slack: float
    holds: bool


class AnFamilyReport(BaseModel):
    """a_n(t) = 1 + cos(2 pi n t)/2: bounded condition, growing inverse norm."""

    n: int = Field(..., ge=1)
    kappa: float
    ratio: float = Field(..., description="Measured ||a_n||_C1 / ||a_n||_C")
    ratio_formula: float = Field(..., description="(3 + 2 pi n)/3")
    inverse_norm_C1: float
    slope: float = Field(..., description="||a_n^-1||_C1 / n")
    derivative_slope: float = Field(..., description="||(a_n^-1)'||_inf / n")
    reference_slope: float = Field(..., description="||(a_1^-1)'||_inf")
    stated_lower_bound: float = Field(..., description="2 pi n")
    meets_stated_lower_bound: bool
    discrepancies: List[str] = Field(default_factory=list, description="Closed forms the measurement departs from")

    @computed_field
    @property
    def consistent(self) -> bool:
        return not self.discrepancies


class BaskakovReport(BaseModel):
    """64 ||a||_inf ||a^-1||_inf^2 psi(x), x = 1/(4 + 32 ||a||_inf ||a^-1||_inf^2)."""

    norm_sup: float
    inverse_norm_sup: float
    argument: float
    psi_literal: float = Field(..., description="psi at the printed real argument")
    psi_ceiling: float = Field(..., description="psi at ceil(1/argument)")
    bound_literal: float
    bound_ceiling: float
    measured: float = Field(..., description="Wiener norm of the series inverse")
    holds_literal: bool
    holds_ceiling: bool


class SunCheckConfig(BaseModel):
    """theta-differential check parameters."""

    theta: float = Field(..., gt=0.0, lt=1.0)
    samples: int = Field(200, ge=1)
    seed: int = 0
    theta_grid: Optional[List[float]] = None

    @field_validator("theta_grid")
    @classmethod
    def validate_grid(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        """Grid points in [0, 1), ascending."""
        if v is None:
            return v
        if any(not 0.0 <= t < 1.0 for t in v):
            raise ValueError("theta grid points must lie in [0, 1)")
        return sorted(v)

    def grid(self) -> List[float]:
        if self.theta_grid is not None:
            return sorted(set(self.theta_grid) | {self.theta})
        return sorted({0.0, 0.25, 0.5, 0.75, self.theta})


class SunCheckReport(BaseModel):
    """C_theta = max ||a^2||_A / (2 ||a||_A^(1+theta) ||a||_B^(1-theta)) per theta."""

    pair_kind: str
    thetas: List[float]
    constants: List[float]
    theta: float
    constant_at_theta: float
    certified_constant: Optional[float] = None
    sample_count: int
    nonincreasing: bool

    @property
    def recovers_certified(self) -> bool:
        if self.certified_constant is None:
            return True
        return self.constants[0] <= self.certified_constant * (1.0 + 1e-9)

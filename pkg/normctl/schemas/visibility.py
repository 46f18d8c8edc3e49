"""Visibility search and pseudospectrum schemas."""

from enum import Enum
from typing import List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator

from normctl.schemas.element import ElementFile


class VisibilityMarker(str, Enum):
    """Non-numeric values of a visibility function."""

    INFINITE = "infinite"
    UNKNOWN = "unknown"


class VisibilityEstimate(BaseModel):
    """Best ||a^-1||_A found over ||a||_A <= 1, ||a^-1||_B <= 1/delta."""

    pair_kind: str
    delta: float = Field(..., gt=0.0, lt=1.0)
    lower_bound: float = Field(..., ge=0.0)
    witness: Optional[ElementFile] = None
    witness_norm_A: Optional[float] = None
    witness_inverse_norm_B: Optional[float] = None
    best_trial: Optional[int] = None
    feasible_trials: int = 0
    trials: int
    seed: int

    @property
    def exhausted(self) -> bool:
        return self.witness is None


class Rectangle(BaseModel):
    """Axis-parallel rectangle in the complex plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    @model_validator(mode="after")
    def validate_corners(self) -> "Rectangle":
        """Lower corners strictly below upper corners."""
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("rectangle corners must satisfy re_min < re_max and im_min < im_max")
        return self


class PseudospectrumGrid(BaseModel):
    """Resolvent norms ||(lambda - a)^-1||_op on a lambda grid.

    ``sigma_min[i][j]`` belongs to ``re[j] + 1j * im[i]``; a singular point
    carries sigma_min = 0 and an infinite resolvent norm.
    """

    rect: Rectangle
    resolution: int = Field(..., ge=2)
    delta: float = Field(..., gt=0.0)
    re: List[float]
    im: List[float]
    sigma_min: List[List[float]]
    zero_excluded: bool = Field(..., description="0 lies outside the delta-pseudospectrum")

    def resolvent_norms(self) -> np.ndarray:
        sigma = np.asarray(self.sigma_min, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(sigma > 0.0, 1.0 / sigma, np.inf)

    def mask(self, delta: Optional[float] = None) -> np.ndarray:
        """Membership in the delta-pseudospectrum: resolvent norm above 1/delta."""
        delta = self.delta if delta is None else delta
        return np.asarray(self.sigma_min, dtype=float) < delta


class VisibilitySummary(BaseModel):
    """Lower bounds for several delta, with the closed form where one is known."""

    pair_kind: str
    estimates: List[VisibilityEstimate]
    closed_form: Optional[List[Union[VisibilityMarker, float]]] = None

    @property
    def ceiling_violations(self) -> List[float]:
        """delta values whose lower bound exceeds the closed form."""
        if self.closed_form is None:
            return []
        return [
            estimate.delta
            for estimate, ceiling in zip(self.estimates, self.closed_form)
            if isinstance(ceiling, float) and estimate.lower_bound > ceiling + 1e-6
        ]

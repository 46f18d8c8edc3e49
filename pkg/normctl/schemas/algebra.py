"""Report schemas for the algebra pair layer."""

from typing import List, Optional, Tuple

from pydantic import BaseModel, Field


class DiffNormCertificate(BaseModel):
    """Empirical structure constant of a differential pair."""

    pair_kind: str
    measured_C: float = Field(..., ge=0.0)
    sample_count: int = Field(..., ge=0, description="Pairs actually evaluated")
    skipped: int = Field(0, ge=0, description="Degenerate draws (zero element)")
    worst_pair_id: Optional[str] = Field(None, description="'<seed>:<draw index>' of the maximising pair")
    seed: int


class BetaReport(BaseModel):
    """beta_n = ||c^n||_A / ||c||_B^n for n = 1..2^k_max."""

    betas: List[float]
    constant: float
    submultiplicative_violations: List[Tuple[int, int]] = Field(default_factory=list)
    dyadic_violations: List[int] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.submultiplicative_violations and not self.dyadic_violations


class SpectralRadiusReport(BaseModel):
    """Dyadic root sequences ||c^(2^k)||^(1/2^k) in both norms, k = 0..k_max."""

    radii_A: List[float]
    radii_B: List[float]
    gap: float
    spectral_radius_B: float

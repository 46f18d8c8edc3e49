"""Sweep configuration and CSV row schemas."""

from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from normctl.models.pair import AlgebraPair

CSV_COLUMNS = [
    "label",
    "u",
    "v",
    "c",
    "xi",
    "M",
    "product_bound_ln",
    "branch",
    "asymptotic_bound_ln",
    "measured_ln",
    "proof_variant_ln",
    "tail_ln",
    "kappa",
    "ratio",
    "little_o_ratio_ln",
    "flagged",
]


class SweepConfig(BaseModel):
    """Grid description for a sweep.

    ``bounds`` walks u x xi x c directly; ``inversion`` inverts matrices of
    prescribed condition number, a_n family members and element files.
    """

    kind: Literal["bounds", "inversion"] = "bounds"
    u_values: List[float] = Field(default_factory=lambda: [2.0, 4.0, 8.0])
    xi_values: List[float] = Field(default_factory=lambda: [4.0, 6.0, 8.0])
    c_values: List[float] = Field(default_factory=lambda: [1.0, 10.0, 1000.0])
    kappa_values: List[float] = Field(default_factory=list)
    dimension: int = Field(6, ge=1, le=256)
    elements_per_point: int = Field(1, ge=1)
    n_values: List[int] = Field(default_factory=list)
    element_paths: List[str] = Field(default_factory=list)
    pair: Optional[AlgebraPair] = None
    constant: Optional[float] = Field(None, ge=1.0, description="Structure constant; certified when unset")
    certify_samples: int = Field(200, ge=1)
    seed: int = 0
    tol: float = Field(1e-10, gt=0.0)
    k_max: Optional[int] = Field(None, ge=1)
    output: Optional[str] = None
    repro_dir: Optional[str] = None

    @field_validator("u_values")
    @classmethod
    def validate_u(cls, v: List[float]) -> List[float]:
        """u > 1."""
        if any(u <= 1.0 for u in v):
            raise ValueError("u values must exceed 1")
        return v

    @field_validator("kappa_values")
    @classmethod
    def validate_kappa(cls, v: List[float]) -> List[float]:
        """kappa >= 1."""
        if any(k < 1.0 for k in v):
            raise ValueError("condition numbers must be at least 1")
        return v

    @model_validator(mode="after")
    def validate_grid(self) -> "SweepConfig":
        """An inversion sweep needs at least one source of elements."""
        if self.kind == "inversion" and not (self.kappa_values or self.n_values or self.element_paths):
            raise ValueError("inversion sweeps need kappa_values, n_values or element_paths")
        return self


class SweepRow(BaseModel):
    """One CSV row; ln-scale columns avoid overflow."""

    label: str
    u: float
    v: float
    c: float
    xi: Optional[float] = None
    M: Optional[int] = None
    product_bound_ln: float
    branch: Optional[str] = None
    asymptotic_bound_ln: Optional[float] = None
    measured_ln: Optional[float] = None
    proof_variant_ln: Optional[float] = None
    tail_ln: Optional[float] = None
    kappa: Optional[float] = None
    ratio: Optional[float] = None
    little_o_ratio_ln: Optional[float] = None
    flagged: bool = False

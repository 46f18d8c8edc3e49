"""Schemas for the explicit inversion bounds."""

import math
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, PrivateAttr, computed_field

# exp overflows a double beyond this exponent
LN_MAX = math.log(1.7976931348623157e308)


def exp_or_none(ln_value: Optional[float]) -> Optional[float]:
    """exp(ln_value), or None when it is not representable."""
    if ln_value is None or ln_value > LN_MAX:
        return None
    return math.exp(ln_value)


class Branch(str, Enum):
    """Which term of the asymptotic estimate dominates."""

    CONDITION_DOMINATED = "condition_dominated"
    RATIO_DOMINATED = "ratio_dominated"


class BoundInputs(BaseModel):
    """Parameters of the product f(u, v, c) = prod_k (1 + c u^k v^(2^k))."""

    u: float = Field(..., ge=1.0, description="2C")
    v: float = Field(..., ge=0.0, description="1 - kappa^-2")
    c: float = Field(..., ge=0.0, description="2 ratio^2 / v, or the tightened variant")

    # log1p(-kappa^-2) when built from kappa
    _ln_v: Optional[float] = PrivateAttr(default=None)

    @property
    def ln_v(self) -> float:
        if self._ln_v is not None:
            return self._ln_v
        return math.log(self.v) if self.v > 0.0 else -math.inf

    @classmethod
    def from_norms(cls, ratio: float, kappa: float, C: float, tightened: bool = False) -> "BoundInputs":
        """Inputs derived from an element: ratio = ||a||_A/||a||_B, kappa = ||a||_B ||a^-1||_B."""
        v = 1.0 - kappa ** -2
        if v == 0.0:
            return cls(u=2.0 * C, v=0.0, c=0.0)
        numerator = (1.0 + 2.0 * C) * ratio if tightened else 2.0 * ratio * ratio
        inputs = cls(u=2.0 * C, v=v, c=numerator / v)
        inputs._ln_v = math.log1p(-kappa ** -2)
        return inputs

    @classmethod
    def at_xi(cls, u: float, xi: float, c: float) -> "BoundInputs":
        """Inputs with v = u^(-1/2^xi), so that v^(2^xi) = 1/u."""
        ln_v = -math.log(u) / 2.0 ** xi
        inputs = cls(u=u, v=math.exp(ln_v), c=c)
        inputs._ln_v = ln_v
        return inputs


class AsymptoticConstants(BaseModel):
    """Constants of the two-branch asymptotic estimate, all functions of u."""

    u: float = Field(..., gt=1.0)

    @computed_field
    @property
    def K(self) -> float:
        return 1.0 / (math.log(2.0) - 0.5)

    @computed_field
    @property
    def ln_gamma1(self) -> float:
        ln_u = math.log(self.u)
        return 1.0 + 8.0 * ln_u * math.log(ln_u) ** 2 / math.log(2.0) ** 2

    @computed_field
    @property
    def gamma1(self) -> Optional[float]:
        return exp_or_none(self.ln_gamma1)

    @computed_field
    @property
    def gamma2(self) -> float:
        return 16.0 * math.log(self.u) / math.log(2.0) ** 2

    @computed_field
    @property
    def ln_gamma3(self) -> float:
        return 1.0 + 8.0 * math.log(self.K) ** 2 / math.log(self.u)

    @computed_field
    @property
    def gamma3(self) -> Optional[float]:
        return exp_or_none(self.ln_gamma3)

    @computed_field
    @property
    def gamma4(self) -> float:
        return 4.0 / math.log(self.u)


class AsfBound(BaseModel):
    """Closed-form majorant of f(u, v, c) in the regime xi >= 4."""

    ln_value: float
    branch: Branch
    proof_variant_ln_value: float = Field(..., description="Second branch with its two constants swapped")

    @computed_field
    @property
    def value(self) -> Optional[float]:
        return exp_or_none(self.ln_value)


class CutoffReport(BaseModel):
    """Cutoff index M and the checks that justify it."""

    M: int
    target: float = Field(..., description="xi + 2 log2 max(xi, ln(Kc)/ln u)")
    in_sandwich: bool = Field(..., description="target <= M+1 <= target+1")
    cd17_margin: float = Field(..., description="2^M ln(1/v) - M ln u - ln(Kc), nonnegative")
    tail_ln: float = Field(..., description="ln prod_{k>M} (1 + c u^k v^(2^k))")


class GammaTailCheck(BaseModel):
    """Incomplete Gamma estimate against quadrature."""

    a_param: float
    x: float
    estimate: float
    quadrature: float

    @computed_field
    @property
    def dominated(self) -> bool:
        return self.quadrature <= self.estimate


class BoundReport(BaseModel):
    """All quantities of one inversion-bound experiment.

    Bounds are kept in log form; the plain value is None when it overflows.
    """

    inputs: BoundInputs
    norm_A: float
    norm_B: float
    norm_B_inverse: float
    kappa: float
    embedding_ratio: float
    structure_constant: float
    xi: Optional[float] = None
    M: Optional[int] = None
    product_bound_ln: float
    plain_product_bound_ln: float
    tightened: bool = False
    asymptotic_bound_ln: Optional[float] = None
    proof_variant_ln: Optional[float] = None
    branch: Optional[Branch] = None
    first_branch_suffices: Optional[bool] = None
    measured: Optional[float] = None

    @computed_field
    @property
    def product_bound(self) -> Optional[float]:
        return exp_or_none(self.product_bound_ln)

    @computed_field
    @property
    def asymptotic_bound(self) -> Optional[float]:
        return exp_or_none(self.asymptotic_bound_ln)

    @computed_field
    @property
    def overflow(self) -> bool:
        return self.product_bound is None or (
            self.asymptotic_bound_ln is not None and self.asymptotic_bound is None
        )

    @computed_field
    @property
    def dominated(self) -> Optional[bool]:
        """measured <= product bound (<= asymptotic bound when present)."""
        if self.measured is None:
            return None
        slack = 1e-9
        ok = math.log(max(self.measured, 1e-300)) <= self.product_bound_ln + slack
        if self.asymptotic_bound_ln is not None:
            ok = ok and self.product_bound_ln <= self.asymptotic_bound_ln + slack
        return ok


class CorollaryConstants(BaseModel):
    """Constants of h(x, y) = C1 x y^2 exp(C2 ln^2(xy)); C1 is kept in log form."""

    structure_constant: float
    ln_C1: float
    C2: float

    @computed_field
    @property
    def C1(self) -> Optional[float]:
        return exp_or_none(self.ln_C1)


class ProductReport(BaseModel):
    """f(u, v, c) evaluated directly from its parameters."""

    inputs: BoundInputs
    xi: Optional[float] = None
    product_ln: float
    max_factor_bound: float
    cutoff: Optional[CutoffReport] = None
    asf: Optional[AsfBound] = None

    @computed_field
    @property
    def product(self) -> Optional[float]:
        return exp_or_none(self.product_ln)

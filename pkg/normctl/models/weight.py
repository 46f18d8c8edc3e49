"""Subadditive weights on N_0 for approximation-space norms."""

from typing import Dict, List, Literal, Tuple

from pydantic import BaseModel, Field, PrivateAttr, model_validator


class WeightFunction(BaseModel):
    """Weight w on N_0 with w(k) >= 1.

    ``constant``: w = 1; ``power``: (1+k)^r with 0 < r <= 1; ``linear``: 1+k.
    """

    rule: Literal["constant", "power", "linear"] = "constant"
    exponent: float = Field(1.0, gt=0.0, le=1.0, description="r for the power rule")

    _cache: Dict[int, float] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def validate_rule(self) -> "WeightFunction":
        """Linear is the power rule at r = 1."""
        if self.rule == "linear" and self.exponent != 1.0:
            raise ValueError("the linear rule takes no exponent")
        return self

    def __call__(self, k: int) -> float:
        if k < 0:
            raise ValueError(f"weight is defined on N_0, got {k}")
        value = self._cache.get(k)
        if value is None:
            if self.rule == "constant":
                value = 1.0
            elif self.rule == "linear":
                value = 1.0 + k
            else:
                value = (1.0 + k) ** self.exponent
            self._cache[k] = value
        return value

    def subadditivity_violations(self, n_max: int) -> List[Tuple[int, int]]:
        """Pairs (m, n) with m + n <= 2 n_max where w(m+n) > w(m) + w(n)."""
        violations = []
        for m in range(2 * n_max + 1):
            for n in range(2 * n_max + 1 - m):
                if self(m + n) > self(m) + self(n):
                    violations.append((m, n))
        return violations

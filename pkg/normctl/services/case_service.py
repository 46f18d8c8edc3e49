"""Worked examples: quotient rule, the a_n family, Baskakov's tail bound, theta-differential norms."""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from normctl.core import torus
from normctl.core.exceptions import DomainError
from normctl.models.element import AlgebraElement, TorusPolynomial
from normctl.models.pair import AlgebraPair
from normctl.schemas.case import (
    AnFamilyReport,
    BaskakovReport,
    QuotientRuleReport,
    SunCheckConfig,
    SunCheckReport,
    TailFunction,
)
from normctl.services.algebra_service import AlgebraService
from normctl.services.inversion_service import InversionService
from normctl.services.visibility_service import an_family

logger = logging.getLogger(__name__)

_SLACK = 1e-9
_FAMILY_TOL = 1e-9
# the derivative sup comes from a refined grid search
_SLOPE_TOL = 1e-6


class CaseService:
    """Report generators; every report re-derives the norms it uses."""

    def __init__(self):
        self.c1 = InversionService(AlgebraPair(kind="C1_in_C"))
        self.wiener = InversionService(AlgebraPair(kind="Wiener_in_C"))

    def _c1_inverse_norms(self, f: TorusPolynomial) -> Tuple[float, float]:
        """(||1/f||_C, ||(1/f)'||_inf) through -f'/f^2 on the refined grid."""
        smallest, _ = self.c1.modulus_range(f)
        derivative = torus.sup_ratio(f.derivative().coeffs, f.multiply(f).coeffs, self.c1.algebra.oversampling)
        return 1.0 / smallest, derivative

    def quotient_rule_check(self, f: TorusPolynomial) -> QuotientRuleReport:
        """||1/f||_C1 <= (||f||_C1 ||1/f||_C + 1) ||1/f||_C."""
        if not isinstance(f, TorusPolynomial):
            raise DomainError("The quotient rule is checked on torus polynomials", detail={"element": str(f)})
        inverse_C, derivative = self._c1_inverse_norms(f)
        norm_C1 = self.c1.algebra.norm_A(f)
        left = inverse_C + derivative
        right = (norm_C1 * inverse_C + 1.0) * inverse_C
        holds = left <= right * (1.0 + _SLACK)
        if not holds:
            logger.warning(f"Quotient rule fails for {f}: {left} > {right}")
        return QuotientRuleReport(
            norm_C1=norm_C1,
            inverse_norm_C=inverse_C,
            left=left,
            right=right,
            slack=right - left,
            holds=holds
        )

    def an_family_report(self, n: int, element: Optional[TorusPolynomial] = None) -> AnFamilyReport:
        """Measured kappa, ratio and inverse-norm slope of a_n, checked against their closed forms.

        ``element`` replaces a_n(t) by another symbol at the same n; any
        departure from kappa = 3, the ratio (3 + 2 pi n)/3 or the n = 1 slope
        is flagged.
        """
        a = an_family(n) if element is None else element
        algebra = self.c1.algebra
        kappa = self.c1.condition_number(a)
        ratio = algebra.norm_A(a) / algebra.norm_B(a)
        ratio_formula = (3.0 + 2.0 * math.pi * n) / 3.0
        inverse_C, derivative = self._c1_inverse_norms(a)
        inverse_norm = inverse_C + derivative
        _, reference = self._c1_inverse_norms(an_family(1))
        stated = 2.0 * math.pi * n

        discrepancies = []
        if abs(kappa - 3.0) > _FAMILY_TOL:
            discrepancies.append("kappa")
        if abs(ratio - ratio_formula) > _FAMILY_TOL * ratio_formula:
            discrepancies.append("ratio")
        if abs(derivative / n - reference) > _SLOPE_TOL * reference:
            discrepancies.append("slope")
        if discrepancies:
            logger.warning(f"a_n family check at n={n} flags {discrepancies}")
        return AnFamilyReport(
            n=n,
            kappa=kappa,
            ratio=ratio,
            ratio_formula=ratio_formula,
            inverse_norm_C1=inverse_norm,
            slope=inverse_norm / n,
            derivative_slope=derivative / n,
            reference_slope=reference,
            stated_lower_bound=stated,
            meets_stated_lower_bound=inverse_norm >= stated,
            discrepancies=discrepancies
        )

    @staticmethod
    def tail_function(a: TorusPolynomial) -> TailFunction:
        return TailFunction.of(a)

    def baskakov_bound(self, a: TorusPolynomial) -> BaskakovReport:
        """64 ||a||_inf ||a^-1||_inf^2 psi(x) at the printed argument and at ceil(1/x)."""
        if not isinstance(a, TorusPolynomial):
            raise DomainError("Baskakov's bound is evaluated on torus polynomials", detail={"element": str(a)})
        smallest, largest = self.wiener.modulus_range(a)
        inverse_sup = 1.0 / smallest
        scale = largest * inverse_sup ** 2
        argument = 1.0 / (4.0 + 32.0 * scale)
        tail = self.tail_function(a)
        psi_literal = tail.psi(argument)
        psi_ceiling = tail.psi(math.ceil(1.0 / argument))
        measured = self.wiener.neumann_invert(a, tol=1e-12).inverse_element().wiener_norm()
        bound_literal = 64.0 * scale * psi_literal
        bound_ceiling = 64.0 * scale * psi_ceiling
        return BaskakovReport(
            norm_sup=largest,
            inverse_norm_sup=inverse_sup,
            argument=argument,
            psi_literal=psi_literal,
            psi_ceiling=psi_ceiling,
            bound_literal=bound_literal,
            bound_ceiling=bound_ceiling,
            measured=measured,
            holds_literal=measured <= bound_literal * (1.0 + _SLACK),
            holds_ceiling=measured <= bound_ceiling * (1.0 + _SLACK)
        )

    @staticmethod
    def theta_ratios(algebra: AlgebraService, a: AlgebraElement, thetas: List[float]) -> Optional[List[float]]:
        """||a^2||_A / (2 ||a||_A^(1+theta) ||a||_B^(1-theta)) per theta, None for a = 0."""
        norm_A = algebra.norm_A(a)
        norm_B = algebra.norm_B(a)
        if norm_B == 0.0:
            return None
        square_A = algebra.norm_A(algebra.multiply(a, a))
        return [square_A / (2.0 * norm_A ** (1.0 + theta) * norm_B ** (1.0 - theta)) for theta in thetas]

    def sun_theta_check(
        self,
        pair: AlgebraPair,
        config: SunCheckConfig,
        certified_constant: Optional[float] = None
    ) -> SunCheckReport:
        """C_theta over seeded samples for every theta of the grid."""
        algebra = AlgebraService(pair)
        rng = np.random.default_rng(config.seed)
        thetas = config.grid()
        maxima = [0.0] * len(thetas)
        count = 0
        for _ in range(config.samples):
            ratios = self.theta_ratios(algebra, algebra.sampler.element(pair, rng), thetas)
            if ratios is None:
                continue
            count += 1
            maxima = [max(m, r) for m, r in zip(maxima, ratios)]
        nonincreasing = all(
            later <= earlier * (1.0 + _SLACK) for earlier, later in zip(maxima, maxima[1:])
        )
        constant_at_theta = maxima[thetas.index(config.theta)]
        logger.info(f"Sun check on {pair.kind}: C_theta={constant_at_theta:.6g} at theta={config.theta}")
        return SunCheckReport(
            pair_kind=pair.kind,
            thetas=thetas,
            constants=maxima,
            theta=config.theta,
            constant_at_theta=constant_at_theta,
            certified_constant=certified_constant,
            sample_count=count,
            nonincreasing=nonincreasing
        )

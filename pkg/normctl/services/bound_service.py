"""Bound service: the infinite product f(u, v, c) and every explicit estimate built on it.

All exponentials are handled in log space. A plain value is only produced
through ``exp_or_none`` and is None when it overflows a double.
"""

import logging
import math
from typing import Dict, List, Optional, Tuple

from scipy import integrate

from normctl.config import settings
from normctl.core.exceptions import DivergenceError, DomainError, NumericError
from normctl.models.element import AlgebraElement
from normctl.schemas.bound import (
    AsfBound,
    AsymptoticConstants,
    BoundInputs,
    BoundReport,
    Branch,
    CorollaryConstants,
    CutoffReport,
    GammaTailCheck,
    ProductReport,
    exp_or_none,
)
from normctl.services.algebra_service import AlgebraService
from normctl.services.inversion_service import InversionService

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)
K_CONSTANT = 1.0 / (LN2 - 0.5)

_MAX_FACTORS = 4096
_SLACK = 1e-9


def _term_ln(inputs: BoundInputs, k: int) -> float:
    """ln(c u^k v^(2^k)), -inf when the term vanishes."""
    if inputs.c == 0.0 or inputs.v == 0.0:
        return -math.inf
    return math.log(inputs.c) + k * math.log(inputs.u) + (2.0 ** k) * inputs.ln_v


def _log1p_exp(x: float) -> float:
    """ln(1 + e^x) without overflow."""
    if x == -math.inf:
        return 0.0
    if x > 35.0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


class BoundService:
    """Stateless evaluation of the inversion bounds."""

    # The product f(u, v, c)

    @staticmethod
    def log_product_f(inputs: BoundInputs, eps: Optional[float] = None) -> float:
        """ln prod_{k>=0} (1 + c u^k v^(2^k)).

        Terms are added until the geometric majorant of the remaining sum,
        t_{K+1}/(1 - u v^(2^(K+1))), drops below eps.
        """
        eps = settings.product_eps if eps is None else eps
        if inputs.ln_v >= 0.0:
            raise DivergenceError(inputs.v)
        if inputs.c == 0.0 or inputs.v == 0.0:
            return 0.0

        ln_u = math.log(inputs.u)
        ln_v = inputs.ln_v
        peak = BoundService.xi(inputs.u, inputs.v, inputs.ln_v) if inputs.u > 1.0 else 0.0
        ln_eps = math.log(eps)
        total = 0.0
        for k in range(_MAX_FACTORS):
            total += _log1p_exp(_term_ln(inputs, k))
            if k + 1 <= peak:
                continue
            ratio_ln = ln_u + (2.0 ** (k + 1)) * ln_v
            if ratio_ln >= 0.0:
                continue
            tail_ln = _term_ln(inputs, k + 1) - math.log1p(-math.exp(ratio_ln))
            if tail_ln < ln_eps:
                return total
        raise NumericError(
            "Infinite product did not settle",
            detail={"u": inputs.u, "v": inputs.v, "c": inputs.c, "factors": _MAX_FACTORS}
        )

    @staticmethod
    def product_f(inputs: BoundInputs, eps: Optional[float] = None) -> float:
        """f(u, v, c); inf when it exceeds the double range."""
        value = exp_or_none(BoundService.log_product_f(inputs, eps))
        return math.inf if value is None else value

    @staticmethod
    def factor(inputs: BoundInputs, k: int) -> float:
        return math.exp(_log1p_exp(_term_ln(inputs, k)))

    @staticmethod
    def xi(u: float, v: float, ln_v: Optional[float] = None) -> float:
        """xi = log2(ln u / ln(1/v)), so that v^(2^xi) = 1/u."""
        if ln_v is None:
            ln_v = math.log(v) if v > 0.0 else -math.inf
        if not (u > 1.0 and v > 0.0 and ln_v < 0.0):
            raise DomainError("xi needs u > 1 and 0 < v < 1", detail={"u": u, "v": v})
        return math.log2(math.log(u) / -ln_v)

    @staticmethod
    def max_factor_bound(inputs: BoundInputs) -> float:
        """1 + c u^xi, a majorant of every factor of the product."""
        if inputs.ln_v >= 0.0:
            raise DivergenceError(inputs.v)
        if inputs.c == 0.0 or inputs.v == 0.0:
            return 1.0
        if inputs.u == 1.0:
            return 1.0 + inputs.c
        return 1.0 + inputs.c * inputs.u ** BoundService.xi(inputs.u, inputs.v, inputs.ln_v)

    @staticmethod
    def cd13_holds(kappa: float) -> bool:
        """1/ln(1/v) <= kappa^2 for v = 1 - kappa^-2."""
        if kappa < 1.0:
            raise DomainError("Condition numbers are at least 1", detail={"kappa": kappa})
        if kappa == 1.0:
            return True
        return 1.0 / -math.log1p(-kappa ** -2) <= kappa * kappa * (1.0 + _SLACK)

    # Cutoff and tail

    @staticmethod
    def tail_log_product(inputs: BoundInputs, M: int) -> float:
        """ln prod_{k>M} (1 + c u^k v^(2^k))."""
        total = 0.0
        for k in range(M + 1, M + 1 + _MAX_FACTORS):
            term = _term_ln(inputs, k)
            total += _log1p_exp(term)
            if term < -745.0 and (k > 60 or math.log(inputs.u) + (2.0 ** k) * inputs.ln_v < 0.0):
                return total
        return total

    @staticmethod
    def cutoff_report(inputs: BoundInputs) -> CutoffReport:
        """Smallest M with M+1 >= xi + 2 log2 max(xi, ln(Kc)/ln u), M >= xi+1 and the cd17 estimate."""
        if not (inputs.u > 1.0 and inputs.v > 0.0 and inputs.ln_v < 0.0):
            raise DomainError("Cutoff needs u > 1 and 0 < v < 1", detail=inputs.model_dump())
        xi = BoundService.xi(inputs.u, inputs.v, inputs.ln_v)
        if xi < 4.0 - _SLACK:
            raise DomainError(
                f"Cutoff needs xi >= 4, got {xi:.6g}; use the exact product instead",
                detail={"xi": xi, **inputs.model_dump()}
            )
        ln_u = math.log(inputs.u)
        ln_inv_v = -inputs.ln_v
        ln_kc = math.log(K_CONSTANT * inputs.c) if inputs.c > 0.0 else -math.inf
        target = xi + 2.0 * math.log2(max(xi, ln_kc / ln_u))

        def margin(m: int) -> float:
            return (2.0 ** m) * ln_inv_v - m * ln_u - ln_kc

        M = max(math.ceil(target - 1.0), math.ceil(xi + 1.0))
        while margin(M) < 0.0:
            M += 1
        in_sandwich = target - _SLACK <= M + 1 <= target + 1.0 + _SLACK
        if not in_sandwich:
            logger.debug(f"Cutoff M={M} leaves the sandwich around {target:.6g}")
        return CutoffReport(
            M=M,
            target=target,
            in_sandwich=in_sandwich,
            cd17_margin=margin(M) if inputs.c > 0.0 else math.inf,
            tail_ln=BoundService.tail_log_product(inputs, M)
        )

    @staticmethod
    def cutoff_M(inputs: BoundInputs) -> int:
        return BoundService.cutoff_report(inputs).M

    # Incomplete Gamma tail

    @staticmethod
    def gamma_tail_estimate(a_param: float, x: float) -> float:
        """x^(a-1) e^(-x) / (1 - 1/ln 4), valid for a >= 1 and x >= 2(a-1) > 0."""
        if not (a_param >= 1.0 and x > 0.0 and x >= 2.0 * (a_param - 1.0)):
            raise DomainError(
                "Gamma tail estimate needs a >= 1, x > 0 and x >= 2(a-1)",
                detail={"a": a_param, "x": x}
            )
        return x ** (a_param - 1.0) * math.exp(-x) / (1.0 - 1.0 / math.log(4.0))

    @staticmethod
    def gamma_tail_quadrature(a_param: float, x: float) -> float:
        """Gamma(a, x) = e^(-x) int_0^inf (x+s)^(a-1) e^(-s) ds by adaptive quadrature."""
        value, _ = integrate.quad(lambda s: (x + s) ** (a_param - 1.0) * math.exp(-s), 0.0, math.inf)
        return math.exp(-x) * value

    @staticmethod
    def gamma_tail_check(a_param: float, x: float) -> GammaTailCheck:
        return GammaTailCheck(
            a_param=a_param,
            x=x,
            estimate=BoundService.gamma_tail_estimate(a_param, x),
            quadrature=BoundService.gamma_tail_quadrature(a_param, x)
        )

    # Asymptotic forms

    @staticmethod
    def asymptotic_constants(u: float) -> AsymptoticConstants:
        return AsymptoticConstants(u=u)

    @staticmethod
    def kappa_threshold(u: float) -> float:
        """(1 - u^(-1/16))^(-1/2): above it, xi >= 4 for v = 1 - kappa^-2."""
        return (1.0 - u ** (-1.0 / 16.0)) ** -0.5

    @staticmethod
    def asf_bound(inputs: BoundInputs) -> AsfBound:
        """Closed majorant of f in the regime ln u / ln(1/v) >= 16, c >= 1."""
        if not (inputs.u > 1.0 and inputs.v > 0.0 and inputs.ln_v < 0.0):
            raise DomainError("Asymptotic bound needs u > 1 and 0 < v < 1", detail=inputs.model_dump())
        ln_u = math.log(inputs.u)
        ln_inv_v = -inputs.ln_v
        ratio = ln_u / ln_inv_v
        if ratio < 16.0 * (1.0 - _SLACK) or inputs.c < 1.0:
            raise DomainError(
                "Asymptotic bound needs ln u / ln(1/v) >= 16 and c >= 1",
                detail={"ratio": ratio, "c": inputs.c}
            )
        ln_k = math.log(K_CONSTANT)
        ln_c = math.log(inputs.c)
        condition_ln = (
            1.0
            + 8.0 * ln_u * math.log(ln_u) ** 2 / LN2 ** 2
            + (8.0 * ln_u / LN2 ** 2) * math.log(1.0 / ln_inv_v) ** 2
        )
        ratio_ln = 1.0 + 8.0 * ln_k ** 2 / ln_u + (4.0 / ln_u) * ln_c ** 2
        variant_ln = 1.0 + 4.0 * ln_k ** 2 / ln_u + (8.0 / ln_u) * ln_c ** 2
        if math.log(ratio) >= (LN2 / ln_u) * (ln_k + ln_c):
            return AsfBound(ln_value=condition_ln, branch=Branch.CONDITION_DOMINATED, proof_variant_ln_value=condition_ln)
        return AsfBound(ln_value=ratio_ln, branch=Branch.RATIO_DOMINATED, proof_variant_ln_value=variant_ln)

    def product_report(self, inputs: BoundInputs) -> ProductReport:
        """f(u, v, c) with whichever of xi, the cutoff and the closed majorant apply."""
        xi = self.xi(inputs.u, inputs.v, inputs.ln_v) if inputs.u > 1.0 and inputs.v > 0.0 and inputs.ln_v < 0.0 else None
        cutoff = None
        asf = None
        if xi is not None and xi >= 4.0 - _SLACK:
            cutoff = self.cutoff_report(inputs)
            if inputs.c >= 1.0:
                asf = self.asf_bound(inputs)
        return ProductReport(
            inputs=inputs,
            xi=xi,
            product_ln=self.log_product_f(inputs),
            max_factor_bound=self.max_factor_bound(inputs),
            cutoff=cutoff,
            asf=asf
        )

    # Bounds for an element

    @staticmethod
    def _validated(norm_A: float, norm_B: float, norm_B_inverse: float, C: float) -> float:
        if min(norm_A, norm_B, norm_B_inverse) <= 0.0:
            raise DomainError(
                "Norms must be positive",
                detail={"norm_A": norm_A, "norm_B": norm_B, "norm_B_inverse": norm_B_inverse}
            )
        kappa = norm_B * norm_B_inverse
        if kappa < 1.0 - _SLACK:
            raise DomainError(f"Condition number {kappa:.6g} is below 1", detail={"kappa": kappa})
        if C < 1.0:
            raise DomainError(f"Structure constant {C:.6g} is below 1", detail={"C": C})
        return max(1.0, kappa)

    def ncicstar_report(
        self,
        norm_A: float,
        norm_B: float,
        norm_B_inverse: float,
        C: float,
        measured: Optional[float] = None,
        tighten: bool = True
    ) -> BoundReport:
        """(||a||_A/||a||_B^2) f(2C, 1 - kappa^-2, 2 ratio^2/v), plus the (1+2C) ratio tightening."""
        kappa = self._validated(norm_A, norm_B, norm_B_inverse, C)
        ratio = norm_A / norm_B
        prefactor_ln = math.log(norm_A) - 2.0 * math.log(norm_B)

        inputs = BoundInputs.from_norms(ratio, kappa, C)
        plain_ln = prefactor_ln + self.log_product_f(inputs)
        product_ln = plain_ln
        tightened = False
        if tighten and inputs.v > 0.0 and ratio >= 0.5 + C:
            candidate = BoundInputs.from_norms(ratio, kappa, C, tightened=True)
            candidate_ln = prefactor_ln + self.log_product_f(candidate)
            if candidate_ln < plain_ln:
                inputs, product_ln, tightened = candidate, candidate_ln, True

        xi = None
        M = None
        if inputs.v > 0.0 and inputs.u > 1.0:
            xi = self.xi(inputs.u, inputs.v, inputs.ln_v)
            if xi >= 4.0 - _SLACK and inputs.c > 0.0:
                M = self.cutoff_M(inputs)
        return BoundReport(
            inputs=inputs,
            norm_A=norm_A,
            norm_B=norm_B,
            norm_B_inverse=norm_B_inverse,
            kappa=kappa,
            embedding_ratio=ratio,
            structure_constant=C,
            xi=xi,
            M=M,
            product_bound_ln=product_ln,
            plain_product_bound_ln=plain_ln,
            tightened=tightened,
            measured=measured
        )

    def ncicstar_bound(self, norm_A: float, norm_B: float, norm_B_inverse: float, C: float) -> float:
        value = self.ncicstar_report(norm_A, norm_B, norm_B_inverse, C).product_bound
        return math.inf if value is None else value

    @staticmethod
    def _branch_lns(
        constants: AsymptoticConstants,
        prefactor_ln: float,
        kappa: float,
        ratio: float
    ) -> Tuple[float, float, float]:
        """ln of both printed branches and of the proof variant of the second."""
        ln_u = math.log(constants.u)
        first = constants.ln_gamma1 + prefactor_ln + constants.gamma2 * math.log(kappa * kappa) ** 2
        argument = math.log(2.0) + 16.0 * ln_u + 2.0 * math.log(ratio)
        second = constants.ln_gamma3 + prefactor_ln + constants.gamma4 * argument ** 2
        variant = 1.0 + 4.0 * math.log(constants.K) ** 2 / ln_u + prefactor_ln + (8.0 / ln_u) * argument ** 2
        return first, second, variant

    def theorem41_bound(
        self,
        norm_A: float,
        norm_B: float,
        norm_B_inverse: float,
        C: float,
        measured: Optional[float] = None
    ) -> BoundReport:
        """max of the condition branch and the ratio branch, for kappa >= 5."""
        kappa = self._validated(norm_A, norm_B, norm_B_inverse, C)
        if kappa < 5.0:
            raise DomainError(
                f"Asymptotic bound needs kappa >= 5, got {kappa:.6g}",
                detail={"kappa": kappa, "threshold": 5.0}
            )
        report = self.ncicstar_report(norm_A, norm_B, norm_B_inverse, C, measured)
        u = 2.0 * C
        constants = self.asymptotic_constants(u)
        ratio = norm_A / norm_B
        prefactor_ln = math.log(norm_A) - 2.0 * math.log(norm_B)
        first, second, variant = self._branch_lns(constants, prefactor_ln, kappa, ratio)
        ln_u = math.log(u)
        suffices = 2.0 * math.log(kappa) >= -math.log(ln_u) + (LN2 / ln_u) * math.log(10.0 * ratio * ratio)

        updated = report.model_copy(update={
            "asymptotic_bound_ln": max(first, second),
            "proof_variant_ln": max(first, variant),
            "branch": Branch.CONDITION_DOMINATED if first >= second else Branch.RATIO_DOMINATED,
            "first_branch_suffices": suffices,
        })
        if updated.dominated is False:
            logger.warning(
                f"Domination chain fails: measured={measured}, ln product={updated.product_bound_ln:.6g}, "
                f"ln asymptotic={updated.asymptotic_bound_ln:.6g}"
            )
        return updated

    def little_o_ratio_ln(
        self,
        measured: float,
        norm_A: float,
        norm_B: float,
        norm_B_inverse: float,
        C: float
    ) -> float:
        """ln(measured) minus the ln of the condition branch."""
        kappa = self._validated(norm_A, norm_B, norm_B_inverse, C)
        constants = self.asymptotic_constants(2.0 * C)
        prefactor_ln = math.log(norm_A) - 2.0 * math.log(norm_B)
        first, _, _ = self._branch_lns(constants, prefactor_ln, kappa, norm_A / norm_B)
        return math.log(measured) - first

    # Controlling function

    @staticmethod
    def corollary_h_ln(x: float, y: float, ln_C1: float, C2: float) -> float:
        if not (x > 0.0 and y > 0.0 and x * y >= 1.0 - _SLACK):
            raise DomainError("h(x, y) needs x, y > 0 and xy >= 1", detail={"x": x, "y": y})
        ln_xy = math.log(max(x * y, 1.0))
        return ln_C1 + math.log(x) + 2.0 * math.log(y) + C2 * ln_xy ** 2

    @staticmethod
    def corollary_h(x: float, y: float, C1: float, C2: float) -> float:
        """h(x, y) = C1 x y^2 exp(C2 ln^2(xy)); inf on overflow."""
        value = exp_or_none(BoundService.corollary_h_ln(x, y, math.log(C1), C2))
        return math.inf if value is None else value

    def corollary_constants(self, C: float) -> CorollaryConstants:
        """(C1, C2) such that h dominates both branches after xy >= kappa, ratio <= xy."""
        constants = self.asymptotic_constants(2.0 * C)
        shift = math.log(2.0) + 16.0 * math.log(constants.u)
        ln_C1 = max(constants.ln_gamma1, constants.ln_gamma3 + 2.0 * constants.gamma4 * shift ** 2)
        C2 = max(4.0 * constants.gamma2, 8.0 * constants.gamma4)
        return CorollaryConstants(structure_constant=C, ln_C1=ln_C1, C2=C2)

    def main_theorem_view(self, C: float) -> Dict[str, float]:
        """Constants of the form with ln^2 kappa and gamma5 = 2u^16."""
        constants = self.asymptotic_constants(2.0 * C)
        return {
            "u": constants.u,
            "ln_gamma1": constants.ln_gamma1,
            "gamma2_prime": 4.0 * constants.gamma2,
            "ln_gamma3": constants.ln_gamma3,
            "gamma4": constants.gamma4,
            "gamma5": 2.0 * constants.u ** 16,
        }

    # Verifiers on elements

    def dyadic_violations(self, algebra: AlgebraService, c: AlgebraElement, C: float, n_max: int = 64) -> List[int]:
        """n <= n_max where ||c^n||_A exceeds the binary-digit product bound."""
        norm_A = algebra.norm_A(c)
        norm_B = algebra.norm_B(c)
        if norm_B == 0.0:
            return []
        ln_beta = math.log(norm_A / norm_B)
        violations = []
        power = c
        for n in range(1, n_max + 1):
            if n > 1:
                power = algebra.multiply(power, c)
            measured = algebra.norm_A(power)
            if measured == 0.0:
                continue
            bound_ln = sum(
                ln_beta + k * math.log(2.0 * C) + (2 ** k) * math.log(norm_B)
                for k in range(n.bit_length()) if (n >> k) & 1
            )
            if math.log(measured) > bound_ln + _SLACK:
                violations.append(n)
        if violations:
            logger.warning(f"Dyadic bound fails for n in {violations} (C={C})")
        return violations

    def summed_check(self, algebra: AlgebraService, c: AlgebraElement, C: float, N: int = 64) -> Tuple[float, float]:
        """(sum_{n=0}^{N} ||c^n||_A, f(2C, ||c||_B, ||c||_A/||c||_B)); needs ||c||_B < 1."""
        norm_B = algebra.norm_B(c)
        if not 0.0 < norm_B < 1.0:
            raise DomainError("Summed form needs 0 < ||c||_B < 1", detail={"norm_B": norm_B})
        total = 1.0
        power = c
        for n in range(1, N + 1):
            if n > 1:
                power = algebra.multiply(power, c)
            total += algebra.norm_A(power)
        inputs = BoundInputs(u=2.0 * C, v=norm_B, c=algebra.norm_A(c) / norm_B)
        return total, self.product_f(inputs)

    @staticmethod
    def _b_element(algebra: AlgebraService, a: AlgebraElement) -> AlgebraElement:
        gram = algebra.multiply(algebra.adjoint(a), a)
        return gram.scale(1.0 / algebra.norm_B(gram))

    def norma_check(self, algebra: AlgebraService, a: AlgebraElement) -> Tuple[float, float]:
        """(||e - b||_A, 2 ||a||_A^2 / ||a||_B^2) with b = a*a/||a*a||_B."""
        b = self._b_element(algebra, a)
        left = algebra.norm_A(algebra.identity(a).subtract(b))
        ratio = algebra.norm_A(a) / algebra.norm_B(a)
        return left, 2.0 * ratio * ratio

    def normb_gap(self, algebra: AlgebraService, a: AlgebraElement, kappa: float) -> float:
        """| ||e - b||_B - (1 - kappa^-2) |."""
        b = self._b_element(algebra, a)
        return abs(algebra.norm_B(algebra.identity(a).subtract(b)) - (1.0 - kappa ** -2))

    # Pipeline

    def element_report(
        self,
        inversion: InversionService,
        a: AlgebraElement,
        constant: Optional[float] = None,
        tol: Optional[float] = None,
        k_max: Optional[int] = None
    ) -> BoundReport:
        """Invert ``a`` and evaluate the product bound, plus the asymptotic bound when kappa >= 5."""
        algebra = inversion.algebra
        if not algebra.pair.is_differential:
            raise DomainError(f"{algebra.pair.kind} carries no differential norm", detail={"pair": algebra.pair.kind})
        C = algebra.structure_constant() if constant is None else constant
        inverse = inversion.neumann_invert(a, tol, k_max)
        norm_B_inverse = inverse.kappa / inverse.norm_B
        arguments = (inverse.norm_A, inverse.norm_B, norm_B_inverse, C)
        if inverse.kappa >= 5.0:
            report = self.theorem41_bound(*arguments, measured=inverse.norm_A_inverse)
        else:
            report = self.ncicstar_report(*arguments, measured=inverse.norm_A_inverse)
        if report.dominated is False:
            logger.warning(f"Inverse of {a} is not dominated by its bounds")
        logger.info(
            f"Bound report for {a}: kappa={report.kappa:.6g}, measured={inverse.norm_A_inverse:.6g}, "
            f"ln product={report.product_bound_ln:.6g}"
        )
        return report

"""Inversion service: Neumann series on b = a*a/||a*a||_B, exact oracle, condition numbers."""

import logging
import math
from typing import Optional, Tuple

import numpy as np

from normctl.config import settings
from normctl.core import linalg, torus
from normctl.core.exceptions import DomainError, NotInvertibleError, StructuralError, TruncationError
from normctl.models.element import AlgebraElement, ComplexMatrix, TorusPolynomial
from normctl.models.pair import AlgebraPair
from normctl.schemas.element import to_document
from normctl.schemas.inversion import InverseReport
from normctl.services.algebra_service import AlgebraService

logger = logging.getLogger(__name__)


class InversionService:
    """Service for inverting elements of an algebra pair."""

    def __init__(self, pair: Optional[AlgebraPair] = None):
        self.algebra = AlgebraService(pair)

    @property
    def pair(self) -> AlgebraPair:
        return self.algebra.pair

    def modulus_range(self, a: AlgebraElement) -> Tuple[float, float]:
        """(sigma_min, sigma_max) or (inf |a|, sup |a|), after the invertibility test."""
        self.algebra.check_member(a)
        if isinstance(a, ComplexMatrix):
            sigma = linalg.singular_values(a.entries)
            smallest, largest = float(sigma[0]), float(sigma[-1])
        else:
            smallest = torus.inf_modulus(a.coeffs, self.algebra.oversampling)
            largest = torus.sup_modulus(a.coeffs, self.algebra.oversampling)
        threshold = settings.invertibility_threshold * largest
        if smallest <= threshold:
            raise NotInvertibleError(smallest, threshold)
        return smallest, largest

    def condition_number(self, a: AlgebraElement) -> float:
        """kappa(a) = ||a||_B ||a^-1||_B; pointwise on the torus."""
        smallest, largest = self.modulus_range(a)
        return max(1.0, largest / smallest)

    def exact_invert_matrix(self, a: ComplexMatrix) -> ComplexMatrix:
        if not isinstance(a, ComplexMatrix):
            raise StructuralError(str(a), "a matrix")
        return ComplexMatrix(entries=linalg.lu_inverse(a.entries))

    def neumann_invert(
        self,
        a: AlgebraElement,
        tol: Optional[float] = None,
        k_max: Optional[int] = None
    ) -> InverseReport:
        """a^-1 = (sum_k c^k) a* / ||a*a||_B with c = e - a*a/||a*a||_B.

        Stops at the first K with ||c||^(K+1)/(1-||c||) max(1, ||a*||/||a*a||) <= tol.
        """
        tol = settings.default_tol if tol is None else tol
        k_max = settings.default_k_max if k_max is None else k_max
        smallest, largest = self.modulus_range(a)

        a_star = a.adjoint()
        gram = a_star.multiply(a)
        s = self.algebra.norm_B(gram)
        c = a.identity().subtract(gram.scale(1.0 / s))
        q = self.algebra.norm_B(c)
        if q <= 4.0 * np.finfo(float).eps:
            # rounding residue of a unitary a
            q = 0.0
        if q >= 1.0:
            raise DomainError(
                "Neumann contraction is not below 1",
                detail={"contraction": q, "kappa": largest / smallest}
            )
        factor = max(1.0, self.algebra.norm_B(a_star) / s)
        terms = self._terms_needed(q, factor, tol)
        logger.info(f"Inverting {a}: kappa={largest / smallest:.6g}, ||c||_B={q:.6g}, K={terms - 1}")

        support_cap = max(a.degree, 1) * (k_max + 2) if isinstance(a, TorusPolynomial) else 0
        if terms - 1 > k_max:
            partial, discarded = self._series(c, k_max, support_cap, q, tol, strict=False)
            inverse = partial.multiply(a_star).scale(1.0 / s)
            achieved = self.algebra.norm_B(a.identity().subtract(a.multiply(inverse)))
            raise TruncationError(
                f"k_max={k_max} reached before the tolerance {tol:g}",
                achieved=achieved,
                detail={"terms_needed": terms, "contraction": q}
            )

        series, discarded = self._series(c, terms - 1, support_cap, q, tol)
        inverse = series.multiply(a_star).scale(1.0 / s)
        residual = self.algebra.norm_B(a.identity().subtract(a.multiply(inverse)))
        error_bound = (q ** terms + discarded) / (1.0 - q) * factor
        return InverseReport(
            inverse=to_document(inverse),
            terms_used=terms,
            residual_B=residual,
            error_bound=error_bound,
            contraction=q,
            discarded_mass=discarded,
            norm_A=self.algebra.norm_A(a),
            norm_B=largest,
            norm_A_inverse=self.algebra.norm_A(inverse),
            norm_B_inverse=self.algebra.norm_B(inverse),
            kappa=max(1.0, largest / smallest),
            embedding_ratio=self.algebra.norm_A(a) / largest
        )

    @staticmethod
    def _terms_needed(q: float, factor: float, tol: float) -> int:
        """Smallest K+1 with q^(K+1)/(1-q) * factor <= tol."""
        if q == 0.0:
            return 1
        target = tol * (1.0 - q) / factor
        terms = max(1, math.ceil(math.log(target) / math.log(q)))
        while terms > 1 and q ** (terms - 1) <= target:
            terms -= 1
        while q ** terms > target:
            terms += 1
        return terms

    def _series(
        self,
        c: AlgebraElement,
        last: int,
        support_cap: int,
        q: float,
        tol: float,
        strict: bool = True
    ) -> Tuple[AlgebraElement, float]:
        """S_K = sum_{k <= last} c^k, with the dropped l1 mass of torus powers.

        Torus powers keep at most ``support_cap`` frequencies on each side.
        Tails below a per-term allowance are dropped as well; every dropped
        coefficient counts against the budget tol/10.
        """
        if isinstance(c, ComplexMatrix):
            step = c.entries
            power = np.eye(c.n, dtype=complex)
            total = power.copy()
            for _ in range(last):
                power = power @ step
                total += power
            return ComplexMatrix(entries=total), 0.0

        budget = tol / 10.0
        # dropped mass propagates through later powers, damped by q
        allowance = budget * (1.0 - q) / (10.0 * (last + 1))
        guard = settings.max_series_degree
        width = min(support_cap, guard)
        power = np.ones(1, dtype=complex)
        total = np.zeros(2 * width + 1, dtype=complex)
        total[width] = 1.0
        discarded = 0.0
        for k in range(1, last + 1):
            power = np.convolve(power, c.coeffs)
            power, dropped = self._trim_tails(power, allowance)
            discarded += dropped
            degree = (len(power) - 1) // 2
            if degree > support_cap:
                cut = degree - support_cap
                discarded += float(np.sum(np.abs(power[:cut])) + np.sum(np.abs(power[-cut:])))
                power = power[cut:len(power) - cut]
                degree = support_cap
            if strict and discarded > budget:
                raise TruncationError(
                    f"Discarded series mass exceeds {budget:g} at term {k}",
                    achieved=discarded,
                    detail={"support_cap": support_cap, "term": k}
                )
            if degree > guard:
                raise TruncationError(
                    f"Series support {degree} exceeds max_series_degree={guard} at term {k}",
                    achieved=discarded,
                    detail={"support_cap": support_cap, "max_series_degree": guard, "term": k}
                )
            total[width - degree:width + degree + 1] += power
        return TorusPolynomial(coeffs=total).truncated(self._support(total, width))[0], discarded

    @staticmethod
    def _trim_tails(power: np.ndarray, allowance: float) -> Tuple[np.ndarray, float]:
        """Drop the widest symmetric tails whose l1 mass stays within ``allowance``."""
        half = (len(power) - 1) // 2
        if half == 0:
            return power, 0.0
        magnitudes = np.abs(power)
        tails = np.cumsum(magnitudes[:half] + magnitudes[::-1][:half])
        cut = int(np.searchsorted(tails, allowance, side="right"))
        if cut == 0:
            return power, 0.0
        return power[cut:len(power) - cut], float(tails[cut - 1])

    @staticmethod
    def _support(coeffs: np.ndarray, cap: int) -> int:
        nonzero = np.nonzero(coeffs)[0]
        if len(nonzero) == 0:
            return 0
        return int(max(abs(nonzero[0] - cap), abs(nonzero[-1] - cap)))

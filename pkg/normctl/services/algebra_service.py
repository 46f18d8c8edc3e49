"""Algebra pair service: arithmetic, both norms, and empirical structure constants."""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from normctl.config import settings
from normctl.core import linalg, torus
from normctl.core.exceptions import DomainError, StructuralError
from normctl.models.element import AlgebraElement, ComplexMatrix, TorusPolynomial
from normctl.models.pair import AlgebraPair
from normctl.schemas.algebra import BetaReport, DiffNormCertificate, SpectralRadiusReport
from normctl.services.sampler import SamplerService

logger = logging.getLogger(__name__)

# relative slack for floating comparisons of norm inequalities
_SLACK = 1e-9


class AlgebraService:
    """Service bound to one algebra pair (A, B)."""

    def __init__(self, pair: Optional[AlgebraPair] = None):
        self.pair = pair or AlgebraPair()
        self.sampler = SamplerService()

    @property
    def oversampling(self) -> int:
        return self.pair.grid_oversampling or settings.grid_oversampling

    def check_member(self, a: AlgebraElement) -> AlgebraElement:
        """Reject elements that do not live in this pair."""
        if not isinstance(a, self.pair.element_type):
            raise StructuralError(str(a), f"pair {self.pair.kind}")
        return a

    # Arithmetic

    def multiply(self, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
        self.check_member(a)
        self.check_member(b)
        return a.multiply(b)

    def adjoint(self, a: AlgebraElement) -> AlgebraElement:
        return self.check_member(a).adjoint()

    def identity(self, a: AlgebraElement) -> AlgebraElement:
        return self.check_member(a).identity()

    def scale(self, a: AlgebraElement, factor: complex) -> AlgebraElement:
        return self.check_member(a).scale(factor)

    def add(self, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
        self.check_member(a)
        return a.add(self.check_member(b))

    def derivative(self, a: TorusPolynomial) -> TorusPolynomial:
        if not isinstance(a, TorusPolynomial):
            raise StructuralError(str(a), "a torus polynomial")
        return a.derivative()

    # Norms

    def norm_B(self, a: AlgebraElement) -> float:
        """Sup norm on the torus, operator norm for matrices."""
        self.check_member(a)
        if isinstance(a, ComplexMatrix):
            return linalg.operator_norm(a.entries)
        return torus.sup_modulus(a.coeffs, self.oversampling)

    def norm_A(self, a: AlgebraElement) -> float:
        self.check_member(a)
        if self.pair.kind == "C1_in_C":
            return self.norm_B(a) + torus.sup_modulus(a.derivative().coeffs, self.oversampling)
        if self.pair.kind == "Wiener_in_C":
            return a.wiener_norm()
        weighted = np.array([
            error * self.pair.weight(k) for k, error in enumerate(self.approx_errors(a))
        ])
        if math.isinf(self.pair.p):
            return float(weighted.max())
        return float(np.sum(weighted ** self.pair.p) ** (1.0 / self.pair.p))

    def approx_errors(self, a: ComplexMatrix) -> List[float]:
        """Surrogate errors for k = 0..n_max.

        E_k(a) = min_{j <= k} ||a - T_j(a)||_op: every T_j(a) with j <= k lies
        in X_k, so this dominates the best approximation error and is
        nonincreasing in k.
        """
        if not isinstance(a, ComplexMatrix):
            raise StructuralError(str(a), "a matrix")
        bandwidth = a.bandwidth()
        errors = []
        running = math.inf
        for k in range(self.pair.n_max + 1):
            if k > bandwidth:
                running = 0.0
            elif running > 0.0:
                raw = linalg.operator_norm(a.subtract(a.band_truncation(k)).entries)
                running = min(running, raw)
            errors.append(running)
        return errors

    def approx_error(self, a: ComplexMatrix, k: int) -> float:
        if not 0 <= k <= self.pair.n_max:
            raise DomainError(
                f"Band index {k} outside 0..{self.pair.n_max}",
                detail={"k": k, "n_max": self.pair.n_max}
            )
        return self.approx_errors(a)[k]

    # Structure constant

    def _require_differential(self) -> None:
        if not self.pair.is_differential:
            raise DomainError(
                f"{self.pair.kind} carries no differential norm",
                detail={"pair": self.pair.kind}
            )

    def measure_diff_constant(
        self,
        samples: int,
        seed: int,
        max_degree: Optional[int] = None,
        max_dimension: Optional[int] = None
    ) -> DiffNormCertificate:
        """Max of ||ab||_A / (||a||_A ||b||_B + ||b||_A ||a||_B) over seeded random pairs."""
        self._require_differential()
        if samples < 1:
            raise DomainError("At least one sample is required", detail={"samples": samples})

        rng = np.random.default_rng(seed)
        measured = 0.0
        worst: Optional[str] = None
        evaluated = 0
        skipped = 0
        for index in range(samples):
            a = self.sampler.element(self.pair, rng, max_degree, max_dimension)
            b = self.sampler.element(self.pair, rng, max_degree, max_dimension)
            if isinstance(a, ComplexMatrix) and a.n != b.n:
                b = self.sampler.matrix(rng, n=a.n)
            ratio = self.diff_ratio(a, b)
            if ratio is None:
                skipped += 1
                continue
            evaluated += 1
            if ratio > measured:
                measured = ratio
                worst = f"{seed}:{index}"

        logger.info(
            f"Structure constant for {self.pair.kind}: {measured:.12g} "
            f"({evaluated} pairs, {skipped} skipped, seed={seed})"
        )
        return DiffNormCertificate(
            pair_kind=self.pair.kind,
            measured_C=measured,
            sample_count=evaluated,
            skipped=skipped,
            worst_pair_id=worst,
            seed=seed
        )

    def diff_ratio(self, a: AlgebraElement, b: AlgebraElement) -> Optional[float]:
        """The differential-norm ratio of one pair, None when a or b vanishes."""
        a_A, a_B = self.norm_A(a), self.norm_B(a)
        b_A, b_B = self.norm_A(b), self.norm_B(b)
        denominator = a_A * b_B + b_A * a_B
        if a_B == 0.0 or b_B == 0.0 or denominator == 0.0:
            return None
        return self.norm_A(self.multiply(a, b)) / denominator

    def structure_constant(self, samples: int = 200, seed: Optional[int] = None) -> float:
        """C used by the bounds: exactly 1 for C1 (Leibniz rule), otherwise max(1, measured)."""
        self._require_differential()
        if self.pair.kind == "C1_in_C":
            return 1.0
        seed = settings.default_seed if seed is None else seed
        return max(1.0, self.measure_diff_constant(samples, seed).measured_C)

    # Power sequences

    def _normalized(self, c: AlgebraElement) -> Tuple[AlgebraElement, float]:
        scale = self.norm_B(c)
        if scale == 0.0:
            raise DomainError("Element has zero B-norm", detail={"element": str(c)})
        return c.scale(1.0 / scale), scale

    def beta_sequence(self, c: AlgebraElement, k_max: int, constant: Optional[float] = None) -> BetaReport:
        """beta_n for n = 1..2^k_max with submultiplicativity and dyadic checks.

        Powers are taken of c/||c||_B so that no intermediate overflows.
        """
        unit, _ = self._normalized(c)
        constant = self.structure_constant() if constant is None else constant
        count = 2 ** k_max
        betas = []
        power = unit
        for n in range(1, count + 1):
            if n > 1:
                power = self.multiply(power, unit)
            betas.append(self.norm_A(power))

        sub_violations = []
        for m in range(1, count + 1):
            for n in range(m, count + 1 - m):
                if betas[m + n - 1] > betas[m - 1] * betas[n - 1] * (1.0 + _SLACK):
                    sub_violations.append((m, n))
        dyadic_violations = [
            k for k in range(k_max + 1)
            if betas[2 ** k - 1] > (2.0 * constant) ** k * betas[0] * (1.0 + _SLACK)
        ]
        if sub_violations or dyadic_violations:
            logger.warning(
                f"beta checks failed for {c}: {len(sub_violations)} submultiplicative, "
                f"{len(dyadic_violations)} dyadic (C={constant})"
            )
        return BetaReport(
            betas=betas,
            constant=constant,
            submultiplicative_violations=sub_violations,
            dyadic_violations=dyadic_violations
        )

    def spectral_radius_check(self, c: AlgebraElement, k_max: int) -> SpectralRadiusReport:
        """||c^(2^k)||^(1/2^k) in both norms for k = 0..k_max, by repeated squaring in log scale."""
        unit, scale = self._normalized(c)
        log_B = 0.0
        current = unit
        radii_A = [scale * self.norm_A(unit)]
        radii_B = [scale]
        for k in range(1, k_max + 1):
            square = self.multiply(current, current)
            norm = self.norm_B(square)
            if norm == 0.0:
                radii_A.extend([0.0] * (k_max + 1 - k))
                radii_B.extend([0.0] * (k_max + 1 - k))
                break
            log_B = 2.0 * log_B + math.log(norm)
            current = square.scale(1.0 / norm)
            exponent = 2.0 ** -k
            radii_B.append(scale * math.exp(log_B * exponent))
            radii_A.append(scale * math.exp((log_B + math.log(self.norm_A(current))) * exponent))

        if isinstance(c, ComplexMatrix):
            rho = float(np.max(np.abs(np.linalg.eigvals(c.entries))))
        else:
            rho = self.norm_B(c)
        return SpectralRadiusReport(
            radii_A=radii_A,
            radii_B=radii_B,
            gap=abs(radii_A[-1] - radii_B[-1]),
            spectral_radius_B=rho
        )

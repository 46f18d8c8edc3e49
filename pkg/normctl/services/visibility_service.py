"""Visibility service: lower bounds for phi(delta), control functions, pseudospectra."""

import logging
import math
from typing import Callable, NamedTuple, Optional, Tuple, Union

import numpy as np

from normctl.core import linalg, torus
from normctl.core.exceptions import DomainError, NumericError, TruncationError
from normctl.models.element import AlgebraElement, ComplexMatrix, TorusPolynomial
from normctl.models.pair import AlgebraPair
from normctl.schemas.element import to_document
from normctl.schemas.visibility import PseudospectrumGrid, Rectangle, VisibilityEstimate, VisibilityMarker
from normctl.services.inversion_service import InversionService
from normctl.services.sampler import SamplerService

logger = logging.getLogger(__name__)

PhiValue = Union[float, VisibilityMarker]

ENVELOPES = (0.5, 1.0, 2.0)
# a_n family members are proposed every this many trials
_FAMILY_PERIOD = 16
_CERTIFY_SLACK = 1e-9


class Candidate(NamedTuple):
    value: float
    trial: int
    witness: AlgebraElement


def an_family(n: int) -> TorusPolynomial:
    """a_n(t) = 1 + cos(2 pi n t)/2."""
    if n < 1:
        raise DomainError("a_n is defined for n >= 1", detail={"n": n})
    return TorusPolynomial.from_mapping({0: 1.0, n: 0.25, -n: 0.25})


class VisibilityService:
    """Service for visibility constants of one algebra pair."""

    def __init__(self, pair: Optional[AlgebraPair] = None, max_degree: int = 8, dimension: int = 4):
        self.inversion = InversionService(pair)
        self.algebra = self.inversion.algebra
        self.sampler = SamplerService()
        self.max_degree = max_degree
        self.dimension = dimension

    @property
    def pair(self) -> AlgebraPair:
        return self.algebra.pair

    @staticmethod
    def nikolski_phi_wiener(delta: float) -> PhiValue:
        """(2 delta^2 - 1)^-1 above 1/sqrt(2); infinite up to 1/2; unknown in between."""
        if not 0.0 < delta < 1.0:
            raise DomainError("delta must lie in (0, 1)", detail={"delta": delta})
        if delta <= 0.5:
            return VisibilityMarker.INFINITE
        if delta <= 1.0 / math.sqrt(2.0):
            return VisibilityMarker.UNKNOWN
        return 1.0 / (2.0 * delta * delta - 1.0)

    @staticmethod
    def control_h_from_phi(norm_A: float, norm_B_inverse: float, phi: Callable[[float], PhiValue]) -> PhiValue:
        """phi(1/(||a||_A ||a^-1||_B)) / ||a||_A."""
        product = norm_A * norm_B_inverse
        if product < 1.0 - _CERTIFY_SLACK:
            raise DomainError(
                "Control function needs ||a||_A ||a^-1||_B >= 1",
                detail={"norm_A": norm_A, "norm_B_inverse": norm_B_inverse}
            )
        value = phi(min(1.0 / product, 1.0 - 1e-15))
        if isinstance(value, VisibilityMarker):
            return value
        return value / norm_A

    def _inverse_norm_A(self, a: AlgebraElement, norm_B_inverse: float) -> float:
        if self.pair.kind == "C1_in_C":
            derivative_part = torus.sup_ratio(
                a.derivative().coeffs, a.multiply(a).coeffs, self.algebra.oversampling
            )
            return norm_B_inverse + derivative_part
        if self.pair.kind == "Wiener_in_C":
            report = self.inversion.neumann_invert(a, tol=1e-13)
            return report.inverse_element().wiener_norm()
        return self.algebra.norm_A(self.inversion.exact_invert_matrix(a))

    def inverse_norms(self, a: AlgebraElement) -> Tuple[float, float]:
        """(||a^-1||_A, ||a^-1||_B) evaluated from a alone."""
        smallest, _ = self.inversion.modulus_range(a)
        return self._inverse_norm_A(a, 1.0 / smallest), 1.0 / smallest

    def objective(self, a: AlgebraElement, delta: float) -> Optional[Tuple[float, AlgebraElement]]:
        """Rescale ``a`` onto ||w^-1||_B = 1/delta; None when ||a||_A ||a^-1||_B > 1/delta.

        The witness w = delta ||a^-1||_B a has ||w||_A <= 1 and value ||w^-1||_A.
        """
        norm_A = self.algebra.norm_A(a)
        smallest, _ = self.inversion.modulus_range(a)
        inverse_B = 1.0 / smallest
        if norm_A * inverse_B > (1.0 / delta) * (1.0 + 1e-12):
            return None
        mu = delta * inverse_B
        return self._inverse_norm_A(a, inverse_B) / mu, a.scale(mu)

    def _proposal(self, trial: int, seed: int) -> AlgebraElement:
        """Trial 0 is the unit; a_n members recur on the torus; otherwise z0 (e + r p) with ||p||_A = 1."""
        rng = np.random.default_rng([seed, trial])
        is_torus = self.pair.element_type is TorusPolynomial
        if trial == 0:
            return TorusPolynomial.constant(1.0) if is_torus else ComplexMatrix.identity_of(self.dimension)
        if is_torus and trial % _FAMILY_PERIOD == 1:
            return an_family(1 + (trial // _FAMILY_PERIOD) % 32)

        if is_torus:
            envelope = float(rng.choice(ENVELOPES))
            direction = self.sampler.torus_polynomial(rng, self.max_degree, envelope)
        else:
            direction = self.sampler.matrix(rng, n=self.dimension)
        size = self.algebra.norm_A(direction)
        if size == 0.0:
            return direction.identity()
        radius = 10.0 ** rng.uniform(-4.0, 0.0)
        z0 = np.exp(2j * np.pi * rng.random())
        return direction.identity().add(direction.scale(radius / size)).scale(z0)

    def phi_lower_bound(self, delta: float, trials: int, seed: int) -> VisibilityEstimate:
        """Seeded search; keeps the max by (value, lowest trial index)."""
        if not 0.0 < delta < 1.0:
            raise DomainError("delta must lie in (0, 1)", detail={"delta": delta})
        best: Optional[Candidate] = None
        feasible = 0
        for trial in range(trials):
            candidate = self._proposal(trial, seed)
            try:
                result = self.objective(candidate, delta)
            except (DomainError, TruncationError, NumericError) as e:
                logger.debug(f"Trial {trial} rejected: {e.message}")
                continue
            if result is None:
                continue
            feasible += 1
            if best is None or result[0] > best.value:
                best = Candidate(result[0], trial, result[1])

        if best is None:
            logger.warning(f"No feasible candidate for delta={delta} in {trials} trials (seed={seed})")
            return VisibilityEstimate(
                pair_kind=self.pair.kind, delta=delta, lower_bound=0.0, trials=trials, seed=seed
            )

        witness_A = self.algebra.norm_A(best.witness)
        inverse_A, inverse_B = self.inverse_norms(best.witness)
        if witness_A > 1.0 + _CERTIFY_SLACK or inverse_B > 1.0 / delta + _CERTIFY_SLACK:
            raise NumericError(
                "Witness fails re-certification",
                detail={"norm_A": witness_A, "inverse_norm_B": inverse_B, "delta": delta}
            )
        logger.info(
            f"phi({delta}) >= {inverse_A:.10g} on {self.pair.kind} "
            f"(trial {best.trial}, {feasible}/{trials} feasible, seed={seed})"
        )
        return VisibilityEstimate(
            pair_kind=self.pair.kind,
            delta=delta,
            lower_bound=inverse_A,
            witness=to_document(best.witness),
            witness_norm_A=witness_A,
            witness_inverse_norm_B=inverse_B,
            best_trial=best.trial,
            feasible_trials=feasible,
            trials=trials,
            seed=seed
        )

    # Pseudospectra

    @staticmethod
    def zero_excluded(a: ComplexMatrix, delta: float) -> bool:
        """0 lies outside the delta-pseudospectrum iff sigma_min(a) >= delta."""
        return linalg.smallest_singular_value(a.entries) >= delta

    @staticmethod
    def pseudospectrum(a: ComplexMatrix, rect: Rectangle, resolution: int, delta: float) -> PseudospectrumGrid:
        if not isinstance(a, ComplexMatrix):
            raise DomainError("Pseudospectra are computed for matrices", detail={"element": str(a)})
        if resolution < 2:
            raise DomainError("Resolution must be at least 2", detail={"resolution": resolution})
        re = np.linspace(rect.re_min, rect.re_max, resolution)
        im = np.linspace(rect.im_min, rect.im_max, resolution)
        identity = np.eye(a.n, dtype=complex)
        sigma = [
            [linalg.smallest_singular_value((x + 1j * y) * identity - a.entries) for x in re]
            for y in im
        ]
        return PseudospectrumGrid(
            rect=rect,
            resolution=resolution,
            delta=delta,
            re=[float(x) for x in re],
            im=[float(y) for y in im],
            sigma_min=sigma,
            zero_excluded=VisibilityService.zero_excluded(a, delta)
        )

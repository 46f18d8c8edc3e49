"""Tests for the product bound, its cutoff, the asymptotic forms and the verifiers."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from normctl.core.exceptions import DivergenceError, DomainError
from normctl.models.element import ComplexMatrix, TorusPolynomial
from normctl.models.pair import AlgebraPair
from normctl.schemas.bound import BoundInputs, Branch
from normctl.services.algebra_service import AlgebraService
from normctl.services.bound_service import K_CONSTANT
from normctl.services.inversion_service import InversionService
from normctl.services.sampler import SamplerService
from normctl.services.visibility_service import an_family


def inputs_at(u: float, xi: float, c: float) -> BoundInputs:
    """Inputs with v chosen so that v^(2^xi) = 1/u."""
    return BoundInputs.at_xi(u, xi, c)


class TestConstants:
    def test_K(self):
        assert K_CONSTANT == pytest.approx(5.17738, rel=1e-5)

    def test_kappa_threshold(self, bounds):
        assert bounds.kappa_threshold(2.0) == pytest.approx(4.8566, rel=1e-4)

    def test_asymptotic_constants(self, bounds):
        constants = bounds.asymptotic_constants(2.0)
        assert constants.gamma2 == pytest.approx(16.0 / math.log(2.0))
        assert constants.gamma4 == pytest.approx(4.0 / math.log(2.0))
        assert constants.gamma1 == pytest.approx(math.exp(constants.ln_gamma1))

    def test_main_theorem_view(self, bounds):
        view = bounds.main_theorem_view(1.0)
        assert view["gamma5"] == pytest.approx(2.0 * 2.0 ** 16)
        assert view["gamma2_prime"] == pytest.approx(4.0 * 16.0 / math.log(2.0))

    @pytest.mark.parametrize("kappa", [1.0, 1.01, 2.0, 5.0, 100.0, 1e4, 1e6, 1e9, 1e15])
    def test_cd13(self, bounds, kappa):
        assert bounds.cd13_holds(kappa)

    @pytest.mark.parametrize("kappa", [1e6, 1e9])
    def test_large_kappa_keeps_ln_v(self, bounds, kappa):
        inputs = BoundInputs.from_norms(1.0, kappa, 1.0)
        ln_v = math.log1p(-kappa ** -2)
        assert inputs.ln_v == ln_v
        assert bounds.xi(inputs.u, inputs.v, inputs.ln_v) == pytest.approx(math.log2(math.log(2.0) / -ln_v), rel=1e-12)
        assert math.isfinite(bounds.log_product_f(inputs))

    def test_v_rounding_to_one_is_not_divergent(self, bounds):
        inputs = BoundInputs.from_norms(1.0, 1e9, 1.0)
        assert inputs.v == 1.0
        assert bounds.max_factor_bound(inputs) > 1.0
        assert bounds.cutoff_report(inputs).M >= bounds.xi(inputs.u, inputs.v, inputs.ln_v) + 1.0


class TestProduct:
    def test_trivial_products(self, bounds):
        assert bounds.log_product_f(BoundInputs(u=2.0, v=0.5, c=0.0)) == 0.0
        assert bounds.log_product_f(BoundInputs(u=2.0, v=0.0, c=5.0)) == 0.0
        assert bounds.product_f(BoundInputs(u=3.0, v=0.0, c=5.0)) == 1.0

    @pytest.mark.parametrize("u,v,c", [(2.0, 0.5, 1.0), (1.0, 0.9, 0.5), (4.0, 0.7, 3.0)])
    def test_matches_direct_product(self, bounds, u, v, c):
        direct = math.prod(1.0 + c * u ** k * v ** (2 ** k) for k in range(14))
        assert bounds.product_f(BoundInputs(u=u, v=v, c=c)) == pytest.approx(direct, rel=1e-12)

    def test_divergence(self, bounds):
        with pytest.raises(DivergenceError) as exc_info:
            bounds.log_product_f(BoundInputs(u=2.0, v=1.0, c=1.0))
        assert exc_info.value.detail["v"] == 1.0

    def test_negative_c_is_rejected(self):
        with pytest.raises(ValidationError):
            BoundInputs(u=2.0, v=0.5, c=-1.0)

    def test_xi(self, bounds):
        assert bounds.xi(2.0, 0.5) == pytest.approx(0.0, abs=1e-15)
        assert bounds.xi(math.e, math.exp(-1.0 / 16.0)) == pytest.approx(4.0)
        with pytest.raises(DomainError):
            bounds.xi(1.0, 0.5)

    @pytest.mark.parametrize("u,v,c", [(4.0, 0.9, 3.0), (2.0, 0.99, 1.0), (8.0, 0.5, 10.0)])
    def test_max_factor_bounds_every_factor(self, bounds, u, v, c):
        inputs = BoundInputs(u=u, v=v, c=c)
        ceiling = bounds.max_factor_bound(inputs)
        assert all(bounds.factor(inputs, k) <= ceiling * (1.0 + 1e-12) for k in range(65))

    def test_huge_product_stays_in_log_space(self, bounds):
        inputs = inputs_at(8.0, 20.0, 1e6)
        ln_value = bounds.log_product_f(inputs)
        assert ln_value > 709.0
        assert bounds.product_f(inputs) == math.inf

    def test_report_without_cutoff(self, bounds):
        report = bounds.product_report(BoundInputs(u=2.0, v=0.5, c=1.0))
        assert report.xi == pytest.approx(0.0, abs=1e-15)
        assert report.cutoff is None and report.asf is None
        assert report.product == pytest.approx(bounds.product_f(report.inputs))

    def test_report_with_cutoff(self, bounds):
        report = bounds.product_report(inputs_at(8.0, 8.0, 10.0))
        assert report.cutoff is not None
        assert report.asf is not None
        assert report.product_ln <= report.asf.ln_value


class TestCutoff:
    GRID = [(u, xi, c) for u in (2.0, 4.0, 8.0) for xi in (4.0, 6.0, 8.0, 12.0) for c in (1.0, 10.0, 1e3, 1e6)]

    @pytest.mark.parametrize("u,xi,c", GRID)
    def test_closed_majorant_dominates(self, bounds, u, xi, c):
        inputs = inputs_at(u, xi, c)
        asf = bounds.asf_bound(inputs)
        assert bounds.log_product_f(inputs) <= asf.ln_value
        assert asf.branch in (Branch.CONDITION_DOMINATED, Branch.RATIO_DOMINATED)

    @pytest.mark.parametrize("u,xi,c", GRID)
    def test_tail_beyond_cutoff_is_small(self, bounds, u, xi, c):
        cutoff = bounds.cutoff_report(inputs_at(u, xi, c))
        assert cutoff.tail_ln <= 1.0
        assert cutoff.cd17_margin >= 0.0
        assert cutoff.M + 1 >= cutoff.target - 1e-9
        assert cutoff.M >= xi + 1.0 - 1e-9

    def test_cutoff_needs_xi_four(self, bounds):
        with pytest.raises(DomainError):
            bounds.cutoff_report(inputs_at(2.0, 3.0, 1.0))

    def test_closed_majorant_needs_c_one(self, bounds):
        with pytest.raises(DomainError):
            bounds.asf_bound(inputs_at(2.0, 6.0, 0.5))

    def test_closed_majorant_needs_ratio_sixteen(self, bounds):
        with pytest.raises(DomainError):
            bounds.asf_bound(inputs_at(2.0, 3.0, 2.0))


class TestGammaTail:
    @pytest.mark.parametrize("a_param", [2.0, 3.0, 5.0])
    def test_estimate_dominates_quadrature(self, bounds, a_param):
        for x in np.linspace(2.0 * (a_param - 1.0), 10.0 * (a_param - 1.0), 9):
            check = bounds.gamma_tail_check(a_param, float(x))
            assert check.dominated, check

    def test_known_value(self, bounds):
        # Gamma(2, x) = (1 + x) e^-x
        assert bounds.gamma_tail_quadrature(2.0, 2.0) == pytest.approx(3.0 * math.exp(-2.0), rel=1e-9)
        assert bounds.gamma_tail_estimate(2.0, 2.0) == pytest.approx(0.9712, rel=1e-3)

    def test_outside_the_range(self, bounds):
        with pytest.raises(DomainError):
            bounds.gamma_tail_estimate(3.0, 3.0)


class TestElementBounds:
    def test_identity(self, bounds):
        report = bounds.ncicstar_report(1.0, 1.0, 1.0, 1.0, measured=1.0)
        assert report.product_bound == pytest.approx(1.0)
        assert report.dominated is True

    def test_scaled_identity(self, bounds):
        assert bounds.ncicstar_bound(2.0, 2.0, 0.5, 1.0) == pytest.approx(0.5)

    def test_condition_below_one(self, bounds):
        with pytest.raises(DomainError):
            bounds.ncicstar_report(1.0, 1.0, 0.5, 1.0)

    def test_constant_below_one(self, bounds):
        with pytest.raises(DomainError):
            bounds.ncicstar_report(2.0, 1.0, 2.0, 0.5)

    def test_tightening_never_loosens(self, bounds):
        report = bounds.ncicstar_report(30.0, 1.0, 3.0, 1.0)
        assert report.product_bound_ln <= report.plain_product_bound_ln

    def test_an_member_is_dominated(self, bounds, c1_inversion):
        report = bounds.element_report(c1_inversion, an_family(5))
        assert report.kappa == pytest.approx(3.0, rel=1e-9)
        assert report.asymptotic_bound_ln is None
        assert report.dominated is True

    def test_skewed_symbol_is_dominated(self, bounds, c1_inversion, skewed):
        report = bounds.element_report(c1_inversion, skewed, constant=1.0)
        assert report.kappa >= 5.0
        assert report.asymptotic_bound_ln is not None
        assert report.product_bound_ln <= report.asymptotic_bound_ln
        assert report.dominated is True

    def test_identity_element(self, bounds, c1_inversion):
        report = bounds.element_report(c1_inversion, TorusPolynomial.constant(1.0))
        assert report.measured == pytest.approx(1.0)
        assert report.product_bound == pytest.approx(1.0)
        assert report.dominated is True

    def test_asymptotic_needs_kappa_five(self, bounds):
        with pytest.raises(DomainError):
            bounds.theorem41_bound(3.0, 1.0, 2.0, 1.0)

    def test_wiener_has_no_bound(self, bounds, wiener_pair):
        with pytest.raises(DomainError):
            bounds.element_report(InversionService(wiener_pair), an_family(2), constant=1.0)

    @pytest.mark.parametrize("C", [1.0, 2.0])
    def test_controlling_function_dominates(self, bounds, C):
        constants = bounds.corollary_constants(C)
        for ratio in (1.0, 10.0, 100.0):
            for kappa in (5.0, 50.0, 5000.0):
                report = bounds.theorem41_bound(ratio, 1.0, kappa, C)
                h_ln = bounds.corollary_h_ln(ratio, kappa, constants.ln_C1, constants.C2)
                assert h_ln >= report.asymptotic_bound_ln

    def test_controlling_function_domain(self, bounds):
        assert bounds.corollary_h(1.0, 1.0, 2.0, 3.0) == pytest.approx(2.0)
        with pytest.raises(DomainError):
            bounds.corollary_h_ln(0.5, 0.5, 0.0, 1.0)

    def test_little_o_ratio_is_negative(self, bounds):
        assert bounds.little_o_ratio_ln(10.0, 20.0, 1.0, 10.0, 1.0) < 0.0


class TestVerifiers:
    def test_dyadic_bound(self, bounds, c1, rng):
        for _ in range(5):
            c = SamplerService.torus_polynomial(rng, max_degree=3)
            assert bounds.dyadic_violations(c1, c, 1.0, n_max=32) == []

    def test_summed_form(self, bounds, c1):
        c = TorusPolynomial.from_mapping({0: 0.3, 1: 0.2})
        lhs, f = bounds.summed_check(c1, c, 1.0, N=64)
        assert 1.0 < lhs <= f

    def test_summed_form_needs_contraction(self, bounds, c1, cosine):
        with pytest.raises(DomainError):
            bounds.summed_check(c1, cosine, 1.0)

    def test_norm_of_the_contraction(self, bounds, c1, rng, skewed):
        elements = [skewed, an_family(5)] + [
            SamplerService.nonvanishing_polynomial(rng, degree=4, amplitude=0.8) for _ in range(10)
        ]
        for a in elements:
            left, right = bounds.norma_check(c1, a)
            assert left <= right

    def test_hermitian_reduction(self, bounds, c1, c1_inversion, approx, matrix_inversion, skewed, rng):
        assert bounds.normb_gap(c1, skewed, c1_inversion.condition_number(skewed)) < 1e-9
        a = SamplerService.matrix_with_condition(rng, 5, kappa=7.0)
        assert isinstance(a, ComplexMatrix)
        assert bounds.normb_gap(approx, a, matrix_inversion.condition_number(a)) < 1e-9


@pytest.fixture(scope="module")
def approx_constant() -> float:
    return AlgebraService(AlgebraPair(kind="ApproxSpace_in_Matrices")).structure_constant(samples=30, seed=0)


def _log_uniform_kappa(rng: np.random.Generator) -> float:
    return float(np.exp(rng.uniform(math.log(1.1), math.log(50.0))))


def _torus_elements(rng: np.random.Generator, count: int):
    for _ in range(count):
        kappa = _log_uniform_kappa(rng)
        degree = int(rng.integers(1, 3))
        yield SamplerService.nonvanishing_polynomial(rng, degree=degree, amplitude=(kappa - 1.0) / (kappa + 1.0))


def _matrix_elements(rng: np.random.Generator, count: int):
    for _ in range(count):
        n = int(rng.integers(2, 6))
        yield SamplerService.matrix_with_condition(rng, n, _log_uniform_kappa(rng), scale=float(rng.uniform(0.5, 3.0)))


class TestDomination:
    """measured ||a^-1||_A <= product bound (<= asymptotic bound for kappa >= 5)."""

    @staticmethod
    def _assert_dominated(report):
        assert 1.0 <= report.kappa <= 50.0 * (1.0 + 1e-9)
        assert math.log(report.measured) <= report.product_bound_ln + 1e-9
        if report.kappa >= 5.0:
            assert report.product_bound_ln <= report.asymptotic_bound_ln + 1e-9
        assert report.dominated is True

    def test_torus_elements(self, bounds, c1_inversion):
        rng = np.random.default_rng(101)
        for a in _torus_elements(rng, 6):
            self._assert_dominated(bounds.element_report(c1_inversion, a, constant=1.0, tol=1e-8))

    def test_matrix_elements(self, bounds, matrix_inversion, approx_constant):
        rng = np.random.default_rng(202)
        for a in _matrix_elements(rng, 6):
            self._assert_dominated(bounds.element_report(matrix_inversion, a, constant=approx_constant, tol=1e-8))

    @pytest.mark.slow
    def test_two_hundred_seeded_elements(self, bounds, c1_inversion, matrix_inversion, approx_constant):
        rng = np.random.default_rng(303)
        reports = [bounds.element_report(c1_inversion, a, constant=1.0, tol=1e-8) for a in _torus_elements(rng, 100)]
        reports += [
            bounds.element_report(matrix_inversion, a, constant=approx_constant, tol=1e-8)
            for a in _matrix_elements(rng, 100)
        ]
        assert len(reports) == 200
        for report in reports:
            self._assert_dominated(report)
        assert max(report.kappa for report in reports) > 25.0

import numpy as np
import pytest

from apps.core.exceptions import InvalidParameterError, UnsupportedError
from apps.core.grids import GridFunction, GridSpec, integrate
from apps.functionals.jets import MapVariable, RadialMap
from apps.geometry.profiles import Interval
from apps.stability.cases import (
    StabilityKind,
    catalog_beta,
    coerce_case,
    hyperbolic_zeroth_term,
    sphere_zeroth_term,
    stability_case,
)
from apps.stability.forms import (
    duality_error,
    general_second_variation,
    jacobi_operator_apply,
    second_variation_form,
)
from apps.stability.rayleigh import CERTIFICATE_HEADER, Verdict, certificate_rows, min_rayleigh
from apps.stability.variation import VariationField

SPHERE_INTERVAL = (-10.0, 0.0)
HYPERBOLIC_INTERVAL = (-10.0, -0.1)


@pytest.fixture
def sphere_case():
    return stability_case(StabilityKind.SPHERE)


@pytest.fixture
def hyperbolic_case():
    return stability_case(StabilityKind.HYPERBOLIC)


def _bump(interval, nodes=2001):
    lo, hi = interval
    return VariationField.bump(GridSpec(lo, hi, nodes), center=0.5 * (lo + hi), width=0.45 * (hi - lo))


class TestZerothTerms:
    def test_sphere_term_is_nonnegative_up_to_the_equator(self):
        y = np.linspace(0.0, np.pi / 2, 500)
        assert np.all(sphere_zeroth_term(y) >= 0.0)

    def test_hyperbolic_term_is_nonnegative(self):
        x = np.linspace(-4.0, 4.0, 500)
        assert np.all(hyperbolic_zeroth_term(x) >= 0.0)

    @pytest.mark.parametrize("kind,d", [(StabilityKind.SPHERE, 1.0), (StabilityKind.SPHERE, 0.6), (StabilityKind.HYPERBOLIC, 1.4)])
    def test_closed_forms_match_the_target_expression(self, kind, d):
        case = stability_case(kind, d)
        beta = np.linspace(0.05, 1.5, 40)
        np.testing.assert_allclose(case.closed_zeroth(beta), case.conformal_zeroth(beta), rtol=1e-10, atol=1e-12)

    def test_flat_case_has_no_closed_form(self):
        with pytest.raises(UnsupportedError):
            stability_case(StabilityKind.FLAT).closed_zeroth(0.5)


class TestSecondVariationForm:
    def test_zero_variation(self, sphere_case):
        beta = catalog_beta(sphere_case)
        zero = VariationField.zero(GridSpec(*SPHERE_INTERVAL, 101))
        assert zero.is_zero
        assert second_variation_form(sphere_case, beta, zero) == 0.0

    def test_sphere_bump_is_positive(self, sphere_case):
        assert second_variation_form(sphere_case, catalog_beta(sphere_case), _bump(SPHERE_INTERVAL)) > 0

    def test_hyperbolic_bump_is_positive(self, hyperbolic_case):
        beta = catalog_beta(hyperbolic_case)
        assert second_variation_form(hyperbolic_case, beta, _bump(HYPERBOLIC_INTERVAL)) > 0

    def test_closed_and_target_forms_agree(self, sphere_case):
        beta = catalog_beta(sphere_case)
        variation = _bump(SPHERE_INTERVAL)
        closed = second_variation_form(sphere_case, beta, variation)
        expanded = second_variation_form(sphere_case, beta, variation, use_closed_form=False)
        assert closed == pytest.approx(expanded, rel=1e-10)

    def test_quadratic_scaling(self, hyperbolic_case):
        beta = catalog_beta(hyperbolic_case)
        variation = _bump(HYPERBOLIC_INTERVAL, nodes=801)
        base = second_variation_form(hyperbolic_case, beta, variation)
        assert second_variation_form(hyperbolic_case, beta, variation.scaled(3.0)) == pytest.approx(9.0 * base, rel=1e-12)

    def test_clamping_is_enforced(self):
        with pytest.raises(InvalidParameterError):
            VariationField(GridFunction(0.0, 0.1, np.ones(10)))

    def test_bump_width_must_be_positive(self):
        with pytest.raises(InvalidParameterError):
            VariationField.bump(GridSpec(0.0, 1.0, 11), center=0.5, width=0.0)


class TestGeneralSecondVariation:
    def test_agrees_with_conformal_form_on_a_conformal_solution(self, sphere_case):
        beta = catalog_beta(sphere_case)
        variation = _bump(SPHERE_INTERVAL)
        generic = general_second_variation(sphere_case, beta, variation)
        assert generic == pytest.approx(second_variation_form(sphere_case, beta, variation), rel=1e-10)

    def test_constant_map_into_the_sphere(self, sphere_case):
        zero_beta = catalog_beta(stability_case(StabilityKind.FLAT))
        assert general_second_variation(sphere_case, zero_beta, _bump(SPHERE_INTERVAL, nodes=401)) >= 0.0

    def test_non_critical_beta_adds_the_generic_zeroth_term(self, sphere_case):
        beta = catalog_beta(sphere_case)
        scaled = RadialMap(
            evaluator=lambda t, order: 1.5 * beta.evaluator(t, order),
            domain=beta.domain,
            pole_regular=False,
            variable=MapVariable.LOG_RADIUS,
        )
        variation = _bump((-4.0, 0.0))
        t = variation.nodes
        b0, b1, b2 = (1.5 * np.asarray(beta(t, k), dtype=float) for k in range(3))
        equation = b2 + 2.0 * b1 - 3.0 * sphere_case.q(b0)
        generic = -3.0 * sphere_case.q2(b0) * equation
        on_support = np.abs(variation.values) > 1e-3
        assert np.max(np.abs(generic - sphere_case.conformal_zeroth(b0))[on_support]) > 0.5

        general = general_second_variation(sphere_case, scaled, variation)
        conformal = second_variation_form(sphere_case, scaled, variation, use_closed_form=False)
        expected_gap = integrate((generic - sphere_case.conformal_zeroth(b0)) * variation.values**2, variation.step)
        assert general - conformal == pytest.approx(expected_gap, rel=1e-8)
        assert abs(expected_gap) > 1e-3 * abs(general)

    def test_accepts_a_map_spec(self, sphere_case, euclidean_to_sphere):
        beta = catalog_beta(sphere_case)
        variation = _bump(SPHERE_INTERVAL, nodes=401)
        assert general_second_variation(euclidean_to_sphere, beta, variation) == pytest.approx(
            general_second_variation(sphere_case, beta, variation)
        )


class TestJacobiOperator:
    def test_zero_variation(self, sphere_case):
        beta = catalog_beta(sphere_case)
        applied = jacobi_operator_apply(sphere_case, beta, VariationField.zero(GridSpec(*SPHERE_INTERVAL, 51)))
        assert not np.any(applied.values)

    def test_needs_enough_nodes(self, sphere_case):
        with pytest.raises(InvalidParameterError):
            jacobi_operator_apply(sphere_case, catalog_beta(sphere_case), VariationField.zero(GridSpec(-1.0, 0.0, 7)))

    def test_flat_case_on_a_sine(self):
        case = stability_case(StabilityKind.FLAT)
        k = 2.0
        grid = GridSpec(0.0, 2.0 * np.pi, 1001)
        variation = VariationField.from_function(lambda t: np.sin(k * t), grid)
        applied = jacobi_operator_apply(case, catalog_beta(case), variation)
        expected = (k**4 + 4.0 * k**2) * np.sin(k * grid.points())
        np.testing.assert_allclose(applied.values[4:-4], expected[4:-4], atol=1e-2)
        assert not np.any(applied.values[:2]) and not np.any(applied.values[-2:])

    def test_operator_is_dual_to_the_form(self, sphere_case):
        beta = catalog_beta(sphere_case)
        coarse = duality_error(sphere_case, beta, _bump(SPHERE_INTERVAL, nodes=4001))
        fine = duality_error(sphere_case, beta, _bump(SPHERE_INTERVAL, nodes=8001))
        assert fine < 1e-5
        # second-order differences
        assert fine < coarse / 3.0


class TestMinRayleigh:
    def test_sphere_case_is_stable(self, sphere_case):
        certificate = min_rayleigh(sphere_case, catalog_beta(sphere_case), SPHERE_INTERVAL, 512)
        assert certificate.verdict == Verdict.STABLE
        assert certificate.stable
        assert [nodes for nodes, _ in certificate.history] == [512, 1024]
        assert certificate.min_rayleigh == certificate.history[0][1]

    def test_hyperbolic_case_is_stable(self, hyperbolic_case):
        certificate = min_rayleigh(hyperbolic_case, catalog_beta(hyperbolic_case), HYPERBOLIC_INTERVAL, 256)
        assert certificate.stable
        assert certificate.case_id == "hyperbolic(d=1)"

    def test_generic_coefficients(self, sphere_case):
        certificate = min_rayleigh(sphere_case, catalog_beta(sphere_case), SPHERE_INTERVAL, 128, generic=True)
        assert certificate.stable
        assert certificate.meta["generic"]

    def test_refinement_converges(self, sphere_case):
        beta = catalog_beta(sphere_case)
        values = [min_rayleigh(sphere_case, beta, SPHERE_INTERVAL, n).min_rayleigh for n in (301, 601, 1201)]
        assert all(value > 0 for value in values)
        assert values[2] == pytest.approx(values[1], rel=1e-2)

    def test_needs_enough_nodes(self, sphere_case):
        with pytest.raises(InvalidParameterError):
            min_rayleigh(sphere_case, catalog_beta(sphere_case), SPHERE_INTERVAL, 32)

    def test_certificate_rows(self, sphere_case):
        certificate = min_rayleigh(sphere_case, catalog_beta(sphere_case), SPHERE_INTERVAL, 64, case_id="C1B")
        rows = certificate_rows([certificate])
        assert tuple(rows[0]) == CERTIFICATE_HEADER
        assert rows[0]["case"] == "C1B"
        assert rows[0]["verdict"] == "Stable"


class TestStabilityCases:
    def test_inversion_beta(self, sphere_case):
        beta = catalog_beta(sphere_case, case_id="Inv1B")
        assert beta.variable == MapVariable.LOG_RADIUS
        assert beta(0.0) == pytest.approx(np.pi / 2)

    def test_target_mismatch(self, sphere_case):
        with pytest.raises(InvalidParameterError):
            catalog_beta(sphere_case, case_id="Inv1C")

    def test_curved_domain_entry(self, sphere_case):
        with pytest.raises(UnsupportedError):
            catalog_beta(sphere_case, case_id="C2B")

    def test_flat_beta_is_zero(self):
        beta = catalog_beta(stability_case(StabilityKind.FLAT))
        assert beta(3.0) == 0.0
        assert beta.domain == Interval(None, None, closed_lo=False)

    def test_coercion(self, euclidean_to_sphere):
        assert coerce_case(euclidean_to_sphere).kind == StabilityKind.SPHERE
        assert coerce_case("hyperbolic").label == "hyperbolic(d=1)"
        with pytest.raises(InvalidParameterError):
            coerce_case("torus")
        with pytest.raises(InvalidParameterError):
            stability_case(StabilityKind.CUSTOM)

import math

import numpy as np
import pytest

from apps.catalog.entries import CaseId, catalog_solution
from apps.core.exceptions import (
    DivergenceError,
    DomainError,
    InvalidParameterError,
    NoConvergenceError,
    PrecisionWarning,
    SingularityError,
    UnsupportedError,
)
from apps.functionals.hamiltonian import cylinder_lagrangian, log_variable_lagrangian
from apps.functionals.jets import Jet4, RadialMap
from apps.geometry.profiles import ProfileKind, make_space_form
from apps.geometry.specs import MapSpec, cylinder_spec
from apps.solvers import series
from apps.solvers.conformal import solve_conformal
from apps.solvers.diagnostics import hamiltonian_drift
from apps.solvers.integration import TRAJECTORY_HEADER, Trajectory, integrate_fixed_rk4, integrate_ode
from apps.solvers.series import (
    PoleSeed,
    check_series_start,
    conformal_cubic_coefficient,
    fifth_order_coefficient,
    pole_series,
    series_defect,
)
from apps.solvers.shooting import (
    BoundaryTarget,
    ShootingMode,
    conformal_family_target,
    conformal_seed,
    shoot_dirichlet,
)


@pytest.fixture
def override_numerics(settings):
    def apply(**values):
        settings.NUMERICS = {**settings.NUMERICS, **values}

    return apply


@pytest.fixture
def c1b_trajectory(c1b):
    jet0 = pole_series(c1b.spec, PoleSeed(2.0, -2.0 / 3.0, 1e-3))
    return integrate_ode(c1b.spec, jet0, 10.0, rtol=1e-12, atol=1e-14)


class TestPoleSeries:
    def test_linear_map(self, euclidean_to_euclidean):
        jet = pole_series(euclidean_to_euclidean, PoleSeed(2.0, 0.0, 1e-3))
        assert jet.derivatives == pytest.approx((2e-3, 2.0, 0.0, 0.0, 0.0))

    @pytest.mark.parametrize("case,a3", [(CaseId.C1B, -2.0 / 3.0), (CaseId.C1C, 2.0 / 3.0)])
    def test_matches_closed_form(self, case, a3):
        entry = catalog_solution(case)
        eps = 1e-3
        jet = pole_series(entry.spec, PoleSeed(2.0, a3, eps))
        exact = entry.map.jet(eps)
        assert jet.a0 == pytest.approx(exact.a0, abs=1e-12)
        assert jet.a1 == pytest.approx(exact.a1, abs=1e-12)
        assert jet.a2 == pytest.approx(exact.a2, abs=1e-12)
        assert jet.a3 == pytest.approx(exact.a3, abs=1e-9)
        assert jet.a4 == pytest.approx(exact.a4, abs=1e-6)

    def test_fifth_order_coefficient_of_the_sphere_solution(self, euclidean_to_sphere):
        assert fifth_order_coefficient(euclidean_to_sphere, 2.0, -2.0 / 3.0) == pytest.approx(0.4)

    def test_large_offset_warns(self, euclidean_to_sphere):
        with pytest.warns(PrecisionWarning):
            pole_series(euclidean_to_sphere, PoleSeed(10.0, 0.0, 0.1))

    def test_angular_weight_must_match_dimension(self, euclidean, unit_sphere):
        spec = MapSpec(m=4, f=euclidean, h=unit_sphere, lam=8.0)
        with pytest.raises(UnsupportedError):
            pole_series(spec, PoleSeed(1.0, 0.0))

    def test_cylinder_has_no_pole(self, unit_sphere):
        with pytest.raises(UnsupportedError):
            pole_series(cylinder_spec(3.0, unit_sphere), PoleSeed(1.0, 0.0))

    def test_seed_validation(self):
        with pytest.raises(InvalidParameterError):
            PoleSeed(float("inf"), 0.0)
        with pytest.raises(InvalidParameterError):
            PoleSeed(1.0, 0.0, eps=0.0)

    def test_default_offset_comes_from_settings(self, override_numerics):
        override_numerics(POLE_EPS=2e-3)
        assert PoleSeed(1.0, 0.0).eps == 2e-3

    def test_matched_series_defect_shrinks_like_eps_cubed(self, c1b):
        defect = series_defect(c1b.spec, PoleSeed(2.0, -2.0 / 3.0, 0.05))
        assert defect.resolved
        assert defect.order == pytest.approx(3.0, abs=0.3)
        assert defect.consistent

    def test_matched_series_defect_at_default_offset(self, c1b):
        defect = series_defect(c1b.spec, PoleSeed(2.0, -2.0 / 3.0, 1e-3))
        assert defect.consistent
        assert defect.at_eps < 1e-4

    def test_wrong_fifth_order_term_is_detected(self, c1b, monkeypatch):
        matched = series_defect(c1b.spec, PoleSeed(2.0, -2.0 / 3.0, 1e-3))
        monkeypatch.setattr(series, "fifth_order_coefficient", lambda spec, a1, a3: 0.0)
        broken = series_defect(c1b.spec, PoleSeed(2.0, -2.0 / 3.0, 1e-3))
        assert broken.at_eps > 1e-2
        assert broken.at_eps > 1e3 * matched.at_eps
        assert broken.order == pytest.approx(1.0, abs=0.2)
        assert not broken.consistent
        with pytest.warns(PrecisionWarning, match="inconsistent"):
            check_series_start(c1b.spec, PoleSeed(2.0, -2.0 / 3.0, 1e-3))

    def test_conformal_cubic_coefficient(self, euclidean_to_sphere):
        assert conformal_cubic_coefficient(euclidean_to_sphere, 2.0) == pytest.approx(-2.0 / 3.0)


class TestIntegration:
    def test_linear_map_is_reproduced(self, euclidean_to_euclidean):
        jet0 = pole_series(euclidean_to_euclidean, PoleSeed(3.0, 0.0, 1e-3))
        trajectory = integrate_ode(euclidean_to_euclidean, jet0, 5.0)
        assert trajectory.r[-1] == pytest.approx(5.0)
        np.testing.assert_allclose(trajectory.alpha, 3.0 * trajectory.r, atol=1e-10)

    def test_sphere_solution_is_reproduced(self, c1b_trajectory):
        exact = 2.0 * np.arctan(c1b_trajectory.r)
        assert np.max(np.abs(c1b_trajectory.alpha - exact)) < 1e-7
        assert c1b_trajectory.meta["method"] == "RK45"
        assert c1b_trajectory.meta["steps"] == c1b_trajectory.size - 1

    def test_perturbed_start_leaves_the_solution(self, c1b):
        jet0 = pole_series(c1b.spec, PoleSeed(2.0, -2.0 / 3.0 + 1e-2, 1e-3))
        try:
            trajectory = integrate_ode(c1b.spec, jet0, 10.0)
        except DivergenceError as exc:
            assert exc.last_node is not None
        else:
            assert np.max(np.abs(trajectory.alpha - 2.0 * np.arctan(trajectory.r))) > 1e-3

    def test_range_through_the_antipode(self, unit_sphere):
        spec = MapSpec(m=4, f=unit_sphere, h=unit_sphere)
        with pytest.raises(SingularityError):
            integrate_ode(spec, Jet4(1e-3, 1e-3, 1.0, 0.0, 0.0), 4.0)

    def test_range_ending_at_the_antipode(self, unit_sphere):
        spec = MapSpec(m=4, f=unit_sphere, h=unit_sphere)
        with pytest.raises(SingularityError):
            integrate_ode(spec, Jet4(0.5, 0.5, 1.0, 0.0, 0.0), math.pi)

    def test_divergence_threshold(self, euclidean_to_euclidean, override_numerics):
        override_numerics(DIVERGENCE_THRESHOLD=10.0)
        jet0 = Jet4(1e-3, 3e-3, 3.0, 0.0, 0.0)
        with pytest.raises(DivergenceError) as excinfo:
            integrate_ode(euclidean_to_euclidean, jet0, 5.0)
        assert excinfo.value.last_node[0] == pytest.approx(10.0 / 3.0, rel=1e-6)

    def test_start_above_threshold(self, euclidean_to_euclidean, override_numerics):
        override_numerics(DIVERGENCE_THRESHOLD=1.0)
        with pytest.raises(DivergenceError) as excinfo:
            integrate_ode(euclidean_to_euclidean, Jet4(1e-3, 3e-3, 3.0, 0.0, 0.0), 5.0)
        assert excinfo.value.last_node[0] == pytest.approx(1e-3)

    def test_fixed_step_rk4_is_fourth_order(self, c1b):
        jet0 = c1b.map.jet(0.5)
        exact = c1b.map(1.5)
        errors = [abs(integrate_fixed_rk4(c1b.spec, jet0, 1.5, n).alpha[-1] - exact) for n in (20, 40, 80)]
        orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
        np.testing.assert_allclose(orders, 4.0, atol=0.3)

    def test_fixed_step_rk4_needs_a_step(self, c1b):
        with pytest.raises(InvalidParameterError):
            integrate_fixed_rk4(c1b.spec, c1b.map.jet(0.5), 1.5, 0)


class TestTrajectory:
    def test_adaptive_nodes_resample_to_a_grid(self, c1b_trajectory):
        assert not c1b_trajectory.is_uniform
        with pytest.raises(InvalidParameterError):
            c1b_trajectory.as_grid()
        resampled = c1b_trajectory.resample(101)
        assert resampled.is_uniform
        grid = resampled.as_grid()
        assert grid.size == 101
        assert grid.start == pytest.approx(1e-3)
        assert grid.stop == pytest.approx(10.0)

    def test_radial_map_view(self, c1b_trajectory):
        radial_map = c1b_trajectory.as_radial_map()
        assert radial_map(1.0) == pytest.approx(math.pi / 2, abs=1e-7)
        assert radial_map(1.0, 1) == pytest.approx(1.0, abs=1e-6)
        assert radial_map(1.0, 4) == pytest.approx(catalog_solution(CaseId.C1B).map(1.0, 4), abs=1e-4)

    def test_csv_rows(self, c1b_trajectory):
        rows = c1b_trajectory.to_csv_rows()
        assert len(rows) == c1b_trajectory.size
        assert tuple(rows[0]) == TRAJECTORY_HEADER
        assert np.isfinite(c1b_trajectory.meta["max_residual"])

    def test_fixed_step_trajectory_has_no_dense_output(self, c1b):
        trajectory = integrate_fixed_rk4(c1b.spec, c1b.map.jet(0.5), 1.5, 10)
        assert trajectory.is_uniform
        assert trajectory.as_grid().size == 11
        with pytest.raises(InvalidParameterError):
            trajectory.state_at(1.0)

    def test_shape_is_checked(self, c1b):
        with pytest.raises(InvalidParameterError):
            Trajectory(c1b.spec, np.array([1.0, 2.0]), np.zeros((2, 3)))


class TestShooting:
    def test_conformal_family_slope(self, euclidean_to_sphere, c1b):
        assert conformal_family_target(euclidean_to_sphere, 1.0, math.pi / 2) == pytest.approx(1.0)
        assert conformal_family_target(euclidean_to_sphere, 0.5, c1b.map(0.5)) == pytest.approx(c1b.map(0.5, 1))

    def test_trivial_boundary_data(self, euclidean_to_sphere):
        seed, trajectory = shoot_dirichlet(
            euclidean_to_sphere, 1.0, BoundaryTarget(0.0, 0.0), guess=PoleSeed(0.05, 0.01)
        )
        assert seed.a1 == pytest.approx(0.0, abs=1e-6)
        assert seed.a3 == pytest.approx(0.0, abs=1e-6)
        assert trajectory.meta["newton_defect"] < 1e-9

    def test_clamped_data_of_the_sphere_solution(self, c1b):
        seed, trajectory = shoot_dirichlet(c1b.spec, 1.0, BoundaryTarget(math.pi / 2, 1.0))
        assert seed.a1 == pytest.approx(2.0, rel=1e-6)
        assert seed.a3 == pytest.approx(-2.0 / 3.0, rel=1e-4)
        assert trajectory.end[0] == pytest.approx(math.pi / 2, abs=1e-9)

    def test_shooting_records_the_series_defect(self, c1b):
        _, trajectory = shoot_dirichlet(c1b.spec, 1.0, BoundaryTarget(math.pi / 2, 1.0))
        assert trajectory.meta["series_defect"] < 1e-4

    def test_shooting_warns_on_an_inconsistent_series(self, c1b, monkeypatch):
        monkeypatch.setattr(series, "fifth_order_coefficient", lambda spec, a1, a3: 0.0)
        with pytest.warns(PrecisionWarning, match="inconsistent"):
            _, trajectory = shoot_dirichlet(c1b.spec, 1.0, BoundaryTarget(math.pi / 2, 1.0))
        assert trajectory.meta["series_defect"] > 1e-2

    def test_conformal_mode(self, c1b):
        alpha_b = 2.0 * math.atan(3.0)
        seed, trajectory = shoot_dirichlet(c1b.spec, 3.0, BoundaryTarget(alpha_b), mode=ShootingMode.CONFORMAL)
        assert seed.a1 == pytest.approx(2.0, rel=1e-6)
        assert trajectory.end[1] == pytest.approx(math.sin(alpha_b) / 3.0, abs=1e-6)
        np.testing.assert_allclose(trajectory.alpha, 2.0 * np.arctan(trajectory.r), atol=1e-6)

    def test_clamped_mode_needs_a_slope(self, c1b):
        with pytest.raises(InvalidParameterError):
            shoot_dirichlet(c1b.spec, 1.0, BoundaryTarget(1.0))

    def test_iteration_budget(self, c1b, override_numerics):
        override_numerics(NEWTON_MAX_ITER=1)
        with pytest.raises(NoConvergenceError) as excinfo:
            shoot_dirichlet(c1b.spec, 1.0, BoundaryTarget(math.pi / 2, 1.0), guess=PoleSeed(2.5, 0.0))
        assert excinfo.value.best_seed is not None
        assert excinfo.value.best_residual > 1e-9


class TestConformalSeed:
    @pytest.mark.parametrize("k,b", [(1.0, 1.0), (0.7, 1.3), (2.0, 0.4)])
    def test_slope_of_the_sphere_family(self, euclidean_to_sphere, k, b):
        seed = conformal_seed(euclidean_to_sphere, b, 2.0 * math.atan(k * b))
        assert seed.a1 == pytest.approx(2.0 * k, rel=1e-8)
        assert seed.a3 == pytest.approx(-2.0 * k**3 / 3.0, rel=1e-8)

    def test_zero_and_negative_boundary_values(self, euclidean_to_sphere):
        assert conformal_seed(euclidean_to_sphere, 1.0, 0.0).as_vector() == pytest.approx([0.0, 0.0])
        mirrored = conformal_seed(euclidean_to_sphere, 1.0, -2.0 * math.atan(0.5))
        assert mirrored.a1 == pytest.approx(-1.0, rel=1e-8)

    def test_boundary_value_past_the_antipode(self, euclidean_to_sphere):
        with pytest.raises(DomainError):
            conformal_seed(euclidean_to_sphere, 1.0, 4.0)


class TestSolveConformal:
    def test_linear_map(self, euclidean_to_euclidean):
        radial_map = solve_conformal(euclidean_to_euclidean, 2.0, (0.0, 5.0))
        assert radial_map(3.0) == pytest.approx(6.0, rel=1e-8)
        assert not radial_map.meta["truncated"]

    def test_sphere_family(self, euclidean_to_sphere):
        k = 0.8
        radial_map = solve_conformal(euclidean_to_sphere, 2.0 * k, (0.0, 6.0))
        assert radial_map(2.0) == pytest.approx(2.0 * math.atan(2.0 * k), rel=1e-8)
        assert radial_map(2.0, 1) == pytest.approx(2.0 * k / (1.0 + (2.0 * k) ** 2), rel=1e-7)
        assert radial_map.meta["grid"].size == 401

    def test_sphere_into_sphere(self):
        spec = MapSpec(m=4, f=make_space_form(ProfileKind.SPHERE, 1.0), h=make_space_form(ProfileKind.SPHERE, 2.0))
        radial_map = solve_conformal(spec, 0.5, (0.0, 3.0), nodes=51)
        assert radial_map(2.0) == pytest.approx(1.0, rel=1e-8)

    def test_truncation(self, euclidean_to_euclidean, override_numerics):
        override_numerics(DIVERGENCE_THRESHOLD=5.0)
        radial_map = solve_conformal(euclidean_to_euclidean, 2.0, (0.0, 5.0))
        assert radial_map.meta["truncated"]
        assert radial_map.domain.hi == pytest.approx(2.5, rel=1e-6)

    @pytest.mark.parametrize("scale,r_range", [(0.0, (0.0, 1.0)), (1.0, (2.0, 1.0))])
    def test_invalid_arguments(self, euclidean_to_sphere, scale, r_range):
        with pytest.raises(InvalidParameterError):
            solve_conformal(euclidean_to_sphere, scale, r_range)


class TestHamiltonianDrift:
    def test_sphere_solution_conserves_h(self, c1b):
        lagrangian = log_variable_lagrangian(4, c1b.spec.h)
        assert hamiltonian_drift(c1b.map, lagrangian, t_range=(-4.0, 4.0)) < 1e-7

    def test_integrated_trajectory(self, c1b, c1b_trajectory):
        lagrangian = log_variable_lagrangian(4, c1b.spec.h)
        assert hamiltonian_drift(c1b_trajectory, lagrangian, t_range=(-2.0, 2.0), nodes=41) < 1e-6

    def test_cylinder(self, unit_sphere):
        entry = catalog_solution(CaseId.CYL_QUARTER_PI, lam=3.0)
        drift = hamiltonian_drift(entry.map, cylinder_lagrangian(3.0, unit_sphere), t_range=(-5.0, 5.0))
        assert drift == pytest.approx(0.0, abs=1e-14)

    def test_non_autonomous_lagrangian(self, c1b):
        with pytest.raises(UnsupportedError):
            hamiltonian_drift(c1b.map, log_variable_lagrangian(5, c1b.spec.h))

    def test_unbounded_domain_needs_a_range(self, c1b):
        with pytest.raises(InvalidParameterError):
            hamiltonian_drift(c1b.map, log_variable_lagrangian(4, c1b.spec.h))

    def test_non_solution_drifts(self, c1b):
        scaled = RadialMap(
            evaluator=lambda x, order: 1.1 * c1b.map.evaluator(x, order),
            domain=c1b.map.domain,
            label="scaled",
        )
        lagrangian = log_variable_lagrangian(4, c1b.spec.h)
        assert hamiltonian_drift(scaled, lagrangian, t_range=(-4.0, 4.0)) > 1e-3

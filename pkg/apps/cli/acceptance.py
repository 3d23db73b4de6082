"""
Reproducibility suite behind ``manage.py verify_all``.

Each check returns a CheckResult; the checks are independent and run on a
thread pool, and results are reported in declaration order.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from apps.catalog.entries import IDENTITY_CASES, CaseId, catalog_solution, verification_points
from apps.catalog.identities import nonexistence_identity
from apps.core.exceptions import BiharmonicError
from apps.core.grids import GridSpec
from apps.functionals.cylinder import cylinder_hamiltonian, cylinder_rigidity, cylinder_tension
from apps.functionals.hamiltonian import hamiltonian_conformal_m4, log_variable_lagrangian
from apps.functionals.jets import Jet4
from apps.functionals.log_variable import to_log_variable
from apps.functionals.residuals import biharmonic_residual, conformal_residual, tension
from apps.geometry.profiles import ProfileKind, make_space_form
from apps.geometry.specs import MapSpec
from apps.solvers.conformal import solve_conformal
from apps.solvers.diagnostics import hamiltonian_drift
from apps.solvers.integration import integrate_fixed_rk4
from apps.solvers.series import PoleSeed
from apps.solvers.shooting import BoundaryTarget, ShootingMode, shoot_dirichlet
from apps.stability.cases import catalog_beta, stability_case
from apps.stability.forms import duality_error, general_second_variation, second_variation_form
from apps.stability.rayleigh import min_rayleigh
from apps.stability.variation import VariationField

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-8
PARAMETER_PAIRS = ((0.5, 2.0), (1.0, 1.0), (2.0, 0.5))
SEED = 20240611


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _euclidean_to(kind, d: float = 1.0, m: int = 4) -> MapSpec:
    curvature = None if kind == ProfileKind.EUCLIDEAN else d
    return MapSpec(m=m, f=make_space_form(ProfileKind.EUCLIDEAN), h=make_space_form(kind, curvature))


def check_catalog_residuals() -> Tuple[bool, str]:
    worst = 0.0
    for case in (CaseId.C1A, CaseId.C1B, CaseId.C1C):
        for c, d in PARAMETER_PAIRS:
            entry = catalog_solution(case, c=c, d=d)
            r = verification_points(entry, 200)
            residual = np.asarray(biharmonic_residual(entry.spec, entry.map.jet(r)))
            worst = max(worst, float(np.max(np.abs(residual))))
    return worst < RESIDUAL_TOL, f"max |residual| {worst:.2e}"


def check_nonexistence_identities() -> Tuple[bool, str]:
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for case in IDENTITY_CASES:
        for c, d in PARAMETER_PAIRS:
            entry = catalog_solution(case, c=c, d=d)
            f_hi = entry.spec.f.domain.hi
            h_hi = entry.spec.h.domain.hi
            r = rng.uniform(0.05, (f_hi - 0.05) if f_hi else 3.0, 500)
            alpha = rng.uniform(0.05, min(2.5, h_hi - 0.05) if h_hi else 2.5, 500)
            residual = np.asarray(conformal_residual(entry.spec, alpha, r, normalized=True))
            identity = np.asarray(nonexistence_identity(case, c, d, r, alpha))
            if not np.allclose(residual, identity, rtol=1e-10, atol=1e-9):
                return False, f"{case} with c={c:g}, d={d:g} departs from its identity"
            worst = max(worst, float(np.max(np.abs(residual - identity) / (1.0 + np.abs(identity)))))
    return True, f"max deviation {worst:.2e}"


def check_m5_example() -> Tuple[bool, str]:
    m = 5
    spec = _euclidean_to(ProfileKind.SPHERE, m=m)
    radial_map = solve_conformal(spec, 2.0, (0.1, 3.0), nodes=101)
    r = radial_map.meta["grid"].nodes
    jet = radial_map.jet(r)
    alpha = np.asarray(jet.a0)
    if np.max(np.abs(alpha - 2.0 * np.arctan(r))) > 1e-8:
        return False, "conformal solution departs from 2 arctan r"
    expected = 4.0 * (m - 2) * (m - 4) * r ** (m - 5) * np.sin(2.0 * alpha) * np.sin(alpha / 2.0) ** 4
    residual = np.asarray(biharmonic_residual(spec, jet))
    substituted = np.asarray(conformal_residual(spec, alpha, r))
    worst = float(np.max(np.abs(residual - expected)))
    worst = max(worst, float(np.max(np.abs(substituted - expected))))
    # proper: the conformal map is not biharmonic for m = 5
    passed = worst < 1e-6 and float(np.max(np.abs(expected))) > 1e-2
    return passed, f"max deviation {worst:.2e}"


def check_hamiltonian() -> Tuple[bool, str]:
    rng = np.random.default_rng(SEED + 2)
    beta = rng.uniform(-2.0, 2.0, 1000)
    conformal_worst = 0.0
    for kind in (ProfileKind.EUCLIDEAN, ProfileKind.SPHERE, ProfileKind.HYPERBOLIC):
        h = make_space_form(kind, None if kind == ProfileKind.EUCLIDEAN else 1.0)
        conformal_worst = max(conformal_worst, float(np.max(np.abs(hamiltonian_conformal_m4(h, beta)))))

    drift_worst = 0.0
    for case in (CaseId.C1B, CaseId.C1C):
        entry = catalog_solution(case)
        beta_map = to_log_variable(entry.map, entry.spec.f)
        hi = 8.0 if beta_map.domain.hi is None else min(8.0, beta_map.domain.hi - 0.1)
        drift = hamiltonian_drift(beta_map, log_variable_lagrangian(4, entry.spec.h), (-8.0, hi), nodes=401)
        drift_worst = max(drift_worst, drift)
    passed = conformal_worst < 1e-12 and drift_worst < 1e-7
    return passed, f"conformal H {conformal_worst:.2e}, drift {drift_worst:.2e}"


def check_bvp_round_trip() -> Tuple[bool, str]:
    spec = _euclidean_to(ProfileKind.SPHERE)
    worst_slope = 0.0
    for c in (0.5, 1.0, 2.0):
        k = c * c
        target = BoundaryTarget(2.0 * math.atan(k), 2.0 * k / (1.0 + k * k))
        guess = PoleSeed(2.0 * k * 1.03, -2.0 * k**3 / 3.0 * 0.97)
        seed, _ = shoot_dirichlet(spec, 1.0, target, guess)
        worst_slope = max(worst_slope, abs(seed.a1 - 2.0 * k) / (2.0 * k))

    worst_match = 0.0
    for r_star in (0.5, 1.5, 2.5, 3.0):
        _, trajectory = shoot_dirichlet(spec, 1.0, BoundaryTarget(r_star), mode=ShootingMode.CONFORMAL)
        k = math.tan(r_star / 2.0)
        worst_match = max(worst_match, float(np.max(np.abs(trajectory.alpha - 2.0 * np.arctan(k * trajectory.r)))))
        states = trajectory.states.T
        tau = np.asarray(tension(spec, Jet4(trajectory.r, states[0], states[1], states[2])))
        if not np.max(np.abs(tau)) > 1e-6:
            return False, f"R*={r_star} produced a harmonic map"
    passed = worst_slope < 1e-6 and worst_match < 1e-6
    return passed, f"slope error {worst_slope:.2e}, R* match {worst_match:.2e}"


def check_cylinder() -> Tuple[bool, str]:
    r = np.linspace(-5.0, 5.0, 11)
    worst = 0.0
    for case in (CaseId.CYL_QUARTER_PI, CaseId.CYL_THREE_QUARTER_PI):
        for lam in (1.0, 3.0, 8.0):
            entry = catalog_solution(case, lam=lam)
            jet = entry.map.jet(r)
            tau = np.asarray(cylinder_tension(lam, entry.spec.h, jet))
            ham = np.asarray(cylinder_hamiltonian(lam, entry.spec.h, jet))
            worst = max(worst, float(np.max(np.abs(np.abs(tau) - lam / 2.0))))
            worst = max(worst, float(np.max(np.abs(ham + lam**2 / 8.0))))
            if not cylinder_rigidity(lam, entry.spec.h, entry.map, GridSpec(-5.0, 5.0, 101)).rigid:
                return False, f"{case} with lambda={lam:g} failed the rigidity check"
    return worst < 1e-10, f"max deviation {worst:.2e}"


def check_stability() -> Tuple[bool, str]:
    hyperbolic = stability_case("hyperbolic", 1.0)
    sphere = stability_case("sphere", 1.0)
    hyperbolic_beta = catalog_beta(hyperbolic, 1.0)
    sphere_beta = catalog_beta(sphere, 1.0)
    certificates = [
        min_rayleigh(hyperbolic, hyperbolic_beta, (-10.0, -0.1), 512),
        min_rayleigh(sphere, sphere_beta, (-10.0, 0.0), 512),
    ]
    if not all(certificate.stable for certificate in certificates):
        return False, ", ".join(f"{cert.case_id}: {cert.verdict}" for cert in certificates)

    hyperbolic_bump = VariationField.bump(GridSpec(-10.0, -0.1, 4001), center=-5.0, width=2.5)
    sphere_bump = VariationField.bump(GridSpec(-10.0, 0.0, 8001), center=-5.0, width=4.5)
    duality = max(
        duality_error(hyperbolic, hyperbolic_beta, hyperbolic_bump),
        duality_error(sphere, sphere_beta, sphere_bump),
    )

    agreement = 0.0
    for case, beta, hi in ((sphere, sphere_beta, 0.0), (hyperbolic, hyperbolic_beta, -0.1)):
        field = VariationField.bump(GridSpec(-10.0, hi, 2001), center=-5.0, width=2.5)
        form = second_variation_form(case, beta, field)
        generic = general_second_variation(case, beta, field)
        agreement = max(agreement, abs(form - generic) / abs(form))
    passed = duality < 1e-5 and agreement < 1e-10
    return passed, f"duality {duality:.2e}, generic/conformal {agreement:.2e}"


def _fitted_order(steps, errors) -> float:
    return float(np.polyfit(np.log(steps), np.log(errors), 1)[0])


def check_orders() -> Tuple[bool, str]:
    entry = catalog_solution(CaseId.C1B)
    exact = np.array(entry.map.derivatives(1.5, upto=3))
    jet0 = entry.map.jet(0.5)
    steps, errors = [], []
    for count in (20, 40, 80, 200):
        trajectory = integrate_fixed_rk4(entry.spec, jet0, 1.5, count)
        steps.append(1.0 / count)
        errors.append(float(np.max(np.abs(trajectory.end - exact))))
    rk4_order = _fitted_order(steps, errors)

    case = stability_case("hyperbolic", 1.0)
    beta = catalog_beta(case, 1.0)
    widths, duality = [], []
    for nodes in (1001, 2001, 4001):
        grid = GridSpec(-10.0, -0.1, nodes)
        widths.append(grid.step)
        duality.append(duality_error(case, beta, VariationField.bump(grid, center=-5.0, width=2.5)))
    fd_order = _fitted_order(widths, duality)
    passed = abs(rk4_order - 4.0) <= 0.2 and abs(fd_order - 2.0) <= 0.2
    return passed, f"RK4 order {rk4_order:.2f}, duality order {fd_order:.2f}"


CHECKS: Tuple[Tuple[str, Callable[[], Tuple[bool, str]]], ...] = (
    ("catalog_residuals", check_catalog_residuals),
    ("nonexistence_identities", check_nonexistence_identities),
    ("m5_example", check_m5_example),
    ("hamiltonian", check_hamiltonian),
    ("bvp_round_trip", check_bvp_round_trip),
    ("cylinder", check_cylinder),
    ("stability", check_stability),
    ("convergence_orders", check_orders),
)


def _run_check(name: str, check: Callable[[], Tuple[bool, str]]) -> CheckResult:
    try:
        passed, detail = check()
    except BiharmonicError as exc:
        logger.error(f"Check {name} raised {type(exc).__name__}: {exc}")
        return CheckResult(name, False, f"{type(exc).__name__}: {exc}")
    logger.info(f"Check {name}: {'pass' if passed else 'FAIL'} ({detail})")
    return CheckResult(name, bool(passed), detail)


def run_acceptance(workers: int = 4) -> List[CheckResult]:
    results = {}
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(_run_check, name, check): name for name, check in CHECKS}
        for future in as_completed(futures):
            results[futures[future]] = future.result()
    return [results[name] for name, _ in CHECKS]

"""
Equivariant second variation of the bienergy at a critical point beta(t)
of the log-variable problem, and the fourth-order operator it defines.

With q = h h', the form is the integral of

    (V'' + 2 V' - 3 q'(beta) V)^2 + z V^2

where z = -3 q''(beta) (beta'' + 2 beta' - 3 q(beta)) at a generic
critical point and z = 6 q''(beta) h(beta) (h'(beta) - 1) once the
conformality beta' = h(beta) is used.
"""
import logging

import numpy as np

from apps.core.exceptions import InvalidParameterError
from apps.core.grids import GridFunction, central_first, central_fourth, central_second, integrate
from apps.functionals.jets import RadialMap
from apps.stability.cases import StabilityCase, coerce_case
from apps.stability.variation import VariationField

logger = logging.getLogger(__name__)

MIN_OPERATOR_NODES = 9


def _beta_on(beta: RadialMap, nodes: np.ndarray) -> np.ndarray:
    return np.asarray(beta(nodes, 0), dtype=float)


def conformal_zeroth_coefficient(case: StabilityCase, beta_values, use_closed_form: bool = True):
    if use_closed_form and case.has_closed_form:
        return case.closed_zeroth(beta_values)
    return case.conformal_zeroth(beta_values)


def generic_zeroth_coefficient(case: StabilityCase, beta: RadialMap, nodes: np.ndarray):
    b0, b1, b2 = (np.asarray(beta(nodes, k), dtype=float) for k in range(3))
    return -3.0 * case.q2(b0) * (b2 + 2.0 * b1 - 3.0 * case.q(b0))


def _form(case: StabilityCase, beta_values, variation: VariationField, zeroth) -> float:
    v = variation.values
    step = variation.step
    first = central_first(v, step)
    second = central_second(v, step)
    principal = second + 2.0 * first - 3.0 * case.q1(beta_values) * v
    return integrate(principal**2 + zeroth * v**2, step)


def second_variation_form(case, beta: RadialMap, variation: VariationField, use_closed_form: bool = True) -> float:
    """Quadratic form at a conformal critical point."""
    case = coerce_case(case)
    beta_values = _beta_on(beta, variation.nodes)
    zeroth = conformal_zeroth_coefficient(case, beta_values, use_closed_form)
    return _form(case, beta_values, variation, zeroth)


def general_second_variation(case, beta: RadialMap, variation: VariationField) -> float:
    """Quadratic form at any critical-point candidate; ``case`` may also be a MapSpec."""
    case = coerce_case(case)
    nodes = variation.nodes
    beta_values = _beta_on(beta, nodes)
    return _form(case, beta_values, variation, generic_zeroth_coefficient(case, beta, nodes))


def jacobi_operator_apply(case, beta: RadialMap, variation: VariationField) -> GridFunction:
    """
    I(V) = V'''' - (4 + 6 q') V'' + (9 q'^2 + 6 q q'') V with beta'' = q(beta)
    substituted. The two nodes at each end, where the fourth difference is
    not defined, are zero.
    """
    case = coerce_case(case)
    if variation.values.size < MIN_OPERATOR_NODES:
        raise InvalidParameterError(
            f"Fourth differences need at least {MIN_OPERATOR_NODES} nodes, got {variation.values.size}"
        )
    v = variation.values
    step = variation.step
    b = _beta_on(beta, variation.nodes)
    q1 = case.q1(b)
    applied = central_fourth(v, step) - (4.0 + 6.0 * q1) * central_second(v, step)
    applied += (9.0 * q1**2 + 6.0 * case.q(b) * case.q2(b)) * v
    applied[:2] = 0.0
    applied[-2:] = 0.0
    return variation.grid.with_values(applied)


def duality_error(case, beta: RadialMap, variation: VariationField) -> float:
    """|integral of V I(V) - form(V)|, relative to the form."""
    form = second_variation_form(case, beta, variation)
    paired = integrate(variation.values * jacobi_operator_apply(case, beta, variation).values, variation.step)
    error = abs(paired - form) / max(abs(form), 1e-300)
    logger.debug(f"Form-operator duality error {error:.3e} on {variation.values.size} nodes")
    return error

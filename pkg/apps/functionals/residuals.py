"""
Tension field and biharmonicity residuals of rotationally symmetric maps.

The fourth-order residual is assembled from the tension F and its first
two derivatives through the adjoint of the linearised tension operator:

    G = F'' + (m-1) (f'/f) F' - lambda (h'^2 + h h'') F / f^2

and the full residual equals f^(m-1) G, which is the expanded fourth-order
left-hand side including its f^(m-5) prefactor.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from apps.core.exceptions import InvalidParameterError
from apps.core.grids import GridFunction, GridSpec, central_first, central_second
from apps.functionals.jets import Jet4, RadialMap
from apps.geometry.specs import MapSpec

logger = logging.getLogger(__name__)


def _scalar(value):
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class WarpTerms:
    """f and the derivatives of f'/f and 1/f^2 up to order 2 at a point."""

    f0: np.ndarray
    f1: np.ndarray
    p0: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    s0: np.ndarray
    s1: np.ndarray
    s2: np.ndarray

    @classmethod
    def at(cls, spec: MapSpec, r) -> "WarpTerms":
        spec.f.require_interior(r)
        f0, f1, f2, f3 = (np.asarray(v, dtype=float) for v in spec.f.jet(r))
        return cls(
            f0=f0,
            f1=f1,
            p0=f1 / f0,
            p1=f2 / f0 - f1**2 / f0**2,
            p2=f3 / f0 - 3.0 * f1 * f2 / f0**2 + 2.0 * f1**3 / f0**3,
            s0=1.0 / f0**2,
            s1=-2.0 * f1 / f0**3,
            s2=-2.0 * f2 / f0**3 + 6.0 * f1**2 / f0**4,
        )


def target_terms(spec: MapSpec, alpha) -> Tuple:
    """q = h h' and its derivatives q', q'' as functions of alpha."""
    h0, h1, h2, h3 = (np.asarray(v, dtype=float) for v in spec.h.jet(alpha))
    return h0 * h1, h1**2 + h0 * h2, 3.0 * h1 * h2 + h0 * h3


def tension_derivatives(spec: MapSpec, jet: Jet4) -> Tuple:
    """Tension F and its exact derivatives F', F'' along the jet."""
    w = WarpTerms.at(spec, jet.x)
    mu = float(spec.m - 1)
    lam = spec.angular_weight
    a0, a1, a2, a3, a4 = jet.derivatives
    q0, q1, q2 = target_terms(spec, a0)
    big_q1 = q1 * a1
    big_q2 = q2 * a1**2 + q1 * a2

    f_value = a2 + mu * w.p0 * a1 - lam * q0 * w.s0
    f_prime = a3 + mu * (w.p1 * a1 + w.p0 * a2) - lam * (big_q1 * w.s0 + q0 * w.s1)
    f_second = (
        a4
        + mu * (w.p2 * a1 + 2.0 * w.p1 * a2 + w.p0 * a3)
        - lam * (big_q2 * w.s0 + 2.0 * big_q1 * w.s1 + q0 * w.s2)
    )
    return f_value, f_prime, f_second


def tension(spec: MapSpec, jet: Jet4):
    """alpha'' + (m-1)(f'/f) alpha' - lambda h(alpha) h'(alpha) / f^2."""
    w = WarpTerms.at(spec, jet.x)
    q0 = target_terms(spec, jet.a0)[0]
    value = jet.a2 + (spec.m - 1) * w.p0 * jet.a1 - spec.angular_weight * q0 * w.s0
    return _scalar(value)


def adjoint_residual(spec: MapSpec, jet: Jet4):
    """G, the residual divided by f^(m-1)."""
    w = WarpTerms.at(spec, jet.x)
    f_value, f_prime, f_second = tension_derivatives(spec, jet)
    q1 = target_terms(spec, jet.a0)[1]
    return f_second + (spec.m - 1) * w.p0 * f_prime - spec.angular_weight * q1 * f_value * w.s0


def f_system_scale(spec: MapSpec, r):
    """Factor between the expanded residual and the F-system residual."""
    spec.f.require_interior(r)
    return _scalar(np.asarray(spec.f.eval(r, 0)) ** (spec.m - 1))


def biharmonic_residual(spec: MapSpec, jet: Jet4, normalized: bool = False):
    """
    Left-hand side of the explicit fourth-order equation. With
    ``normalized`` the f^(m-5) prefactor is divided out.
    """
    g = adjoint_residual(spec, jet)
    f0 = np.asarray(spec.f.eval(jet.x, 0))
    power = 4 if normalized else spec.m - 1
    return _scalar(f0**power * g)


def highest_derivative(spec: MapSpec, jet: Jet4) -> float:
    """alpha'''' solving the residual for the given lower-order jet."""
    return -adjoint_residual(spec, jet.replace_top(0.0))


def residual_F_system(
    spec: MapSpec, radial_map: RadialMap, grid: GridSpec
) -> Tuple[GridFunction, GridFunction]:
    """
    Tension F on the grid and the residual of the second-order system for F,
    with F' and F'' by central differences. The residual lives on the
    interior nodes.
    """
    if grid.nodes < 5:
        raise InvalidParameterError(f"F-system needs at least 5 nodes, got {grid.nodes}")
    r = grid.points()
    jet = Jet4(r, *(radial_map(r, k) for k in range(3)))
    values = np.asarray(tension(spec, jet), dtype=float)
    step = grid.step
    f_prime = central_first(values, step)
    f_second = central_second(values, step)

    w = WarpTerms.at(spec, r)
    q1 = target_terms(spec, jet.a0)[1]
    residual = f_second + (spec.m - 1) * w.p0 * f_prime - spec.angular_weight * q1 * values * w.s0
    return (
        GridFunction(grid.lo, step, values),
        GridFunction(grid.lo + step, step, residual[1:-1]),
    )


def conformality_defect(spec: MapSpec, jet: Jet4, sign: int = 1):
    """alpha' - sign * h(alpha) / f(r)."""
    if sign not in (1, -1):
        raise InvalidParameterError(f"sign must be +1 or -1, got {sign}")
    spec.f.require_interior(jet.x)
    value = jet.a1 - sign * np.asarray(spec.h.eval(jet.a0, 0)) / np.asarray(spec.f.eval(jet.x, 0))
    return _scalar(value)


def conformal_bracket(spec: MapSpec, alpha, r):
    """Polynomial part of the conformal biharmonicity condition."""
    m = spec.m
    f0, f1, f2, f3 = (np.asarray(v, dtype=float) for v in spec.f.jet(r))
    h0, h1, h2, h3 = (np.asarray(v, dtype=float) for v in spec.h.jet(alpha))
    return (
        f0**2 * f3
        + h1 * (4.0 * f0 * f2 + (m - 5) * h0 * h2)
        + (3 * m - 14) * f1**2 * h1
        - 2.0 * (m - 4) * f1**3
        + f1 * ((m - 7) * f0 * f2 - 2.0 * (m - 4) * h0 * h2 - 2.0 * (m - 4) * h1**2)
        - h0**2 * h3
        + (m - 2) * h1**3
    )


def conformal_residual(spec: MapSpec, alpha, r, normalized: bool = False):
    """
    Biharmonicity of a conformal map with alpha' = h(alpha)/f(r) substituted.
    The full form is (m-2) f^(m-5) h(alpha) B; ``normalized`` drops the
    f^(m-5) h(alpha) factor.
    """
    spec.f.require_interior(r)
    bracket = (spec.m - 2) * conformal_bracket(spec, alpha, r)
    if normalized:
        return _scalar(bracket)
    f0 = np.asarray(spec.f.eval(r, 0))
    h0 = np.asarray(spec.h.eval(alpha, 0))
    return _scalar(f0 ** (spec.m - 5) * h0 * bracket)

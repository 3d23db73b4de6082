"""
The conformal reduction alpha' = h(alpha)/f(r), started from its odd
series at the pole.
"""
import logging
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from apps.core.conf import numeric_setting
from apps.core.exceptions import InvalidParameterError
from apps.core.grids import GridFunction
from apps.functionals.jets import RadialMap
from apps.geometry.profiles import Interval
from apps.geometry.specs import MapSpec
from apps.solvers.series import conformal_cubic_coefficient

logger = logging.getLogger(__name__)


def conformal_jets(spec: MapSpec, r, alpha) -> Tuple:
    """alpha and its first four derivatives along a conformal solution, by Leibniz on h(alpha) * (1/f)."""
    f0, f1, f2, f3 = (np.asarray(v, dtype=float) for v in spec.f.jet(r))
    h0, h1, h2, h3 = (np.asarray(v, dtype=float) for v in spec.h.jet(alpha))
    p0 = 1.0 / f0
    p1 = -f1 / f0**2
    p2 = -f2 / f0**2 + 2.0 * f1**2 / f0**3
    p3 = -f3 / f0**2 + 6.0 * f1 * f2 / f0**3 - 6.0 * f1**3 / f0**4

    a1 = h0 * p0
    big_h1 = h1 * a1
    a2 = big_h1 * p0 + h0 * p1
    big_h2 = h2 * a1**2 + h1 * a2
    a3 = big_h2 * p0 + 2.0 * big_h1 * p1 + h0 * p2
    big_h3 = h3 * a1**3 + 3.0 * h2 * a1 * a2 + h1 * a3
    a4 = big_h3 * p0 + 3.0 * big_h2 * p1 + 3.0 * big_h1 * p2 + h0 * p3
    return (np.asarray(alpha, dtype=float), a1, a2, a3, a4)


def solve_conformal(
    spec: MapSpec,
    scale: float,
    r_range: Tuple[float, float],
    nodes: int = 401,
    eps: Optional[float] = None,
) -> RadialMap:
    """
    Conformal solution with pole slope ``scale``, sampled on ``nodes``
    points of ``r_range``. Integration stops early, and the map is flagged
    ``truncated``, when alpha leaves the target's domain.
    """
    if not scale > 0:
        raise InvalidParameterError(f"Conformal scale must be positive, got {scale}")
    lo, hi = (float(v) for v in r_range)
    if not hi > lo or lo < 0:
        raise InvalidParameterError(f"Invalid range [{lo}, {hi}]")
    spec.f.require_interior(hi)

    eps = numeric_setting("POLE_EPS") if eps is None else eps
    start = min(eps, 0.1 * hi)
    a3 = conformal_cubic_coefficient(spec, scale)
    alpha0 = scale * start + a3 * start**3
    rtol = numeric_setting("ODE_RTOL")
    atol = numeric_setting("ODE_ATOL")
    threshold = numeric_setting("DIVERGENCE_THRESHOLD")
    target_domain = spec.h.domain

    def rhs(r, y):
        return [spec.h.eval(y[0], 0) / spec.f.eval(r, 0)]

    def leaves_target(r, y):
        gaps = [threshold - abs(y[0])]
        if target_domain.hi is not None:
            gaps.append(target_domain.hi - y[0])
        return min(gaps)

    leaves_target.terminal = True  # type: ignore[attr-defined]

    solution = solve_ivp(
        rhs, (start, hi), [alpha0], method="RK45", rtol=rtol, atol=atol, events=leaves_target, dense_output=True
    )
    # status -1: the step size collapsed at a blow-up of alpha
    truncated = solution.status != 0
    stop = float(solution.t[-1])
    if truncated:
        logger.warning(
            f"Conformal solution for {spec.describe()} stopped at r={stop:.17g}: {solution.message}"
        )
    lo = max(lo, start)
    if not stop > lo:
        raise InvalidParameterError(f"Conformal solution leaves the target before r={lo}")

    grid = GridFunction.sample(lambda x: solution.sol(x)[0], lo, stop, nodes)
    dense = solution.sol

    def evaluate(x, order):
        alpha = dense(x)[0]
        return conformal_jets(spec, x, alpha)[order]

    logger.info(f"Conformal solution with scale {scale:g} on [{lo:g}, {stop:g}], {solution.t.size - 1} steps")
    return RadialMap(
        evaluator=evaluate,
        domain=Interval(lo, stop, closed_hi=True),
        pole_regular=False,
        label=f"conformal scale={scale:g}",
        meta={"source": "conformal", "truncated": truncated, "grid": grid, "scale": scale},
    )

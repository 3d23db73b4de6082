"""
Reduced bienergy (1/2) * integral of tau^2 f^(m-1) dr, reported without the
constant volume factor of the unit sphere.
"""
import logging
import warnings

import numpy as np

from apps.core.conf import numeric_setting
from apps.core.exceptions import ImproperIntegralError, PrecisionWarning
from apps.core.grids import GridSpec, integrate
from apps.functionals.jets import Jet4, RadialMap
from apps.functionals.residuals import tension
from apps.geometry.specs import MapSpec

logger = logging.getLogger(__name__)


def bienergy_density(spec: MapSpec, radial_map: RadialMap, r: np.ndarray) -> np.ndarray:
    jet = Jet4(r, *(radial_map(r, k) for k in range(3)))
    tau = np.asarray(tension(spec, jet), dtype=float)
    return 0.5 * tau**2 * np.asarray(spec.f.eval(r, 0)) ** (spec.m - 1)


def bienergy(spec: MapSpec, radial_map: RadialMap, grid: GridSpec, rtol=None) -> float:
    """
    Composite Simpson on ``grid``, checked against the grid with half the
    step. Endpoints where f vanishes make the integrand singular for
    m < 5 and must be truncated by the caller.
    """
    rtol = numeric_setting("QUADRATURE_RTOL") if rtol is None else rtol
    for end in (grid.lo, grid.hi):
        if bool(spec.f.vanishes(end)):
            raise ImproperIntegralError(
                f"Interval [{grid.lo}, {grid.hi}] touches a zero of f at r={end}; truncate it"
            )

    coarse = integrate(bienergy_density(spec, radial_map, grid.points()), grid.step)
    fine_grid = grid.refined()
    fine = integrate(bienergy_density(spec, radial_map, fine_grid.points()), fine_grid.step)

    change = abs(fine - coarse)
    if change > rtol * max(abs(fine), 1e-300) and change > 1e-14:
        message = (
            f"Bienergy changed by {change:.3e} under panel doubling "
            f"({grid.nodes} -> {fine_grid.nodes} nodes)"
        )
        logger.warning(message)
        warnings.warn(message, PrecisionWarning, stacklevel=2)
    return float(fine)

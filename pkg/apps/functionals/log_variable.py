"""
Change of variable r = e^t for maps out of Euclidean space:
beta(t) = alpha(e^t), with chain-rule jets to order 4.
"""
import math
from typing import Optional

import numpy as np

from apps.core.exceptions import DomainError, InvalidParameterError, UnsupportedError
from apps.functionals.jets import MapVariable, RadialMap
from apps.geometry.profiles import Interval, ProfileKind, WarpingProfile


def _log_interval(domain: Interval) -> Interval:
    if domain.lo is None or domain.lo < 0:
        raise DomainError(f"Map domain {domain.describe()} is not inside (0, inf)")
    lo = None if not domain.lo else math.log(domain.lo)
    hi = None if domain.hi is None else math.log(domain.hi)
    return Interval(lo, hi, closed_lo=lo is not None and domain.closed_lo, closed_hi=domain.closed_hi)


def _exp_interval(domain: Interval) -> Interval:
    lo = 0.0 if domain.lo is None else math.exp(domain.lo)
    hi = None if domain.hi is None else math.exp(domain.hi)
    return Interval(lo, hi, closed_lo=domain.lo is not None and domain.closed_lo, closed_hi=domain.closed_hi)


def log_jet(r, alpha_derivatives):
    """Derivatives of beta in t from derivatives of alpha in r at r = e^t."""
    _, d1, d2, d3, d4 = alpha_derivatives
    return (
        alpha_derivatives[0],
        r * d1,
        r * d1 + r**2 * d2,
        r * d1 + 3.0 * r**2 * d2 + r**3 * d3,
        r * d1 + 7.0 * r**2 * d2 + 6.0 * r**3 * d3 + r**4 * d4,
    )


def radial_jet(r, beta_derivatives):
    """Inverse of ``log_jet``."""
    _, b1, b2, b3, b4 = beta_derivatives
    return (
        beta_derivatives[0],
        b1 / r,
        (b2 - b1) / r**2,
        (b3 - 3.0 * b2 + 2.0 * b1) / r**3,
        (b4 - 6.0 * b3 + 11.0 * b2 - 6.0 * b1) / r**4,
    )


def to_log_variable(radial_map: RadialMap, domain_profile: Optional[WarpingProfile] = None) -> RadialMap:
    if radial_map.variable != MapVariable.RADIUS:
        raise InvalidParameterError("Map is already expressed in the logarithmic variable")
    if domain_profile is not None and domain_profile.kind != ProfileKind.EUCLIDEAN:
        raise UnsupportedError(
            f"Logarithmic variable needs a Euclidean domain, got {domain_profile.label}"
        )
    t_domain = _log_interval(radial_map.domain)

    def evaluate(t, order):
        r = np.exp(t)
        if order == 0:
            return radial_map.evaluator(r, 0)
        derivatives = [radial_map.evaluator(r, k) for k in range(order + 1)]
        derivatives += [0.0] * (5 - len(derivatives))
        return log_jet(r, derivatives)[order]

    return RadialMap(
        evaluator=evaluate,
        domain=t_domain,
        pole_regular=radial_map.pole_regular,
        variable=MapVariable.LOG_RADIUS,
        label=radial_map.label,
        meta=dict(radial_map.meta),
    )


def from_log_variable(log_map: RadialMap) -> RadialMap:
    if log_map.variable != MapVariable.LOG_RADIUS:
        raise InvalidParameterError("Map is not expressed in the logarithmic variable")

    def evaluate(r, order):
        t = np.log(r)
        if order == 0:
            return log_map.evaluator(t, 0)
        derivatives = [log_map.evaluator(t, k) for k in range(order + 1)]
        derivatives += [0.0] * (5 - len(derivatives))
        return radial_jet(r, derivatives)[order]

    r_domain = _exp_interval(log_map.domain)
    return RadialMap(
        evaluator=evaluate,
        domain=r_domain,
        pole_regular=log_map.pole_regular,
        variable=MapVariable.RADIUS,
        label=log_map.label,
        meta=dict(log_map.meta),
    )

"""
Odd power-series start at the pole.

A smooth rotationally symmetric solution is odd in r near the pole,
alpha = a1 r + a3 r^3 + a5 r^5 + ..., with a1 and a3 free and a5 fixed by
the equation. The solver starts at r = eps from the truncated series.
"""
import logging
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from apps.core.conf import numeric_setting
from apps.core.exceptions import InvalidParameterError, PrecisionWarning, UnsupportedError
from apps.functionals.jets import Jet4
from apps.functionals.residuals import adjoint_residual
from apps.geometry.specs import MapSpec

logger = logging.getLogger(__name__)

TRUNCATION_TOL = 1e-10
DEFECT_NOISE_FACTOR = 1e4
# a matched series leaves an O(eps^3) defect, a wrong a5 an O(eps) one
MIN_DEFECT_ORDER = 2.5


@dataclass(frozen=True)
class PoleSeed:
    a1: float
    a3: float
    eps: Optional[float] = None

    def __post_init__(self):
        if not np.isfinite(self.a1) or not np.isfinite(self.a3):
            raise InvalidParameterError(f"Pole seed coefficients must be finite, got ({self.a1}, {self.a3})")
        if self.eps is None:
            object.__setattr__(self, "eps", float(numeric_setting("POLE_EPS")))
        if not self.eps > 0:
            raise InvalidParameterError(f"Pole offset eps must be positive, got {self.eps}")

    def with_coefficients(self, a1: float, a3: float) -> "PoleSeed":
        return PoleSeed(float(a1), float(a3), self.eps)

    def with_eps(self, eps: float) -> "PoleSeed":
        return PoleSeed(self.a1, self.a3, eps)

    def as_vector(self) -> np.ndarray:
        return np.array([self.a1, self.a3], dtype=float)


def _check_pole_regular(spec: MapSpec) -> None:
    if spec.angular_weight != spec.m - 1:
        raise UnsupportedError(
            f"Pole series needs lambda = m - 1 (got lambda={spec.angular_weight:g}, m={spec.m})"
        )
    f = spec.f
    if f.domain.lo != 0.0 or abs(f.eval(0.0, 0)) > 1e-12 or abs(f.eval(0.0, 1) - 1.0) > 1e-8:
        raise UnsupportedError(f"Domain profile {f.label} has no pole with f(0) = 0, f'(0) = 1")
    if not f.is_odd_at_pole() or not spec.h.is_odd_at_pole():
        raise UnsupportedError("Pole series needs profiles with vanishing second derivative at 0")


def fifth_order_coefficient(spec: MapSpec, a1: float, a3: float) -> float:
    """a5 from matching the residual at the pole, given f and h to fifth order."""
    _, f3, f5 = spec.f.taylor_coefficients()
    _, h3, h5 = spec.h.taylor_coefficients()
    lam = spec.angular_weight
    # r-coefficient of the tension
    tension_1 = (6.0 + 2.0 * lam) * a3 + 4.0 * lam * a1 * (f3 - h3 * a1**2)
    source = (
        8.0 * f3 * a3
        - 12.0 * h3 * a1**2 * a3
        + (6.0 * f5 - 5.0 * f3**2) * a1
        + 8.0 * f3 * h3 * a1**3
        - (6.0 * h5 + 3.0 * h3**2) * a1**5
    )
    return (-lam * tension_1 * (2.0 * f3 - 6.0 * h3 * a1**2) / (3.0 + lam) - lam * source) / (20.0 + 4.0 * lam)


def _series_jet(x: float, a1: float, a3: float, a5: float) -> Jet4:
    return Jet4(
        x,
        a1 * x + a3 * x**3 + a5 * x**5,
        a1 + 3.0 * a3 * x**2 + 5.0 * a5 * x**4,
        6.0 * a3 * x + 20.0 * a5 * x**3,
        6.0 * a3 + 60.0 * a5 * x**2,
        120.0 * a5 * x,
    )


def pole_series(spec: MapSpec, seed: PoleSeed) -> Jet4:
    _check_pole_regular(spec)
    truncation = abs(seed.a1 * seed.eps) ** 5
    if truncation > TRUNCATION_TOL:
        message = f"Pole offset eps={seed.eps:g} leaves a truncation term of {truncation:.2e} for a1={seed.a1:g}"
        logger.warning(message)
        warnings.warn(message, PrecisionWarning, stacklevel=2)
    a5 = fifth_order_coefficient(spec, seed.a1, seed.a3)
    return _series_jet(seed.eps, seed.a1, seed.a3, a5)


@dataclass(frozen=True)
class SeriesDefect:
    """
    Mismatch between the series alpha'''' and the one the equation demands
    from the lower derivatives, at eps and eps/2. With the matched a5 it is
    O(eps**3); a wrong fifth-order term leaves an O(eps) part.
    """

    eps: float
    at_eps: float
    at_half_eps: float
    noise_at_eps: float = 0.0
    noise_at_half_eps: float = 0.0

    @property
    def ratio(self) -> float:
        """Close to 2**k when the defect of the truncated series is O(eps**k)."""
        if self.at_half_eps == 0.0:
            return float("inf")
        return self.at_eps / self.at_half_eps

    @property
    def order(self) -> float:
        if self.at_eps == 0.0:
            return float("inf")
        return float(np.log2(self.ratio))

    @property
    def resolved(self) -> bool:
        """Both values sit above the round-off level of the residual."""
        return self.at_eps > self.noise_at_eps and self.at_half_eps > self.noise_at_half_eps

    @property
    def consistent(self) -> bool:
        if self.at_eps <= self.noise_at_eps:
            return True
        return self.order >= MIN_DEFECT_ORDER


def _noise_level(seed: PoleSeed, eps: float) -> float:
    # the residual cancels terms of size a1/eps^3 and a3/eps
    scale = abs(seed.a1) / eps**3 + abs(seed.a3) / eps
    return DEFECT_NOISE_FACTOR * float(np.finfo(float).eps) * scale


def series_defect(spec: MapSpec, seed: PoleSeed) -> SeriesDefect:
    """Unscaled residual of the truncated series at eps and eps/2."""
    offsets = (seed.eps, seed.eps / 2.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PrecisionWarning)
        values = [abs(float(adjoint_residual(spec, pole_series(spec, seed.with_eps(eps))))) for eps in offsets]
    defect = SeriesDefect(
        seed.eps,
        values[0],
        values[1],
        noise_at_eps=_noise_level(seed, offsets[0]),
        noise_at_half_eps=_noise_level(seed, offsets[1]),
    )
    logger.debug(f"Series defect for {spec.describe()}: {defect}")
    return defect


def check_series_start(spec: MapSpec, seed: PoleSeed) -> SeriesDefect:
    """Warn when the truncated series does not solve the equation to its expected order."""
    defect = series_defect(spec, seed)
    if not defect.consistent:
        message = (
            f"Pole series for {spec.describe()} has defect {defect.at_eps:.2e} at eps={seed.eps:g} "
            f"shrinking like eps^{defect.order:.2f}; the truncated series is inconsistent"
        )
        logger.warning(message)
        warnings.warn(message, PrecisionWarning, stacklevel=2)
    return defect


def conformal_cubic_coefficient(spec: MapSpec, a1: float) -> float:
    """a3 of the conformal solution alpha' = h(alpha)/f(r) with slope a1 at the pole."""
    _, f3, _ = spec.f.taylor_coefficients()
    _, h3, _ = spec.h.taylor_coefficients()
    return 0.5 * (h3 * a1**3 - a1 * f3)

"""
Warping profiles of rotationally symmetric models.

A model is described in geodesic polar coordinates by a warping function
f(r). Space forms carry closed-form derivatives up to order 3; custom
profiles may supply their own derivatives or fall back to central
differences (flagged ``low_precision``).
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from django.db import models

from apps.core.conf import numeric_setting
from apps.core.exceptions import DomainError, InvalidParameterError

logger = logging.getLogger(__name__)

Derivative = Callable[[np.ndarray], np.ndarray]

# sin(pi) is 1.2e-16, not 0
VANISHING_TOL = 64.0 * float(np.finfo(float).eps)


class ProfileKind(models.TextChoices):
    EUCLIDEAN = "euclidean", "Euclidean"
    SPHERE = "sphere", "Sphere"
    HYPERBOLIC = "hyperbolic", "Hyperbolic"
    CYLINDER = "cylinder", "Cylinder"
    CUSTOM = "custom", "Custom"


SPACE_FORM_KINDS = (ProfileKind.EUCLIDEAN, ProfileKind.SPHERE, ProfileKind.HYPERBOLIC)


@dataclass(frozen=True)
class Interval:
    """
    An interval of the real line. ``None`` marks an unbounded end; it is
    never replaced by a large float.
    """

    lo: Optional[float] = 0.0
    hi: Optional[float] = None
    closed_lo: bool = True
    closed_hi: bool = False

    def __post_init__(self):
        if self.lo is not None and self.hi is not None and not self.hi > self.lo:
            raise InvalidParameterError(f"Empty interval [{self.lo}, {self.hi}]")

    @property
    def bounded(self) -> bool:
        return self.lo is not None and self.hi is not None

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        ok = np.ones_like(x, dtype=bool)
        if self.lo is not None:
            ok &= (x >= self.lo) if self.closed_lo else (x > self.lo)
        if self.hi is not None:
            ok &= (x <= self.hi) if self.closed_hi else (x < self.hi)
        return ok

    def interior_contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        ok = np.ones_like(x, dtype=bool)
        if self.lo is not None:
            ok &= x > self.lo
        if self.hi is not None:
            ok &= x < self.hi
        return ok

    def describe(self) -> str:
        left = ("[" if self.closed_lo else "(") if self.lo is not None else "("
        right = ("]" if self.closed_hi else ")") if self.hi is not None else ")"
        lo = "-inf" if self.lo is None else format(self.lo, ".17g")
        hi = "inf" if self.hi is None else format(self.hi, ".17g")
        return f"{left}{lo}, {hi}{right}"


@dataclass(frozen=True)
class WarpingProfile:
    kind: str
    derivatives: Tuple[Derivative, Derivative, Derivative, Derivative]
    domain: Interval
    curvature: float = 0.0
    low_precision: bool = False
    taylor: Optional[Tuple[float, float]] = None
    name: str = field(default="")

    def eval(self, r, order: int = 0):
        if order not in (0, 1, 2, 3):
            raise InvalidParameterError(f"Profile derivative order must be 0..3, got {order}")
        value = self.derivatives[order](np.asarray(r, dtype=float))
        return float(value) if np.ndim(value) == 0 else value

    def __call__(self, r):
        return self.eval(r, 0)

    def jet(self, r) -> Tuple:
        return tuple(self.eval(r, k) for k in range(4))

    def vanishes(self, r):
        """True where f is zero up to rounding, measured against r f'(r)."""
        r_arr = np.asarray(r, dtype=float)
        value = np.abs(np.asarray(self.eval(r_arr, 0), dtype=float))
        slope = np.abs(r_arr * np.asarray(self.eval(r_arr, 1), dtype=float))
        return value <= VANISHING_TOL * np.maximum(1.0, slope)

    def require_interior(self, r) -> None:
        """Raise ``DomainError`` unless every r is inside the domain with f(r) != 0."""
        r_arr = np.asarray(r, dtype=float)
        if not np.all(self.domain.contains(r_arr)):
            raise DomainError(f"{self.label} evaluated outside its domain {self.domain.describe()}")
        if np.any(self.vanishes(r_arr)):
            raise DomainError(f"{self.label} vanishes at the requested point")

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == ProfileKind.EUCLIDEAN:
            return "euclidean"
        return f"{self.kind}({self.curvature:g})"

    def taylor_coefficients(self) -> Tuple[float, float, float]:
        """Odd Taylor coefficients (1, c3, c5) of the profile at the pole."""
        if self.taylor is not None:
            return (1.0, self.taylor[0], self.taylor[1])
        third = self.eval(0.0, 3)
        delta = 1e-2
        fifth = (self.eval(delta, 3) - 2.0 * third + self.eval(-delta, 3)) / delta**2
        logger.debug(f"Estimated pole Taylor coefficients for {self.label} numerically")
        return (1.0, third / 6.0, fifth / 120.0)

    def is_odd_at_pole(self, tol: float = 1e-8) -> bool:
        return abs(self.eval(0.0, 2)) <= tol


def _coerce_kind(kind) -> ProfileKind:
    try:
        return ProfileKind(kind)
    except ValueError as exc:
        raise InvalidParameterError(f"Unknown profile kind: {kind!r}") from exc


def make_space_form(kind, curvature: Optional[float] = None) -> WarpingProfile:
    """Euclidean ``r``, sphere ``sin(dr)/d`` on [0, pi/d] or hyperbolic ``sinh(cr)/c``."""
    kind = _coerce_kind(kind)
    if kind == ProfileKind.EUCLIDEAN:
        return WarpingProfile(
            kind=kind,
            derivatives=(
                lambda r: r * 1.0,
                lambda r: np.ones_like(r),
                lambda r: np.zeros_like(r),
                lambda r: np.zeros_like(r),
            ),
            domain=Interval(0.0, None),
            taylor=(0.0, 0.0),
        )
    if kind not in SPACE_FORM_KINDS:
        raise InvalidParameterError(f"{kind} is not a space form")
    if curvature is None or not curvature > 0:
        raise InvalidParameterError(f"Curvature must be positive for {kind}, got {curvature}")

    k = float(curvature)
    if kind == ProfileKind.SPHERE:
        return WarpingProfile(
            kind=kind,
            derivatives=(
                lambda r: np.sin(k * r) / k,
                lambda r: np.cos(k * r),
                lambda r: -k * np.sin(k * r),
                lambda r: -k * k * np.cos(k * r),
            ),
            domain=Interval(0.0, math.pi / k, closed_hi=True),
            curvature=k,
            taylor=(-k * k / 6.0, k**4 / 120.0),
        )
    return WarpingProfile(
        kind=kind,
        derivatives=(
            lambda r: np.sinh(k * r) / k,
            lambda r: np.cosh(k * r),
            lambda r: k * np.sinh(k * r),
            lambda r: k * k * np.cosh(k * r),
        ),
        domain=Interval(0.0, None),
        curvature=k,
        taylor=(k * k / 6.0, k**4 / 120.0),
    )


def make_cylinder_profile() -> WarpingProfile:
    """Constant profile f = 1 on the whole line."""
    return WarpingProfile(
        kind=ProfileKind.CYLINDER,
        derivatives=(
            lambda r: np.ones_like(r),
            lambda r: np.zeros_like(r),
            lambda r: np.zeros_like(r),
            lambda r: np.zeros_like(r),
        ),
        domain=Interval(None, None, closed_lo=False),
        name="cylinder",
    )


def _central_difference(func: Derivative, order: int, step: float) -> Derivative:
    if order == 1:
        return lambda r: (func(r + step) - func(r - step)) / (2.0 * step)
    if order == 2:
        return lambda r: (func(r + step) - 2.0 * func(r) + func(r - step)) / step**2
    return lambda r: (
        func(r + 2.0 * step) - 2.0 * func(r + step) + 2.0 * func(r - step) - func(r - 2.0 * step)
    ) / (2.0 * step**3)


def from_function(
    func: Derivative,
    derivatives: Optional[Sequence[Optional[Derivative]]] = None,
    domain: Optional[Interval] = None,
    name: str = "custom",
    taylor: Optional[Tuple[float, float]] = None,
) -> WarpingProfile:
    """
    Wrap a user function as a custom profile.

    ``derivatives`` lists callables for orders 1..3; missing entries are
    replaced by central differences of the value, with the step growing by
    a decade per order to keep round-off in check.
    """
    supplied = list(derivatives or [])
    supplied += [None] * (3 - len(supplied))
    base_step = numeric_setting("PROFILE_FD_STEP")
    table = [func]
    low_precision = False
    for order, given in enumerate(supplied[:3], start=1):
        if given is None:
            low_precision = True
            given = _central_difference(func, order, base_step * 10 ** (order - 1))
        table.append(given)
    if low_precision:
        logger.info(f"Profile {name} uses finite-difference derivatives (lower precision)")
    return WarpingProfile(
        kind=ProfileKind.CUSTOM,
        derivatives=tuple(table),  # type: ignore[arg-type]
        domain=domain or Interval(0.0, None),
        low_precision=low_precision,
        taylor=taylor,
        name=name,
    )

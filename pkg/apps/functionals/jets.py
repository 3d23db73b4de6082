"""
Jets of profile curves and the RadialMap type.

A RadialMap evaluates alpha(r) (or beta(t) in the logarithmic variable)
together with its derivatives up to order 4. Closed-form maps supply the
derivatives analytically; grid-backed maps use a quintic spline.
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, Sequence, Tuple

import numpy as np
from django.db import models
from scipy.interpolate import make_interp_spline

from apps.core.exceptions import DomainError, InvalidParameterError
from apps.core.grids import GridFunction
from apps.geometry.profiles import Interval, WarpingProfile

MAX_ORDER = 4


class MapVariable(models.TextChoices):
    RADIUS = "r", "radius r"
    LOG_RADIUS = "t", "log radius t = ln r"


@dataclass(frozen=True)
class Jet4:
    """Value and derivatives of orders 1..4 at coordinate ``x``."""

    x: float
    a0: float
    a1: float
    a2: float
    a3: float = 0.0
    a4: float = 0.0

    def __post_init__(self):
        for name in ("x", "a0", "a1", "a2", "a3", "a4"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise InvalidParameterError(f"Jet entry {name} is not finite")

    @property
    def derivatives(self) -> Tuple:
        return (self.a0, self.a1, self.a2, self.a3, self.a4)

    def replace_top(self, a4) -> "Jet4":
        return Jet4(self.x, self.a0, self.a1, self.a2, self.a3, a4)


Evaluator = Callable[[np.ndarray, int], np.ndarray]


@dataclass(frozen=True)
class RadialMap:
    evaluator: Evaluator
    domain: Interval
    pole_regular: bool = True
    variable: str = MapVariable.RADIUS
    label: str = ""
    meta: Dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.pole_regular and self.variable == MapVariable.RADIUS:
            if self.domain.lo == 0.0 and self.domain.closed_lo and abs(float(self.evaluator(np.asarray(0.0), 0))) > 1e-12:
                raise InvalidParameterError(f"Pole-regular map {self.label} has alpha(0) != 0")

    def __call__(self, x, order: int = 0):
        if order < 0 or order > MAX_ORDER:
            raise InvalidParameterError(f"Map derivative order must be 0..4, got {order}")
        x_arr = np.asarray(x, dtype=float)
        if not np.all(self.domain.contains(x_arr)):
            raise DomainError(f"{self.label or 'map'} evaluated outside {self.domain.describe()}")
        value = self.evaluator(x_arr, order)
        return float(value) if np.ndim(value) == 0 else np.asarray(value)

    def jet(self, x) -> Jet4:
        return Jet4(x, *(self(x, k) for k in range(MAX_ORDER + 1)))

    def derivatives(self, x, upto: int = MAX_ORDER) -> Tuple:
        return tuple(self(x, k) for k in range(upto + 1))

    @classmethod
    def from_grid(
        cls,
        grid: GridFunction,
        pole_regular: bool = False,
        variable: str = MapVariable.RADIUS,
        label: str = "",
    ) -> "RadialMap":
        spline = make_interp_spline(grid.nodes, grid.values, k=5)
        pieces = [spline] + [spline.derivative(k) for k in range(1, MAX_ORDER + 1)]

        def evaluate(x, order):
            return pieces[order](x)

        return cls(
            evaluator=evaluate,
            domain=Interval(grid.start, grid.stop, closed_hi=True),
            pole_regular=pole_regular,
            variable=variable,
            label=label or "grid",
            meta={"source": "grid", "nodes": grid.size},
        )


def compose(outer: Sequence, inner: Sequence, upto: int = MAX_ORDER) -> Tuple:
    """
    Derivatives of A(g(x)) up to ``upto`` (<= 4) by Faa di Bruno.
    ``outer`` holds A, A', ... evaluated at g(x); ``inner`` holds g, g', ...
    """
    g1 = inner[1]
    out = [outer[0], outer[1] * g1]
    if upto >= 2:
        g2 = inner[2]
        out.append(outer[2] * g1**2 + outer[1] * g2)
    if upto >= 3:
        g3 = inner[3]
        out.append(outer[3] * g1**3 + 3.0 * outer[2] * g1 * g2 + outer[1] * g3)
    if upto >= 4:
        g4 = inner[4]
        out.append(
            outer[4] * g1**4
            + 6.0 * outer[3] * g1**2 * g2
            + outer[2] * (3.0 * g2**2 + 4.0 * g1 * g3)
            + outer[1] * g4
        )
    return tuple(out[: upto + 1])


def profile_along(profile: WarpingProfile, alpha_derivatives: Sequence, upto: int = 3) -> Tuple:
    """Derivatives of h(alpha(x)) up to order 3 (h is known to order 3)."""
    if upto > 3:
        raise InvalidParameterError("Profiles carry derivatives up to order 3 only")
    outer = [profile.eval(alpha_derivatives[0], k) for k in range(upto + 1)]
    outer += [0.0] * (MAX_ORDER + 1 - len(outer))
    return compose(outer, alpha_derivatives, upto)


def arctan_derivatives(u) -> Tuple:
    s = 1.0 + u * u
    return (
        np.arctan(u),
        1.0 / s,
        -2.0 * u / s**2,
        (6.0 * u * u - 2.0) / s**3,
        24.0 * u * (1.0 - u * u) / s**4,
    )


def artanh_derivatives(u) -> Tuple:
    s = 1.0 - u * u
    return (
        np.arctanh(u),
        1.0 / s,
        2.0 * u / s**2,
        (2.0 + 6.0 * u * u) / s**3,
        24.0 * u * (1.0 + u * u) / s**4,
    )


def linear_inner(x, k: float) -> Tuple:
    return (k * x, k * np.ones_like(x), np.zeros_like(x), np.zeros_like(x), np.zeros_like(x))


def reciprocal_inner(x, k: float) -> Tuple:
    """g = k / x and its derivatives."""
    return (k / x, -k / x**2, 2.0 * k / x**3, -6.0 * k / x**4, 24.0 * k / x**5)

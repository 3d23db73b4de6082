"""
Targets for the equivariant second variation, expressed through
q = h h' and its derivatives in beta.
"""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from django.db import models

from apps.catalog.entries import CaseId, catalog_solution
from apps.core.exceptions import InvalidParameterError, UnsupportedError
from apps.functionals.jets import MapVariable, RadialMap
from apps.functionals.log_variable import to_log_variable
from apps.geometry.profiles import Interval, ProfileKind, WarpingProfile, from_function, make_space_form
from apps.geometry.specs import MapSpec


class StabilityKind(models.TextChoices):
    SPHERE = "sphere", "Sphere(d)"
    HYPERBOLIC = "hyperbolic", "Hyperbolic(d)"
    EUCLIDEAN = "euclidean", "Euclidean"
    FLAT = "flat", "Flat toy, q = 0"
    CUSTOM = "custom", "Custom target"


def sphere_zeroth_term(y):
    """24 cos(y) sin(y)^2 (1 - cos(y)), nonnegative on (0, pi/2]."""
    return 24.0 * np.cos(y) * np.sin(y) ** 2 * (1.0 - np.cos(y))


def hyperbolic_zeroth_term(x):
    """24 cosh(x) sinh(x)^2 (cosh(x) - 1), nonnegative everywhere."""
    return 24.0 * np.cosh(x) * np.sinh(x) ** 2 * (np.cosh(x) - 1.0)


def _flat_profile() -> WarpingProfile:
    zero: Callable = np.zeros_like
    return from_function(zero, derivatives=[zero, zero, zero], domain=Interval(None, None, closed_lo=False), name="flat")


@dataclass(frozen=True)
class StabilityCase:
    kind: str
    h: WarpingProfile
    d: float = 1.0

    def h0(self, beta):
        return np.asarray(self.h.eval(beta, 0), dtype=float)

    def h1(self, beta):
        return np.asarray(self.h.eval(beta, 1), dtype=float)

    def q(self, beta):
        return self.h0(beta) * self.h1(beta)

    def q1(self, beta):
        return self.h1(beta) ** 2 + self.h0(beta) * np.asarray(self.h.eval(beta, 2), dtype=float)

    def q2(self, beta):
        h2 = np.asarray(self.h.eval(beta, 2), dtype=float)
        return 3.0 * self.h1(beta) * h2 + self.h0(beta) * np.asarray(self.h.eval(beta, 3), dtype=float)

    def conformal_zeroth(self, beta):
        """6 q'' h (h' - 1): the zeroth-order coefficient once beta' = h(beta)."""
        return 6.0 * self.q2(beta) * self.h0(beta) * (self.h1(beta) - 1.0)

    @property
    def has_closed_form(self) -> bool:
        return self.kind in (StabilityKind.SPHERE, StabilityKind.HYPERBOLIC)

    def closed_zeroth(self, beta):
        if self.kind == StabilityKind.SPHERE:
            return sphere_zeroth_term(self.d * np.asarray(beta, dtype=float))
        if self.kind == StabilityKind.HYPERBOLIC:
            return hyperbolic_zeroth_term(self.d * np.asarray(beta, dtype=float))
        raise UnsupportedError(f"No closed-form zeroth-order term for the {self.kind} case")

    @property
    def label(self) -> str:
        if self.kind in (StabilityKind.SPHERE, StabilityKind.HYPERBOLIC):
            return f"{self.kind}(d={self.d:g})"
        return str(self.kind)


def stability_case(kind, d: float = 1.0) -> StabilityCase:
    try:
        kind = StabilityKind(kind)
    except ValueError as exc:
        raise InvalidParameterError(f"Unknown stability case: {kind!r}") from exc
    if kind == StabilityKind.SPHERE:
        return StabilityCase(kind, make_space_form(ProfileKind.SPHERE, d), d)
    if kind == StabilityKind.HYPERBOLIC:
        return StabilityCase(kind, make_space_form(ProfileKind.HYPERBOLIC, d), d)
    if kind == StabilityKind.EUCLIDEAN:
        return StabilityCase(kind, make_space_form(ProfileKind.EUCLIDEAN))
    if kind == StabilityKind.FLAT:
        return StabilityCase(kind, _flat_profile())
    raise InvalidParameterError("Custom stability cases are built from a MapSpec")


def case_from_spec(spec: MapSpec) -> StabilityCase:
    kind = spec.h.kind
    if kind in (ProfileKind.SPHERE, ProfileKind.HYPERBOLIC):
        return stability_case(kind, spec.h.curvature)
    if kind == ProfileKind.EUCLIDEAN:
        return stability_case(StabilityKind.EUCLIDEAN)
    return StabilityCase(StabilityKind.CUSTOM, spec.h)


def coerce_case(case) -> StabilityCase:
    if isinstance(case, StabilityCase):
        return case
    if isinstance(case, MapSpec):
        return case_from_spec(case)
    return stability_case(case)


# conformal solution in t whose stability each case certifies
_WITNESS = {
    StabilityKind.SPHERE: CaseId.C1B,
    StabilityKind.HYPERBOLIC: CaseId.C1C,
    StabilityKind.EUCLIDEAN: CaseId.C1A,
}


def _zero_map() -> RadialMap:
    return RadialMap(
        evaluator=lambda t, order: np.zeros_like(t),
        domain=Interval(None, None, closed_lo=False),
        pole_regular=False,
        variable=MapVariable.LOG_RADIUS,
        label="zero",
    )


def catalog_beta(case: StabilityCase, c: float = 1.0, case_id: Optional[str] = None) -> RadialMap:
    """
    Log-variable form of the catalog solution for ``case``. ``case_id``
    picks another Euclidean-domain entry (an inversion) with the same target.
    """
    if case.kind == StabilityKind.FLAT:
        return _zero_map()
    chosen = CaseId(case_id) if case_id else _WITNESS.get(case.kind)
    if chosen is None:
        raise UnsupportedError(f"No catalog solution for the {case.kind} case")
    entry = catalog_solution(chosen, c=c, d=case.d)
    if entry.map is None or entry.spec.f.kind != ProfileKind.EUCLIDEAN:
        raise UnsupportedError(f"{chosen} has no map out of Euclidean space")
    if entry.spec.h.kind != case.h.kind:
        raise InvalidParameterError(f"{chosen} maps into {entry.spec.h.label}, not the {case.kind} target")
    return to_log_variable(entry.map, entry.spec.f)

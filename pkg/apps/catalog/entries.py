"""
Closed-form rotationally symmetric solutions between space forms, the
pole-singular conformal inversions, the constant cylinder solutions and
the pairs that admit no conformal biharmonic map.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from django.db import models

from apps.core.conf import numeric_setting
from apps.core.exceptions import InvalidParameterError
from apps.functionals.jets import (
    RadialMap,
    arctan_derivatives,
    artanh_derivatives,
    compose,
    linear_inner,
    reciprocal_inner,
)
from apps.geometry.profiles import Interval, ProfileKind, make_space_form
from apps.geometry.specs import MapSpec, cylinder_spec

logger = logging.getLogger(__name__)

CATALOG_HEADER = ("case_id", "c", "d", "lambda", "nature", "domain")


class CaseId(models.TextChoices):
    C1A = "C1A"
    C1B = "C1B"
    C1C = "C1C"
    C2B = "C2B"
    C3C = "C3C"
    INV1A = "Inv1A"
    INV1B = "Inv1B"
    INV1C = "Inv1C"
    CYL_QUARTER_PI = "CylQuarterPi"
    CYL_THREE_QUARTER_PI = "CylThreeQuarterPi"
    NX2A = "NX2A"
    NX2C = "NX2C"
    NX3A = "NX3A"
    NX3B = "NX3B"


class Nature(models.TextChoices):
    HARMONIC = "Harmonic"
    PROPER_BIHARMONIC = "ProperBiharmonic"
    NONEXISTENCE_IDENTITY = "NonexistenceIdentity"


IDENTITY_CASES = (CaseId.NX2A, CaseId.NX2C, CaseId.NX3A, CaseId.NX3B)
INVERSION_CASES = (CaseId.INV1A, CaseId.INV1B, CaseId.INV1C)
CYLINDER_CASES = (CaseId.CYL_QUARTER_PI, CaseId.CYL_THREE_QUARTER_PI)
REGULAR_CASES = (CaseId.C1A, CaseId.C1B, CaseId.C1C, CaseId.C2B, CaseId.C3C)

# (domain kind, target kind) of every conformal case
CASE_PAIRS = {
    CaseId.C1A: (ProfileKind.EUCLIDEAN, ProfileKind.EUCLIDEAN),
    CaseId.C1B: (ProfileKind.EUCLIDEAN, ProfileKind.SPHERE),
    CaseId.C1C: (ProfileKind.EUCLIDEAN, ProfileKind.HYPERBOLIC),
    CaseId.C2B: (ProfileKind.SPHERE, ProfileKind.SPHERE),
    CaseId.C3C: (ProfileKind.HYPERBOLIC, ProfileKind.HYPERBOLIC),
    CaseId.INV1A: (ProfileKind.EUCLIDEAN, ProfileKind.EUCLIDEAN),
    CaseId.INV1B: (ProfileKind.EUCLIDEAN, ProfileKind.SPHERE),
    CaseId.INV1C: (ProfileKind.EUCLIDEAN, ProfileKind.HYPERBOLIC),
    CaseId.NX2A: (ProfileKind.SPHERE, ProfileKind.EUCLIDEAN),
    CaseId.NX2C: (ProfileKind.SPHERE, ProfileKind.HYPERBOLIC),
    CaseId.NX3A: (ProfileKind.HYPERBOLIC, ProfileKind.EUCLIDEAN),
    CaseId.NX3B: (ProfileKind.HYPERBOLIC, ProfileKind.SPHERE),
}


@dataclass(frozen=True)
class CatalogEntry:
    case_id: str
    params: Dict[str, float]
    nature: str
    spec: MapSpec
    map: Optional[RadialMap] = None
    domain_note: str = ""
    pole_slope: Optional[float] = None
    conformal_sign: Optional[int] = None
    meta: Dict = field(default_factory=dict, compare=False)

    def as_row(self) -> Dict:
        return {
            "case_id": self.case_id,
            "c": self.params.get("c"),
            "d": self.params.get("d"),
            "lambda": self.params.get("lambda"),
            "nature": self.nature,
            "domain": self.domain_note,
        }


def _coerce_case(case_id) -> CaseId:
    try:
        return CaseId(case_id)
    except ValueError as exc:
        raise InvalidParameterError(f"Unknown catalog case: {case_id!r}") from exc


def _positive(name: str, value: float) -> float:
    if value is None or not value > 0:
        raise InvalidParameterError(f"Parameter {name} must be positive, got {value}")
    return float(value)


def _profile(kind, curvature):
    return make_space_form(kind, None if kind == ProfileKind.EUCLIDEAN else curvature)


def _pair_spec(case: CaseId, c: float, d: float, m: int = 4) -> MapSpec:
    domain_kind, target_kind = CASE_PAIRS[case]
    return MapSpec(m=m, f=_profile(domain_kind, c), h=_profile(target_kind, d))


def _composite_map(outer_derivatives, inner, scale, domain, pole_regular, label):
    """alpha = scale * A(g(x)) with A known through ``outer_derivatives``."""

    def evaluate(x, order):
        inner_values = inner(x)
        outer = outer_derivatives(inner_values[0])
        return scale * compose(outer, inner_values, upto=order)[order]

    return RadialMap(evaluator=evaluate, domain=domain, pole_regular=pole_regular, label=label)


def _linear_map(slope: float, domain: Interval, label: str) -> RadialMap:
    def evaluate(x, order):
        if order == 0:
            return slope * x
        if order == 1:
            return slope * np.ones_like(x)
        return np.zeros_like(x)

    return RadialMap(evaluator=evaluate, domain=domain, label=label)


def _constant_map(value: float, label: str) -> RadialMap:
    def evaluate(x, order):
        return value * np.ones_like(x) if order == 0 else np.zeros_like(x)

    return RadialMap(
        evaluator=evaluate, domain=Interval(None, None, closed_lo=False), pole_regular=False, label=label
    )


def catalog_solution(case_id, c: float = 1.0, d: float = 1.0, lam: float = 3.0, m: int = 4) -> CatalogEntry:
    case = _coerce_case(case_id)
    c = _positive("c", c)
    d = _positive("d", d)
    k = c * c
    params = {"c": c, "d": d}

    if case in CYLINDER_CASES:
        lam = _positive("lambda", lam)
        level = math.pi / 4 if case == CaseId.CYL_QUARTER_PI else 3 * math.pi / 4
        return CatalogEntry(
            case_id=case.value,
            params={"lambda": lam},
            nature=Nature.PROPER_BIHARMONIC,
            spec=cylinder_spec(lam, make_space_form(ProfileKind.SPHERE, 1.0), m=m),
            map=_constant_map(level, case.value),
            domain_note="(-inf, inf)",
        )

    spec = _pair_spec(case, c, d, m)
    if case in IDENTITY_CASES:
        return CatalogEntry(
            case_id=case.value,
            params=params,
            nature=Nature.NONEXISTENCE_IDENTITY,
            spec=spec,
            domain_note="identity in (r, alpha)",
        )

    if case == CaseId.C1A:
        radial_map = _linear_map(c, Interval(0.0, None), case.value)
        return CatalogEntry(case.value, params, Nature.HARMONIC, spec, radial_map, "[0, inf)", c, 1)
    if case in (CaseId.C2B, CaseId.C3C):
        hi = math.pi / c if case == CaseId.C2B else None
        domain = Interval(0.0, hi, closed_hi=hi is not None)
        radial_map = _linear_map(c / d, domain, case.value)
        return CatalogEntry(case.value, params, Nature.HARMONIC, spec, radial_map, domain.describe(), c / d, 1)
    if case == CaseId.C1B:
        radial_map = _composite_map(
            arctan_derivatives, lambda x: linear_inner(x, k), 2.0 / d, Interval(0.0, None), True, case.value
        )
        return CatalogEntry(case.value, params, Nature.PROPER_BIHARMONIC, spec, radial_map, "[0, inf)", 2 * k / d, 1)
    if case == CaseId.C1C:
        domain = Interval(0.0, 1.0 / k)
        radial_map = _composite_map(
            artanh_derivatives, lambda x: linear_inner(x, k), 2.0 / d, domain, True, case.value
        )
        return CatalogEntry(
            case.value, params, Nature.PROPER_BIHARMONIC, spec, radial_map, domain.describe(), 2 * k / d, 1
        )
    if case == CaseId.INV1A:
        domain = Interval(0.0, None, closed_lo=False)
        radial_map = _composite_map(
            lambda u: (u, np.ones_like(u), np.zeros_like(u), np.zeros_like(u), np.zeros_like(u)),
            lambda x: reciprocal_inner(x, c),
            1.0,
            domain,
            False,
            case.value,
        )
        return CatalogEntry(case.value, params, Nature.PROPER_BIHARMONIC, spec, radial_map, "(0, inf)", None, -1)
    if case == CaseId.INV1B:
        domain = Interval(0.0, None, closed_lo=False)
        radial_map = _composite_map(
            arctan_derivatives, lambda x: reciprocal_inner(x, k), 2.0 / d, domain, False, case.value
        )
        return CatalogEntry(case.value, params, Nature.PROPER_BIHARMONIC, spec, radial_map, "(0, inf)", None, -1)

    domain = Interval(k, None, closed_lo=False)
    radial_map = _composite_map(
        artanh_derivatives, lambda x: reciprocal_inner(x, k), 2.0 / d, domain, False, case.value
    )
    return CatalogEntry(
        case.value, params, Nature.PROPER_BIHARMONIC, spec, radial_map, domain.describe(), None, -1
    )


def verification_points(entry: CatalogEntry, points: int = 200, margin: Optional[float] = None) -> np.ndarray:
    """
    Sample points inside the entry's domain, log-spaced where the domain
    starts at the pole. Domains that end at a blow-up stop at 90% of the
    way there, where the jets are still of moderate size.
    """
    margin = numeric_setting("ENDPOINT_MARGIN") if margin is None else margin
    case = _coerce_case(entry.case_id)
    c = entry.params.get("c", 1.0)
    k = c * c
    if case in CYLINDER_CASES:
        return np.linspace(-10.0, 10.0, points)
    if case == CaseId.C1C:
        return np.geomspace(margin, 0.9 / k, points)
    if case == CaseId.C2B:
        return np.geomspace(margin, math.pi / c - margin, points)
    if case == CaseId.C3C:
        return np.geomspace(margin, 3.0 / c, points)
    if case == CaseId.INV1C:
        return np.geomspace(k / 0.9, 100.0 * k, points)
    if case in INVERSION_CASES:
        return np.geomspace(1e-2, 1e2, points)
    return np.geomspace(margin, 1.0 / margin, points)


def export_catalog(entries: List[CatalogEntry]) -> List[Dict]:
    return [entry.as_row() for entry in entries]


def full_catalog(c: float = 1.0, d: float = 1.0, lam: float = 3.0) -> List[CatalogEntry]:
    return [catalog_solution(case, c=c, d=d, lam=lam) for case in CaseId]

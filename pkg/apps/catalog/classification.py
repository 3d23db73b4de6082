from dataclasses import dataclass
from typing import Optional

from django.db import models

from apps.catalog.entries import CaseId
from apps.core.exceptions import InvalidParameterError
from apps.geometry.profiles import SPACE_FORM_KINDS, ProfileKind


class ClassificationKind(models.TextChoices):
    HARMONIC_ONLY = "HarmonicOnly"
    PROPER_FAMILY = "ProperBiharmonicFamily"
    NO_SOLUTION = "NoSolution"


@dataclass(frozen=True)
class ClassificationResult:
    kind: str
    witness: Optional[str] = None
    identity: Optional[str] = None

    def __str__(self) -> str:
        return f"{self.kind} {self.witness or self.identity}"


_TABLE = {
    (ProfileKind.EUCLIDEAN, ProfileKind.EUCLIDEAN): (ClassificationKind.HARMONIC_ONLY, CaseId.C1A),
    (ProfileKind.EUCLIDEAN, ProfileKind.SPHERE): (ClassificationKind.PROPER_FAMILY, CaseId.C1B),
    (ProfileKind.EUCLIDEAN, ProfileKind.HYPERBOLIC): (ClassificationKind.PROPER_FAMILY, CaseId.C1C),
    (ProfileKind.SPHERE, ProfileKind.EUCLIDEAN): (ClassificationKind.NO_SOLUTION, CaseId.NX2A),
    (ProfileKind.SPHERE, ProfileKind.SPHERE): (ClassificationKind.HARMONIC_ONLY, CaseId.C2B),
    (ProfileKind.SPHERE, ProfileKind.HYPERBOLIC): (ClassificationKind.NO_SOLUTION, CaseId.NX2C),
    (ProfileKind.HYPERBOLIC, ProfileKind.EUCLIDEAN): (ClassificationKind.NO_SOLUTION, CaseId.NX3A),
    (ProfileKind.HYPERBOLIC, ProfileKind.SPHERE): (ClassificationKind.NO_SOLUTION, CaseId.NX3B),
    (ProfileKind.HYPERBOLIC, ProfileKind.HYPERBOLIC): (ClassificationKind.HARMONIC_ONLY, CaseId.C3C),
}


def classify_constant_curvature(domain_kind, target_kind) -> ClassificationResult:
    """Conformal rotationally symmetric biharmonic maps between 4-dimensional space forms."""
    try:
        key = (ProfileKind(domain_kind), ProfileKind(target_kind))
    except ValueError as exc:
        raise InvalidParameterError(f"Unknown model kind in ({domain_kind}, {target_kind})") from exc
    if key[0] not in SPACE_FORM_KINDS or key[1] not in SPACE_FORM_KINDS:
        raise InvalidParameterError("Classification covers Euclidean, sphere and hyperbolic models")

    kind, case = _TABLE[key]
    if kind == ClassificationKind.NO_SOLUTION:
        return ClassificationResult(kind=kind.value, identity=case.value)
    return ClassificationResult(kind=kind.value, witness=case.value)

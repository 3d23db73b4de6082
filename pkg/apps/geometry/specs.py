from dataclasses import dataclass
from typing import Optional

from apps.core.exceptions import InvalidParameterError
from apps.geometry.profiles import ProfileKind, WarpingProfile, make_cylinder_profile


@dataclass(frozen=True)
class MapSpec:
    """
    Domain profile ``f``, target profile ``h`` and dimension ``m`` of the
    rotationally symmetric maps under study. ``lam`` weights the angular
    term of the tension and defaults to m - 1.
    """

    m: int
    f: WarpingProfile
    h: WarpingProfile
    lam: Optional[float] = None

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 3:
            raise InvalidParameterError(f"Dimension m must be an integer >= 3, got {self.m}")
        if self.lam is not None and not self.lam > 0:
            raise InvalidParameterError(f"Eigenvalue lambda must be positive, got {self.lam}")

    @property
    def angular_weight(self) -> float:
        return float(self.m - 1) if self.lam is None else float(self.lam)

    @property
    def is_cylinder(self) -> bool:
        return self.f.kind == ProfileKind.CYLINDER

    def describe(self) -> str:
        return f"m={self.m} f={self.f.label} h={self.h.label} lambda={self.angular_weight:g}"


def cylinder_spec(lam: float, h: WarpingProfile, m: int = 4) -> MapSpec:
    return MapSpec(m=m, f=make_cylinder_profile(), h=h, lam=lam)

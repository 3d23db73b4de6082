"""
Checks of the model axioms: pole conditions, positivity, antipodal
conditions for closed domains and derivative consistency.
Violations are reported, never raised.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from apps.core.conf import numeric_setting
from apps.core.exceptions import InvalidParameterError
from apps.geometry.profiles import WarpingProfile

logger = logging.getLogger(__name__)

POLE_TOL = 1e-10
CONSISTENCY_TOL = 1e-6
LOW_PRECISION_TOL = 1e-4


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    worst: float
    detail: str = ""


@dataclass
class ValidationReport:
    profile: str
    checks: List[ValidationCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[ValidationCheck]:
        return [check for check in self.checks if not check.passed]

    def check(self, name: str) -> ValidationCheck:
        for item in self.checks:
            if item.name == name:
                return item
        raise KeyError(name)

    def as_rows(self) -> List[Dict]:
        return [
            {"check": c.name, "passed": c.passed, "worst": c.worst, "detail": c.detail}
            for c in self.checks
        ]


def _sample_points(profile: WarpingProfile, sample_count: int, sample_span: float) -> np.ndarray:
    lo = 0.0 if profile.domain.lo is None else profile.domain.lo
    hi = profile.domain.hi if profile.domain.hi is not None else lo + sample_span
    return np.linspace(lo, hi, sample_count + 2)[1:-1]


def validate_profile(
    profile: WarpingProfile, sample_count: int = 64, sample_span: float = 10.0
) -> ValidationReport:
    if sample_count < 8:
        raise InvalidParameterError(f"sample_count must be >= 8, got {sample_count}")

    report = ValidationReport(profile=profile.label)
    tol = LOW_PRECISION_TOL if profile.low_precision else POLE_TOL

    value0 = abs(float(profile.eval(0.0, 0)))
    slope0 = abs(float(profile.eval(0.0, 1)) - 1.0)
    report.checks.append(ValidationCheck("pole_value", value0 <= tol, value0, "f(0) = 0"))
    report.checks.append(ValidationCheck("pole_slope", slope0 <= tol, slope0, "f'(0) = 1"))

    samples = _sample_points(profile, sample_count, sample_span)
    values = np.asarray(profile.eval(samples, 0))
    min_value = float(np.min(values))
    report.checks.append(
        ValidationCheck(
            "interior_positive",
            min_value > 0.0,
            max(0.0, -min_value),
            f"min f on interior samples = {min_value:.3e}",
        )
    )

    if profile.domain.hi is not None and profile.domain.closed_hi:
        b = profile.domain.hi
        end_value = abs(float(profile.eval(b, 0)))
        end_slope = abs(float(profile.eval(b, 1)) + 1.0)
        report.checks.append(ValidationCheck("end_value", end_value <= tol, end_value, "f(b) = 0"))
        report.checks.append(ValidationCheck("end_slope", end_slope <= tol, end_slope, "f'(b) = -1"))

    step = numeric_setting("PROFILE_CHECK_STEP")
    consistency_tol = LOW_PRECISION_TOL if profile.low_precision else CONSISTENCY_TOL
    inner = samples[profile.domain.interior_contains(samples - step) & profile.domain.interior_contains(samples + step)]
    for order in (0, 1, 2):
        if inner.size == 0:
            break
        forward = np.asarray(profile.eval(inner + step, order))
        backward = np.asarray(profile.eval(inner - step, order))
        difference = (forward - backward) / (2.0 * step)
        exact = np.asarray(profile.eval(inner, order + 1))
        scale = np.maximum(1.0, np.abs(exact))
        worst = float(np.max(np.abs(difference - exact) / scale))
        report.checks.append(
            ValidationCheck(
                f"derivative_consistency_{order}",
                worst <= consistency_tol,
                worst,
                f"central difference of order {order} vs order {order + 1}",
            )
        )

    if not report.passed:
        names = ", ".join(c.name for c in report.failures())
        logger.warning(f"Profile {profile.label} failed checks: {names}")
    return report

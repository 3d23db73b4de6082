"""
Numeric defaults.

Values come from ``settings.NUMERICS`` when Django is configured; the
library falls back to the built-in table so it can be imported and used
from plain scripts as well.
"""
from typing import Any, Dict

from django.conf import settings

DEFAULT_NUMERICS: Dict[str, Any] = {
    "QUADRATURE_RTOL": 1e-8,
    "LAGRANGIAN_PARTIAL_STEP": 1e-6,
    "TRAJECTORY_TOTAL_STEP": 1e-4,
    "POLE_EPS": 1e-3,
    "DIVERGENCE_THRESHOLD": 1e12,
    "NEWTON_DAMPING": 0.5,
    "NEWTON_MAX_ITER": 50,
    "NEWTON_TOL": 1e-9,
    "JACOBIAN_STEP": 1e-6,
    "ODE_RTOL": 1e-10,
    "ODE_ATOL": 1e-12,
    "STABILITY_TOL_POS": 1e-8,
    "ENDPOINT_MARGIN": 1e-3,
    "PROFILE_FD_STEP": 1e-5,
    "PROFILE_CHECK_STEP": 1e-4,
}


def numeric_setting(name: str) -> Any:
    if name not in DEFAULT_NUMERICS:
        raise KeyError(f"Unknown numeric setting: {name}")
    if settings.configured:
        overrides = getattr(settings, "NUMERICS", {}) or {}
        return overrides.get(name, DEFAULT_NUMERICS[name])
    return DEFAULT_NUMERICS[name]

"""
Closed forms of the normalized conformal residual for the four space-form
pairs (m = 4) where it never vanishes identically.
"""
import numpy as np

from apps.catalog.entries import IDENTITY_CASES, CaseId
from apps.core.exceptions import InvalidParameterError


def nonexistence_identity(identity_id, c: float, d: float, r, alpha):
    try:
        case = CaseId(identity_id)
    except ValueError as exc:
        raise InvalidParameterError(f"Unknown identity: {identity_id!r}") from exc
    if case not in IDENTITY_CASES:
        raise InvalidParameterError(f"{identity_id} is not a nonexistence identity")

    r = np.asarray(r, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    if case == CaseId.NX2A:
        value = -8.0 * np.sin(c * r / 2.0) ** 2 * np.sin(c * r) ** 2 + 0.0 * alpha
    elif case == CaseId.NX2C:
        value = 4.0 * np.sin(c * r) ** 2 * (np.cos(c * r) - np.cosh(d * alpha))
    elif case == CaseId.NX3A:
        value = -8.0 * np.sinh(c * r / 2.0) ** 2 * np.sinh(c * r) ** 2 + 0.0 * alpha
    else:
        value = 4.0 * np.sinh(c * r) ** 2 * (np.cos(d * alpha) - np.cosh(c * r))
    return float(value) if np.ndim(value) == 0 else value

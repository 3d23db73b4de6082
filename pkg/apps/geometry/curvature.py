import numpy as np

from apps.core.exceptions import UnsupportedError
from apps.geometry.profiles import ProfileKind, WarpingProfile


def radial_curvature(profile: WarpingProfile, r):
    """K(r) = -f''(r) / f(r) from the Jacobi equation."""
    profile.require_interior(r)
    value = -np.asarray(profile.eval(r, 2)) / np.asarray(profile.eval(r, 0))
    return float(value) if np.ndim(value) == 0 else value


def constant_curvature(profile: WarpingProfile) -> float:
    if profile.kind == ProfileKind.EUCLIDEAN:
        return 0.0
    if profile.kind == ProfileKind.SPHERE:
        return profile.curvature**2
    if profile.kind == ProfileKind.HYPERBOLIC:
        return -profile.curvature**2
    raise UnsupportedError(f"{profile.label} has no constant curvature")


def jacobi_residual(profile: WarpingProfile, r, curvature=None):
    """f'' + K f; with K omitted the space-form constant is used."""
    if curvature is None:
        curvature = constant_curvature(profile)
    value = np.asarray(profile.eval(r, 2)) + curvature * np.asarray(profile.eval(r, 0))
    return float(value) if np.ndim(value) == 0 else value

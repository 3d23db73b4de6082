"""
Dirichlet problems on a ball of radius b, solved by shooting on the two
free pole coefficients (a1, a3).
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from django.db import models
from scipy.integrate import quad

from apps.core.conf import numeric_setting
from apps.core.exceptions import (
    DomainError,
    InvalidParameterError,
    NoConvergenceError,
    NumericalFailure,
)
from apps.geometry.profiles import WarpingProfile
from apps.geometry.specs import MapSpec
from apps.solvers.integration import Trajectory, integrate_ode
from apps.solvers.series import PoleSeed, check_series_start, conformal_cubic_coefficient, pole_series

logger = logging.getLogger(__name__)

# a1 * eps stays below this so the series truncation term is negligible
SLOPE_OFFSET_CAP = 8e-3
MAX_HALVINGS = 30


class ShootingMode(models.TextChoices):
    CLAMPED = "clamped", "alpha and alpha' prescribed at b"
    CONFORMAL = "conformal", "alpha prescribed, slope from the conformal family"


@dataclass(frozen=True)
class BoundaryTarget:
    alpha_b: float
    dalpha_b: Optional[float] = None

    def __post_init__(self):
        if not np.isfinite(self.alpha_b):
            raise InvalidParameterError(f"Boundary value must be finite, got {self.alpha_b}")
        if self.dalpha_b is not None and not np.isfinite(self.dalpha_b):
            raise InvalidParameterError(f"Boundary slope must be finite, got {self.dalpha_b}")


def conformal_family_target(spec: MapSpec, b: float, alpha_b: float) -> float:
    """Slope at b of the conformal map alpha' = h(alpha)/f(r) through (b, alpha_b)."""
    spec.f.require_interior(b)
    return float(spec.h.eval(alpha_b, 0) / spec.f.eval(b, 0))


def _log_potential(profile: WarpingProfile, x: float) -> float:
    """ln x + integral over (0, x) of 1/g(s) - 1/s."""
    tail, _ = quad(lambda s: 1.0 / profile.eval(s, 0) - 1.0 / s, 0.0, x, limit=200)
    return math.log(x) + tail


def conformal_seed(spec: MapSpec, b: float, alpha_b: float, eps: Optional[float] = None) -> PoleSeed:
    """
    Pole coefficients of the conformal solution reaching alpha_b at r = b,
    from integral(dalpha / h) = integral(dr / f).
    """
    spec.f.require_interior(b)
    if alpha_b == 0.0:
        return PoleSeed(0.0, 0.0, eps)
    if alpha_b < 0.0:
        mirrored = conformal_seed(spec, b, -alpha_b, eps)
        return PoleSeed(-mirrored.a1, -mirrored.a3, mirrored.eps)
    if not spec.h.eval(alpha_b, 0) > 0.0:
        raise DomainError(f"alpha_b={alpha_b} is outside the region where {spec.h.label} is positive")
    a1 = math.exp(_log_potential(spec.h, alpha_b) - _log_potential(spec.f, b))
    return PoleSeed(a1, conformal_cubic_coefficient(spec, a1), eps)


def _boundary_defect(spec: MapSpec, seed: PoleSeed, b: float, target: Tuple[float, float]):
    trajectory = integrate_ode(spec, pole_series(spec, seed), b)
    end = trajectory.end
    return np.array([end[0] - target[0], end[1] - target[1]]), trajectory


def _jacobian(spec, seed, b, target, base_defect) -> np.ndarray:
    rel_step = numeric_setting("JACOBIAN_STEP")
    x = seed.as_vector()
    jacobian = np.empty((2, 2))
    for j in range(2):
        step = rel_step * max(abs(x[j]), 1.0)
        shifted = x.copy()
        shifted[j] += step
        defect, _ = _boundary_defect(spec, seed.with_coefficients(*shifted), b, target)
        jacobian[:, j] = (defect - base_defect) / step
    return jacobian


def shoot_dirichlet(
    spec: MapSpec,
    b: float,
    target: BoundaryTarget,
    guess: Optional[PoleSeed] = None,
    mode: str = ShootingMode.CLAMPED,
) -> Tuple[PoleSeed, Trajectory]:
    """
    Damped Newton on (a1, a3) -> (alpha(b) - alpha_b, alpha'(b) - dalpha_b).

    A trial step whose integration diverges, or which does not reduce the
    defect, is halved until it does.
    """
    spec.f.require_interior(b)
    mode = ShootingMode(mode)
    if mode == ShootingMode.CONFORMAL:
        target = BoundaryTarget(target.alpha_b, conformal_family_target(spec, b, target.alpha_b))
    elif target.dalpha_b is None:
        raise InvalidParameterError("Clamped shooting needs the boundary slope dalpha_b")
    goal = (float(target.alpha_b), float(target.dalpha_b))

    if guess is None:
        guess = conformal_seed(spec, b, target.alpha_b)
    if guess.a1 != 0.0:
        guess = guess.with_eps(min(guess.eps, SLOPE_OFFSET_CAP / abs(guess.a1)))

    damping = numeric_setting("NEWTON_DAMPING")
    max_iter = int(numeric_setting("NEWTON_MAX_ITER"))
    tol = numeric_setting("NEWTON_TOL")

    seed = guess
    defect, trajectory = _boundary_defect(spec, seed, b, goal)
    norm = float(np.linalg.norm(defect))
    logger.info(f"Shooting {spec.describe()} to b={b:g} ({mode}): initial defect {norm:.3e}")

    for iteration in range(1, max_iter + 1):
        if norm < tol:
            break
        jacobian = _jacobian(spec, seed, b, goal, defect)
        try:
            update = -np.linalg.solve(jacobian, defect)
        except np.linalg.LinAlgError:
            update = -np.linalg.lstsq(jacobian, defect, rcond=None)[0]

        scale = 1.0
        for _ in range(MAX_HALVINGS):
            trial = seed.with_coefficients(*(seed.as_vector() + scale * update))
            try:
                trial_defect, trial_trajectory = _boundary_defect(spec, trial, b, goal)
            except NumericalFailure as exc:
                logger.warning(f"Newton trial {trial} rejected: {exc}")
                scale *= damping
                continue
            trial_norm = float(np.linalg.norm(trial_defect))
            if trial_norm < norm:
                break
            scale *= damping
        else:
            raise NoConvergenceError(
                f"Newton stagnated after {iteration} iterations with defect {norm:.3e}",
                best_residual=norm,
                best_seed=seed,
            )

        seed, defect, trajectory, norm = trial, trial_defect, trial_trajectory, trial_norm
        logger.debug(f"Newton iteration {iteration}: a1={seed.a1:.17g} a3={seed.a3:.17g} defect={norm:.3e}")
    else:
        if norm >= tol:
            raise NoConvergenceError(
                f"Newton did not converge in {max_iter} iterations (defect {norm:.3e})",
                best_residual=norm,
                best_seed=seed,
            )

    trajectory.meta["newton_defect"] = norm
    trajectory.meta["seed"] = (seed.a1, seed.a3, seed.eps)
    trajectory.meta["series_defect"] = check_series_start(spec, seed).at_eps
    logger.info(f"Shooting converged: a1={seed.a1:.12g}, a3={seed.a3:.12g}, defect {norm:.3e}")
    return seed, trajectory

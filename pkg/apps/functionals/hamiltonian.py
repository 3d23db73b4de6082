"""
Second-order Lagrangians L(t, b, b', b'') and their Hamiltonian

    H = b' (dL/db' - d/dt dL/db'') + b'' dL/db'' - L,

which is constant along solutions of autonomous problems.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from apps.core.conf import numeric_setting
from apps.core.exceptions import DomainError
from apps.functionals.jets import MapVariable, RadialMap
from apps.geometry.curvature import radial_curvature
from apps.geometry.profiles import WarpingProfile

logger = logging.getLogger(__name__)

LagrangianFunc = Callable[[float, float, float, float], float]
RateFunc = Callable[[float, float, float, float, float], float]


@dataclass(frozen=True)
class Lagrangian:
    """
    ``func(t, b, b1, b2)``. Built-in Lagrangians also carry their momenta
    dL/db1, dL/db2 and the rate ``d/dt dL/db2`` as a function of
    (t, b, b1, b2, b3); user Lagrangians fall back to central differences.
    ``variable`` is the coordinate the Lagrangian is written in.
    """

    func: LagrangianFunc
    autonomous: bool = True
    momentum_1: Optional[LagrangianFunc] = None
    momentum_2: Optional[LagrangianFunc] = None
    momentum_2_rate: Optional[RateFunc] = None
    name: str = "custom"
    variable: str = MapVariable.LOG_RADIUS

    def __call__(self, t, b, b1, b2):
        return self.func(t, b, b1, b2)


def log_variable_lagrangian(m: int, h: WarpingProfile, lam: Optional[float] = None) -> Lagrangian:
    """
    Bienergy density of a map out of R^m in t = ln r:
    L = (1/2) B^2 e^((m-4) t) with B = b'' + (m-2) b' - lambda h h'.
    """
    weight = float(m - 1) if lam is None else float(lam)
    growth = float(m - 4)

    def bracket(b, b1, b2):
        return b2 + (m - 2) * b1 - weight * h.eval(b, 0) * h.eval(b, 1)

    def scale(t):
        return np.exp(growth * t) if growth else 1.0

    def func(t, b, b1, b2):
        return 0.5 * bracket(b, b1, b2) ** 2 * scale(t)

    def momentum_1(t, b, b1, b2):
        return (m - 2) * bracket(b, b1, b2) * scale(t)

    def momentum_2(t, b, b1, b2):
        return bracket(b, b1, b2) * scale(t)

    def momentum_2_rate(t, b, b1, b2, b3):
        q1 = h.eval(b, 1) ** 2 + h.eval(b, 0) * h.eval(b, 2)
        rate = b3 + (m - 2) * b2 - weight * q1 * b1
        return (rate + growth * bracket(b, b1, b2)) * scale(t)

    return Lagrangian(
        func=func,
        autonomous=(m == 4),
        momentum_1=momentum_1,
        momentum_2=momentum_2,
        momentum_2_rate=momentum_2_rate,
        name=f"log-variable m={m}",
    )


def cylinder_lagrangian(lam: float, h: WarpingProfile) -> Lagrangian:
    """L = (1/2)(alpha'' - lambda h h')^2 on the cylinder."""

    def tau(b, b2):
        return b2 - lam * h.eval(b, 0) * h.eval(b, 1)

    def momentum_2_rate(t, b, b1, b2, b3):
        q1 = h.eval(b, 1) ** 2 + h.eval(b, 0) * h.eval(b, 2)
        return b3 - lam * q1 * b1

    return Lagrangian(
        func=lambda t, b, b1, b2: 0.5 * tau(b, b2) ** 2,
        momentum_1=lambda t, b, b1, b2: 0.0,
        momentum_2=lambda t, b, b1, b2: tau(b, b2),
        momentum_2_rate=momentum_2_rate,
        name=f"cylinder lambda={lam:g}",
        variable=MapVariable.RADIUS,
    )


def _partial(lagrangian: Lagrangian, index: int, args, rel_step: float) -> float:
    base = list(args)
    step = rel_step * max(abs(base[index]), 1.0)
    up = list(base)
    down = list(base)
    up[index] += step
    down[index] -= step
    return (lagrangian(*up) - lagrangian(*down)) / (2.0 * step)


def _momentum_2(lagrangian: Lagrangian, args, rel_step: float) -> float:
    if lagrangian.momentum_2 is not None:
        return float(lagrangian.momentum_2(*args))
    return _partial(lagrangian, 3, args, rel_step)


def hamiltonian_numeric(lagrangian: Lagrangian, trajectory: RadialMap, t: float) -> float:
    rel_step = numeric_setting("LAGRANGIAN_PARTIAL_STEP")
    total_step = numeric_setting("TRAJECTORY_TOTAL_STEP")
    domain = trajectory.domain
    if (domain.lo is not None and t - 2 * total_step < domain.lo) or (
        domain.hi is not None and t + 2 * total_step > domain.hi
    ):
        raise DomainError(f"t={t} is within two difference steps of the trajectory boundary")

    b0, b1, b2, b3 = (trajectory(t, k) for k in range(4))
    args = (t, b0, b1, b2)
    if lagrangian.momentum_1 is not None:
        p1 = float(lagrangian.momentum_1(*args))
    else:
        p1 = _partial(lagrangian, 2, args, rel_step)
    p2 = _momentum_2(lagrangian, args, rel_step)

    if lagrangian.momentum_2_rate is not None:
        p2_rate = float(lagrangian.momentum_2_rate(t, b0, b1, b2, b3))
    else:
        ahead = (t + total_step,) + tuple(trajectory(t + total_step, k) for k in range(3))
        behind = (t - total_step,) + tuple(trajectory(t - total_step, k) for k in range(3))
        p2_rate = (_momentum_2(lagrangian, ahead, rel_step) - _momentum_2(lagrangian, behind, rel_step)) / (
            2.0 * total_step
        )
    return float(b1 * (p1 - p2_rate) + b2 * p2 - lagrangian(*args))


def key_identity(h: WarpingProfile, beta):
    """1 - h'^2 + h h'', zero for every space-form target."""
    return 1.0 - np.asarray(h.eval(beta, 1)) ** 2 + np.asarray(h.eval(beta, 0)) * np.asarray(h.eval(beta, 2))


def key_identity_derivative(h: WarpingProfile, beta):
    """Derivative of ``key_identity`` in beta: h h''' - h' h''."""
    return np.asarray(h.eval(beta, 0)) * np.asarray(h.eval(beta, 3)) - np.asarray(h.eval(beta, 1)) * np.asarray(
        h.eval(beta, 2)
    )


def hamiltonian_conformal_m4(h: WarpingProfile, beta):
    """Hamiltonian of a conformal map out of R^4, up to a constant factor."""
    value = np.asarray(h.eval(beta, 0)) ** 2 * key_identity(h, beta)
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class ConformalVerdict:
    biharmonic: bool
    proper: bool
    residual_max: float
    key_identity_max: float
    curvature_spread: float

    @property
    def constant_curvature(self) -> bool:
        return self.curvature_spread < 1e-6

    def __str__(self) -> str:
        if not self.biharmonic:
            return "NotBiharmonic"
        return "ProperBiharmonic" if self.proper else "HarmonicOnly"


def classify_conformal_from_euclidean(h: WarpingProfile, samples: np.ndarray, tol: float = 1e-8) -> ConformalVerdict:
    """
    Decide whether the conformal maps R^4 -> (target h) are biharmonic.
    The conformal condition with f = r reduces to
    2 h'^3 - h' (2 + h h'') - h^2 h''' = 0 on the image; proper examples
    need h' != 1 somewhere.
    """
    beta = np.asarray(samples, dtype=float)
    h0, h1, h2, h3 = (np.asarray(h.eval(beta, k)) for k in range(4))
    residual = 2.0 * h1**3 - h1 * (2.0 + h0 * h2) - h0**2 * h3
    residual_max = float(np.max(np.abs(residual)))
    key_max = float(np.max(np.abs(key_identity(h, beta))))
    curvature = np.asarray(radial_curvature(h, beta))
    spread = float(np.max(curvature) - np.min(curvature))
    biharmonic = residual_max <= tol
    proper = biharmonic and bool(np.max(np.abs(h1 - 1.0)) > tol)
    logger.info(
        f"Conformal check for {h.label}: residual {residual_max:.3e}, key identity {key_max:.3e}, "
        f"curvature spread {spread:.3e}"
    )
    return ConformalVerdict(biharmonic, proper, residual_max, key_max, spread)

"""
Maps out of the cylinder (f = 1) weighted by an eigenmap eigenvalue lambda.
"""
import logging
from dataclasses import dataclass

import numpy as np

from apps.core.grids import GridSpec
from apps.functionals.bienergy import bienergy
from apps.functionals.jets import Jet4, RadialMap
from apps.geometry.profiles import WarpingProfile
from apps.geometry.specs import cylinder_spec

logger = logging.getLogger(__name__)

RIGIDITY_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-8


def _q(h: WarpingProfile, alpha):
    return np.asarray(h.eval(alpha, 0)) * np.asarray(h.eval(alpha, 1))


def _q1(h: WarpingProfile, alpha):
    return np.asarray(h.eval(alpha, 1)) ** 2 + np.asarray(h.eval(alpha, 0)) * np.asarray(h.eval(alpha, 2))


def cylinder_tension(lam: float, h: WarpingProfile, jet: Jet4):
    value = jet.a2 - lam * _q(h, jet.a0)
    return float(value) if np.ndim(value) == 0 else value


def cylinder_bienergy(lam: float, h: WarpingProfile, radial_map: RadialMap, grid: GridSpec) -> float:
    """(1/2) * integral of (alpha'' - lambda h h')^2 dr."""
    return bienergy(cylinder_spec(lam, h), radial_map, grid)


def cylinder_hamiltonian(lam: float, h: WarpingProfile, jet: Jet4):
    """-alpha' tau' + (1/2) tau (2 alpha'' - tau)."""
    tau = cylinder_tension(lam, h, jet)
    tau_rate = jet.a3 - lam * _q1(h, jet.a0) * jet.a1
    value = -jet.a1 * tau_rate + 0.5 * tau * (2.0 * jet.a2 - tau)
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class RigidityReport:
    tension_spread: float
    hamiltonian_spread: float
    second_derivative_spread: float
    target_product_spread: float
    tension_level: float

    @property
    def constant_tension(self) -> bool:
        return self.tension_level > 0 and self.tension_spread < RIGIDITY_TOL

    @property
    def constant_hamiltonian(self) -> bool:
        return self.hamiltonian_spread < RIGIDITY_TOL

    @property
    def rigid(self) -> bool:
        """Constant |tau| and H force constant alpha'' and constant h h'."""
        if not (self.constant_tension and self.constant_hamiltonian):
            return False
        return (
            self.second_derivative_spread < RECONSTRUCTION_TOL
            and self.target_product_spread < RECONSTRUCTION_TOL
        )


def _spread(values) -> float:
    values = np.asarray(values, dtype=float)
    return float(np.max(values) - np.min(values))


def cylinder_rigidity(lam: float, h: WarpingProfile, radial_map: RadialMap, grid: GridSpec) -> RigidityReport:
    r = grid.points()
    jet = Jet4(r, *(radial_map(r, k) for k in range(4)))
    tau = np.asarray(cylinder_tension(lam, h, jet), dtype=float)
    ham = np.asarray(cylinder_hamiltonian(lam, h, jet), dtype=float)
    second = tau + lam * _q(h, jet.a0)
    report = RigidityReport(
        tension_spread=_spread(np.abs(tau)),
        hamiltonian_spread=_spread(ham),
        second_derivative_spread=_spread(second),
        target_product_spread=_spread(_q(h, jet.a0)),
        tension_level=float(np.mean(np.abs(tau))),
    )
    logger.debug(f"Cylinder rigidity: {report}")
    return report

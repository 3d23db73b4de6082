import logging
from typing import Optional, Tuple, Union

import numpy as np

from apps.core.conf import numeric_setting
from apps.core.exceptions import InvalidParameterError, UnsupportedError
from apps.functionals.hamiltonian import Lagrangian, hamiltonian_numeric
from apps.functionals.jets import MapVariable, RadialMap
from apps.functionals.log_variable import to_log_variable
from apps.solvers.integration import Trajectory

logger = logging.getLogger(__name__)


def _log_map(trajectory: Union[Trajectory, RadialMap], lagrangian: Lagrangian) -> RadialMap:
    if isinstance(trajectory, Trajectory):
        trajectory = trajectory.as_radial_map()
    if trajectory.variable == lagrangian.variable:
        return trajectory
    return to_log_variable(trajectory)


def hamiltonian_drift(
    trajectory: Union[Trajectory, RadialMap],
    lagrangian: Lagrangian,
    t_range: Optional[Tuple[float, float]] = None,
    nodes: int = 201,
) -> float:
    """
    Largest departure of H from its value at the first interior node.
    Radial trajectories are converted to t = ln r first when the
    Lagrangian is written in t; ``t_range`` defaults to the trajectory's
    own (bounded) domain.
    """
    if not lagrangian.autonomous:
        raise UnsupportedError(f"Lagrangian {lagrangian.name} depends on t; H is not conserved")
    log_map = _log_map(trajectory, lagrangian)
    if t_range is None:
        if not log_map.domain.bounded:
            raise InvalidParameterError("Unbounded trajectory needs an explicit t_range")
        t_range = (log_map.domain.lo, log_map.domain.hi)
    lo, hi = (float(v) for v in t_range)
    margin = 3.0 * numeric_setting("TRAJECTORY_TOTAL_STEP")
    if not hi - lo > 2.0 * margin or nodes < 3:
        raise InvalidParameterError(f"Range [{lo}, {hi}] with {nodes} nodes has no interior nodes")

    ts = np.linspace(lo + margin, hi - margin, nodes)
    values = np.array([hamiltonian_numeric(lagrangian, log_map, t) for t in ts])
    drift = float(np.max(np.abs(values - values[0])))
    logger.info(f"Hamiltonian drift of {lagrangian.name} along {log_map.label or 'trajectory'}: {drift:.3e}")
    return drift

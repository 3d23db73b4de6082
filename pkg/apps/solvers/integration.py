"""
Integration of the fourth-order equation as a first-order system in
(alpha, alpha', alpha'', alpha''').
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy.integrate import solve_ivp

from apps.core.conf import numeric_setting
from apps.core.exceptions import (
    DivergenceError,
    DomainError,
    InvalidParameterError,
    SingularityError,
)
from apps.core.grids import GridFunction
from apps.functionals.jets import Jet4, RadialMap
from apps.functionals.residuals import biharmonic_residual, highest_derivative
from apps.geometry.profiles import Interval
from apps.geometry.specs import MapSpec

logger = logging.getLogger(__name__)

TRAJECTORY_HEADER = ("r", "alpha", "dalpha", "ddalpha", "dddalpha", "residual")
SINGULARITY_SAMPLES = 257


@dataclass(frozen=True)
class Trajectory:
    """
    States (alpha, alpha', alpha'', alpha''') at the nodes ``r``, in
    integration order. ``dense`` interpolates the state between nodes when
    the integrator provides it.
    """

    spec: MapSpec
    r: np.ndarray
    states: np.ndarray
    meta: Dict = field(default_factory=dict, compare=False)
    dense: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if states.shape != (r.size, 4):
            raise InvalidParameterError(f"Trajectory states must have shape ({r.size}, 4), got {states.shape}")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(states))):
            raise InvalidParameterError("Trajectory contains non-finite values")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "states", states)

    @property
    def size(self) -> int:
        return int(self.r.size)

    @property
    def alpha(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def end(self) -> np.ndarray:
        return self.states[-1]

    @property
    def is_uniform(self) -> bool:
        if self.size < 3:
            return True
        gaps = np.diff(self.r)
        return bool(np.allclose(gaps, gaps[0], rtol=1e-9, atol=0.0))

    def state_at(self, x) -> np.ndarray:
        if self.dense is None:
            raise InvalidParameterError("Trajectory has no dense output")
        return np.asarray(self.dense(x), dtype=float)

    def residuals(self) -> np.ndarray:
        """
        Normalized residual at the nodes with alpha'''' taken from the
        differenced alpha''' column; zero for a perfectly integrated solution.
        """
        if self.size < 3:
            return np.zeros(self.size)
        fourth = np.gradient(self.states[:, 3], self.r)
        jet = Jet4(self.r, *self.states.T, fourth)
        return np.asarray(biharmonic_residual(self.spec, jet, normalized=True), dtype=float)

    def as_grid(self, component: int = 0) -> GridFunction:
        if not self.is_uniform:
            raise InvalidParameterError("Trajectory nodes are not uniform; resample it first")
        order = np.argsort(self.r)
        r = self.r[order]
        return GridFunction(float(r[0]), float(r[1] - r[0]), self.states[order, component])

    def resample(self, nodes: int) -> "Trajectory":
        lo, hi = float(np.min(self.r)), float(np.max(self.r))
        grid = np.linspace(lo, hi, nodes)
        states = self.state_at(grid).T
        return Trajectory(self.spec, grid, states, meta=dict(self.meta, resampled=nodes), dense=self.dense)

    def to_csv_rows(self) -> List[Dict]:
        residual = self.residuals()
        return [
            dict(zip(TRAJECTORY_HEADER, (r, *state, res)))
            for r, state, res in zip(self.r, self.states, residual)
        ]

    def as_radial_map(self, label: str = "trajectory") -> RadialMap:
        if self.dense is None:
            raise InvalidParameterError("Trajectory has no dense output")
        spec = self.spec

        def evaluate(x, order):
            state = self.state_at(x)
            if order < 4:
                return state[order]
            return highest_derivative(spec, Jet4(x, *state))

        lo, hi = float(np.min(self.r)), float(np.max(self.r))
        return RadialMap(
            evaluator=evaluate,
            domain=Interval(lo, hi, closed_hi=True),
            pole_regular=False,
            label=label,
            meta=dict(self.meta),
        )


def _rhs(spec: MapSpec) -> Callable:
    def rhs(r, y):
        if not np.all(np.isfinite(y)):
            raise DivergenceError(f"Non-finite state at r={r:.17g}")
        try:
            a4 = highest_derivative(spec, Jet4(r, y[0], y[1], y[2], y[3]))
        except DomainError as exc:
            raise SingularityError(f"Equation degenerates at r={r:.17g}: {exc}") from exc
        return np.array([y[1], y[2], y[3], a4])

    return rhs


def _check_range(spec: MapSpec, r0: float, r_end: float) -> None:
    if r_end == r0:
        raise InvalidParameterError("Integration range is empty")
    checkpoints = np.linspace(r0, r_end, SINGULARITY_SAMPLES)
    if not np.all(spec.f.domain.contains(checkpoints)):
        raise SingularityError(f"[{r0}, {r_end}] leaves the domain {spec.f.domain.describe()} of f")
    values = np.asarray(spec.f.eval(checkpoints, 0), dtype=float)
    if np.any(spec.f.vanishes(checkpoints)) or np.any(np.sign(values) != np.sign(values[0])):
        raise SingularityError(f"f vanishes on [{r0}, {r_end}]; the leading coefficient degenerates")


def _initial_state(jet0: Jet4) -> np.ndarray:
    return np.array([jet0.a0, jet0.a1, jet0.a2, jet0.a3], dtype=float)


def integrate_ode(
    spec: MapSpec,
    jet0: Jet4,
    r_end: float,
    rtol: Optional[float] = None,
    atol: Optional[float] = None,
) -> Trajectory:
    """
    Adaptive Dormand-Prince integration from ``jet0.x`` to ``r_end``.
    A terminal event stops the run once the state exceeds the divergence
    threshold.
    """
    rtol = numeric_setting("ODE_RTOL") if rtol is None else rtol
    atol = numeric_setting("ODE_ATOL") if atol is None else atol
    threshold = numeric_setting("DIVERGENCE_THRESHOLD")
    r0 = float(jet0.x)
    _check_range(spec, r0, float(r_end))
    start = _initial_state(jet0)
    # the terminal event only fires on a crossing
    if np.max(np.abs(start)) > threshold:
        raise DivergenceError(
            f"Initial state already exceeds {threshold:g} at r={r0:.17g}", last_node=(r0, *map(float, start))
        )

    def blow_up(r, y):
        return threshold - np.max(np.abs(y))

    blow_up.terminal = True  # type: ignore[attr-defined]

    solution = solve_ivp(
        _rhs(spec),
        (r0, float(r_end)),
        start,
        method="RK45",
        rtol=rtol,
        atol=atol,
        events=blow_up,
        dense_output=True,
    )
    states = solution.y.T
    if solution.status == 1:
        last = (float(solution.t[-1]), *map(float, states[-1]))
        raise DivergenceError(
            f"State exceeded {threshold:g} at r={solution.t[-1]:.17g} for {spec.describe()}", last_node=last
        )
    if solution.status != 0:
        last = (float(solution.t[-1]), *map(float, states[-1]))
        raise DivergenceError(f"Integrator stopped: {solution.message}", last_node=last)

    steps = solution.t.size - 1
    attempts = max((solution.nfev - 2) // 6, steps)
    meta = {
        "method": "RK45",
        "rtol": rtol,
        "atol": atol,
        "steps": steps,
        "rejected_steps": attempts - steps,
        "nfev": int(solution.nfev),
    }
    trajectory = Trajectory(spec, solution.t, states, meta=meta, dense=solution.sol)
    trajectory.meta["max_residual"] = float(np.max(np.abs(trajectory.residuals())))
    logger.info(
        f"Integrated {spec.describe()} from r={r0:g} to r={r_end:g}: "
        f"{steps} steps, {meta['rejected_steps']} rejected, {meta['nfev']} evaluations"
    )
    return trajectory


def integrate_fixed_rk4(spec: MapSpec, jet0: Jet4, r_end: float, steps: int) -> Trajectory:
    """Classical fixed-step RK4 on a uniform grid of ``steps`` intervals."""
    if steps < 1:
        raise InvalidParameterError(f"Need at least one step, got {steps}")
    r0 = float(jet0.x)
    _check_range(spec, r0, float(r_end))
    rhs = _rhs(spec)
    threshold = numeric_setting("DIVERGENCE_THRESHOLD")
    grid = np.linspace(r0, float(r_end), steps + 1)
    step = grid[1] - grid[0]
    states = np.empty((steps + 1, 4))
    states[0] = _initial_state(jet0)

    for i in range(steps):
        r, y = grid[i], states[i]
        k1 = rhs(r, y)
        k2 = rhs(r + step / 2.0, y + step / 2.0 * k1)
        k3 = rhs(r + step / 2.0, y + step / 2.0 * k2)
        k4 = rhs(r + step, y + step * k3)
        states[i + 1] = y + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(states[i + 1])) or np.max(np.abs(states[i + 1])) > threshold:
            raise DivergenceError(
                f"Fixed-step RK4 diverged at r={grid[i + 1]:.17g}", last_node=(float(r), *map(float, y))
            )

    return Trajectory(spec, grid, states, meta={"method": "RK4", "steps": steps, "step": float(step)})

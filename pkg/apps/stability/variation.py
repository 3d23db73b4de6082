from dataclasses import dataclass
from typing import Callable

import numpy as np

from apps.core.exceptions import InvalidParameterError
from apps.core.grids import GridFunction, GridSpec

CLAMPED_NODES = 2


@dataclass(frozen=True)
class VariationField:
    """
    A variation V(t) sampled on a uniform grid and clamped: V and V'
    vanish at both ends, modelled by two zero nodes at each end.
    """

    grid: GridFunction

    def __post_init__(self):
        values = self.grid.values
        if values.size < 2 * CLAMPED_NODES + 1:
            raise InvalidParameterError(f"Variation needs at least 5 nodes, got {values.size}")
        ends = np.concatenate([values[:CLAMPED_NODES], values[-CLAMPED_NODES:]])
        if np.any(ends != 0.0):
            raise InvalidParameterError("Variation is not clamped: the two end nodes on each side must be zero")

    @property
    def values(self) -> np.ndarray:
        return self.grid.values

    @property
    def step(self) -> float:
        return self.grid.step

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def is_zero(self) -> bool:
        return not np.any(self.values)

    def scaled(self, factor: float) -> "VariationField":
        return VariationField(self.grid.with_values(factor * self.values))

    @classmethod
    def from_function(cls, func: Callable, grid: GridSpec) -> "VariationField":
        """Samples ``func`` and zeroes the clamped end nodes."""
        values = np.asarray(func(grid.points()), dtype=float)
        values[:CLAMPED_NODES] = 0.0
        values[-CLAMPED_NODES:] = 0.0
        return cls(GridFunction(grid.lo, grid.step, values))

    @classmethod
    def bump(cls, grid: GridSpec, center: float, width: float, power: int = 6) -> "VariationField":
        """(1 - s^2)^power with s = (t - center)/width, zero for |s| >= 1."""
        if not width > 0:
            raise InvalidParameterError(f"Bump width must be positive, got {width}")

        def profile(t):
            s = (t - center) / width
            return np.where(np.abs(s) < 1.0, (1.0 - s * s) ** power, 0.0)

        return cls.from_function(profile, grid)

    @classmethod
    def zero(cls, grid: GridSpec) -> "VariationField":
        return cls(GridFunction(grid.lo, grid.step, np.zeros(grid.nodes)))

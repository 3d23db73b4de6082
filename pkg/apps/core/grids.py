"""
Uniform grids, Simpson quadrature weights and central-difference operators.

Every routine that integrates or differentiates sampled data goes through
this module so quadrature and differencing share one grid.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import sparse
from scipy.integrate import simpson

from apps.core.exceptions import InvalidParameterError


@dataclass(frozen=True)
class GridFunction:
    """Samples of a scalar function on ``start + k * step``."""

    start: float
    step: float
    values: np.ndarray

    def __post_init__(self):
        if not self.step > 0:
            raise InvalidParameterError(f"Grid step must be positive, got {self.step}")
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise InvalidParameterError("Grid values must be a non-empty 1-D sequence")
        object.__setattr__(self, "values", values)

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def nodes(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.size)

    @property
    def stop(self) -> float:
        return float(self.start + self.step * (self.size - 1))

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.start, self.step, np.asarray(values, dtype=float))

    @classmethod
    def sample(cls, func, lo: float, hi: float, nodes: int) -> "GridFunction":
        grid = uniform_nodes(lo, hi, nodes)
        step = (hi - lo) / (nodes - 1)
        return cls(lo, step, np.asarray(func(grid), dtype=float))


@dataclass(frozen=True)
class GridSpec:
    """A uniform grid described by its bounds and node count."""

    lo: float
    hi: float
    nodes: int

    def __post_init__(self):
        uniform_nodes(self.lo, self.hi, self.nodes)

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.nodes - 1)

    def points(self) -> np.ndarray:
        return uniform_nodes(self.lo, self.hi, self.nodes)

    def refined(self) -> "GridSpec":
        """Same interval with the step halved."""
        return GridSpec(self.lo, self.hi, 2 * self.nodes - 1)


def uniform_nodes(lo: float, hi: float, nodes: int) -> np.ndarray:
    if nodes < 2:
        raise InvalidParameterError(f"Need at least 2 nodes, got {nodes}")
    if not hi > lo:
        raise InvalidParameterError(f"Interval must be well ordered, got [{lo}, {hi}]")
    return np.linspace(lo, hi, nodes)


def simpson_weights(nodes: int, step: float) -> np.ndarray:
    """Weights w with ``w @ y == simpson(y, dx=step)`` for any y."""
    if nodes < 3:
        raise InvalidParameterError(f"Simpson quadrature needs 3 nodes, got {nodes}")
    return simpson(np.eye(nodes), dx=step, axis=-1)


def integrate(values: np.ndarray, step: float) -> float:
    return float(simpson(np.asarray(values, dtype=float), dx=step))


def central_first(values: np.ndarray, step: float) -> np.ndarray:
    """Second-order first difference; the two end rows are zero."""
    out = np.zeros_like(values, dtype=float)
    out[1:-1] = (values[2:] - values[:-2]) / (2.0 * step)
    return out


def central_second(values: np.ndarray, step: float) -> np.ndarray:
    out = np.zeros_like(values, dtype=float)
    out[1:-1] = (values[2:] - 2.0 * values[1:-1] + values[:-2]) / step**2
    return out


def central_fourth(values: np.ndarray, step: float) -> np.ndarray:
    """Five-point fourth difference; two rows at each end are zero."""
    out = np.zeros_like(values, dtype=float)
    out[2:-2] = (
        values[4:] - 4.0 * values[3:-1] + 6.0 * values[2:-2] - 4.0 * values[1:-3] + values[:-4]
    ) / step**4
    return out


def difference_matrices(nodes: int, step: float) -> Tuple[sparse.csr_matrix, sparse.csr_matrix]:
    """Sparse matrices of ``central_first`` and ``central_second``."""
    if nodes < 5:
        raise InvalidParameterError(f"Difference operators need 5 nodes, got {nodes}")
    first = (sparse.diags([-1.0, 1.0], [-1, 1], shape=(nodes, nodes)) / (2.0 * step)).tolil()
    second = (sparse.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(nodes, nodes)) / step**2).tolil()
    for row in (0, nodes - 1):
        first[row, :] = 0.0
        second[row, :] = 0.0
    return first.tocsr(), second.tocsr()

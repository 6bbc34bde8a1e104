"""Space-time grids and the discrete Fourier lattice.

The spatial domain is the periodic truncation [-L, L) of the real line,
sampled at a power-of-two number of points so transforms are exact-size.
Users should pick L large enough that the weight (1+|x|^2)^(H-1) makes
boundary contributions negligible; L >= 8*sqrt(T) is a safe default.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigurationError, ShapeError

__all__ = ["SpaceGrid", "TimeGrid", "SpaceTimeGrid", "build_grid", "as_field"]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class SpaceGrid:
    """Uniform periodic grid on [-L, L) with its Fourier lattice.

    Attributes
    ----------
    half_width : float
        L; the domain is [-L, L).
    n_points : int
        Number of grid points, a power of two and >= 8.
    """

    half_width: float
    n_points: int
    dx: float = field(init=False)
    x: np.ndarray = field(init=False, repr=False)
    xi: np.ndarray = field(init=False, repr=False)
    xi_r: np.ndarray = field(init=False, repr=False)
    dxi: float = field(init=False)

    def __post_init__(self):
        if self.half_width <= 0:
            raise ConfigurationError("half_width must be positive")
        if not _is_power_of_two(self.n_points) or self.n_points < 8:
            raise ConfigurationError("n_points must be a power of two (>= 8)")
        dx = 2.0 * self.half_width / self.n_points
        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "x", -self.half_width + dx * np.arange(self.n_points))
        object.__setattr__(self, "xi", 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=dx))
        object.__setattr__(self, "xi_r", 2.0 * np.pi * np.fft.rfftfreq(self.n_points, d=dx))
        object.__setattr__(self, "dxi", np.pi / self.half_width)

    def index_of(self, x0: float) -> int:
        """Index of the grid point closest to x0; x0 must lie in [-L, L)."""
        if not (-self.half_width <= x0 < self.half_width):
            raise ConfigurationError(f"x = {x0} outside the domain [-{self.half_width}, {self.half_width})")
        return int(round((x0 + self.half_width) / self.dx)) % self.n_points

    def quad(self, f: np.ndarray) -> float:
        """Grid quadrature of a sampled function over the periodic domain."""
        return float(np.sum(f, axis=-1) * self.dx)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid t_k = k*dt on [0, T]."""

    horizon: float
    n_steps: int
    dt: float = field(init=False)
    times: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.horizon <= 0:
            raise ConfigurationError("horizon T must be positive")
        if self.n_steps < 1:
            raise ConfigurationError("n_steps must be >= 1")
        dt = self.horizon / self.n_steps
        object.__setattr__(self, "dt", dt)
        object.__setattr__(self, "times", dt * np.arange(self.n_steps + 1))


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Product of a spatial grid and a time grid; immutable, freely shareable."""

    space: SpaceGrid
    time: TimeGrid

    @property
    def n_points(self) -> int:
        return self.space.n_points

    @property
    def n_steps(self) -> int:
        return self.time.n_steps

    @property
    def dx(self) -> float:
        return self.space.dx

    @property
    def dt(self) -> float:
        return self.time.dt


def build_grid(L: float, n_points: int, T: float, n_steps: int) -> SpaceTimeGrid:
    """Build the shared space-time grid.

    Raises
    ------
    ConfigurationError
        If n_points is not a power of two or any size parameter is
        non-positive.
    """
    return SpaceTimeGrid(SpaceGrid(L, n_points), TimeGrid(T, n_steps))


def as_field(grid: SpaceGrid, values) -> np.ndarray:
    """Validate a sampled field: right length, finite entries."""
    v = np.asarray(values, dtype=float)
    if v.shape[-1] != grid.n_points:
        raise ShapeError(f"field has {v.shape[-1]} values, grid has {grid.n_points} points")
    if not np.all(np.isfinite(v)):
        raise ShapeError("field contains non-finite entries")
    return v

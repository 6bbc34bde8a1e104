"""Seeded synthesis of the spatially rough, temporally white noise increments.

Each time-step increment is a stationary Gaussian field built on the
frequency lattice: independent complex Gaussians per mode, scaled by the
square root of the exact spectral mass of each frequency cell times dt,
Hermitian-symmetrized and inverse-transformed.  Streams are keyed by
(seed, path, step) through a counter-based generator, so parallel workers
can draw any step of any path independently and reproducibly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, ShapeError
from .grids import SpaceGrid, SpaceTimeGrid
from .rough_space import HurstParams, spectral_cell_masses

__all__ = ["NoiseRealization", "sample_increment", "empirical_covariance"]

# paths are grouped into fixed lanes so normals can be drawn in bulk; the
# lane width is part of the on-disk reproducibility contract, not a tunable
LANE = 256


def lane_rng(seed: int, lane: int, step: int) -> np.random.Generator:
    """Generator for one (lane, step) block; streams never overlap."""
    return np.random.Generator(
        np.random.Philox(key=np.uint64(seed), counter=[0, 0, np.uint64(lane), np.uint64(step)])
    )


def _split_normals(eta: np.ndarray, n: int):
    """Map a row of n standard normals onto half-spectrum coordinates."""
    h = n // 2
    re = eta[..., 0 : h - 1]
    im = eta[..., h - 1 : 2 * h - 2]
    nyq = eta[..., 2 * h - 2]
    zero = eta[..., 2 * h - 1]
    return zero, re, im, nyq


def assemble_field(eta: np.ndarray, mode_std: np.ndarray, n: int) -> np.ndarray:
    """Real field with independent mode amplitudes of given standard deviations.

    eta holds n standard normals per field (leading axes are batch axes);
    mode_std has length n//2 + 1 and applies to the rfft half-spectrum.
    """
    h = n // 2
    zero, re, im, nyq = _split_normals(eta, n)
    A = np.zeros(eta.shape[:-1] + (h + 1,), dtype=complex)
    A[..., 1:h] = mode_std[1:h] * (re + 1j * im) / np.sqrt(2.0)
    A[..., 0] = mode_std[0] * zero
    A[..., h] = mode_std[h] * nyq
    return n * np.fft.irfft(A, n, axis=-1)


def increment_mode_std(grid: SpaceGrid, params: HurstParams, dt: float) -> np.ndarray:
    """Per-mode standard deviations of the raw white-in-time increment."""
    if dt <= 0:
        raise DomainError("dt must be positive")
    return np.sqrt(dt * spectral_cell_masses(grid, params))


@dataclass(frozen=True)
class NoiseRealization:
    """Seeded family of rough spatial increments, one per time step."""

    seed: int
    grid: SpaceGrid
    params: HurstParams

    def normals(self, step: int, path: int = 0, count: int = 1) -> np.ndarray:
        """Standard normals underlying `count` consecutive paths at one step.

        Drawing is lane-blocked: a path's normals depend only on
        (seed, path, step), never on how the caller chunks the batch.
        """
        n = self.grid.n_points
        lane0 = path // LANE
        lane1 = (path + count - 1) // LANE
        rows = []
        for lane in range(lane0, lane1 + 1):
            block = lane_rng(self.seed, lane, step).standard_normal((LANE, n))
            lo = max(path - lane * LANE, 0)
            hi = min(path + count - lane * LANE, LANE)
            rows.append(block[lo:hi])
        out = rows[0] if len(rows) == 1 else np.concatenate(rows)
        return out[0] if count == 1 else out

    def increment(self, step: int, dt: float, path: int = 0) -> np.ndarray:
        """Raw increment field for one step; deterministic in (seed, path, step)."""
        std = increment_mode_std(self.grid, self.params, dt)
        return assemble_field(self.normals(step, path), std, self.grid.n_points)


def sample_increment(
    step_index: int,
    dt: float,
    grid: SpaceGrid,
    params: HurstParams,
    seed: int,
    path: int = 0,
) -> np.ndarray:
    """One rough spatial increment with the white-in-time dt scaling."""
    return NoiseRealization(seed, grid, params).increment(step_index, dt, path)


def _anchored_antiderivative_probes(A: np.ndarray, grid: SpaceGrid, probes: np.ndarray) -> np.ndarray:
    """Evaluate int_0^x of the mode expansion at probe points, anchored at 0.

    The Nyquist bin integrates to sin(pi x / dx)/xi, which vanishes at grid
    points, so only the zero mode and the proper pairs contribute.
    """
    h = grid.n_points // 2
    xi = grid.xi_r[1:h]
    phi = (np.exp(1j * np.outer(probes, xi)) - 1.0) / (1j * xi)  # (n_probes, h-1)
    pair_part = 2.0 * np.real(A[..., 1:h] @ phi.T)
    zero_part = np.real(A[..., 0])[..., None] * probes
    return pair_part + zero_part


def sample_accumulated_probes(
    n_samples: int,
    t: float,
    probes,
    grid: SpaceTimeGrid,
    params: HurstParams,
    seed: int,
) -> np.ndarray:
    """Samples of W(t, x) at the probe points, anchored so W(t, 0) = 0.

    W(t, .) accumulates the exact spatial antiderivatives of the step
    increments up to t.  Returns an array of shape (n_samples, len(probes)).
    """
    space = grid.space
    probes = np.asarray(probes, dtype=float)
    for probe in probes:
        j = space.index_of(probe)  # raises ConfigurationError when off-domain
        if abs(space.x[j] - probe) > 1e-9 * max(1.0, abs(probe)):
            raise DomainError(f"probe {probe} is not a grid point")
    n_k = int(round(t / grid.dt))
    if abs(n_k * grid.dt - t) > 1e-9 * t or n_k < 1:
        raise DomainError("t must be a positive multiple of dt")

    std = increment_mode_std(space, params, grid.dt)
    h = space.n_points // 2
    W = np.zeros((n_samples, probes.size))
    noise = NoiseRealization(seed, space, params)
    for k in range(n_k):
        eta = noise.normals(k, path=0, count=n_samples)
        zero, re, im, _ = _split_normals(eta, space.n_points)
        A = np.zeros((n_samples, h + 1), dtype=complex)
        A[:, 1:h] = std[1:h] * (re + 1j * im) / np.sqrt(2.0)
        A[:, 0] = std[0] * zero
        W += _anchored_antiderivative_probes(A, space, probes)
    return W


def empirical_covariance(
    n_samples: int,
    t: float,
    x: float,
    y: float,
    grid: SpaceTimeGrid,
    params: HurstParams,
    seed: int,
) -> tuple[float, float]:
    """Monte Carlo estimate of Cov(W(t,x), W(t,y)) with its standard error."""
    if n_samples < 100:
        raise DomainError("need at least 100 samples")
    W = sample_accumulated_probes(n_samples, t, [x, y], grid, params, seed)
    return covariance_with_stderr(W[:, 0], W[:, 1])


def covariance_with_stderr(wx: np.ndarray, wy: np.ndarray) -> tuple[float, float]:
    n = wx.size
    prod = (wx - wx.mean()) * (wy - wy.mean())
    est = float(prod.mean()) * n / (n - 1)
    stderr = float(prod.std(ddof=1) / np.sqrt(n))
    return est, stderr


def covariance_formula(t: float, x: float, y: float, H: float) -> float:
    """Closed-form covariance (t/2)(|x|^2H + |y|^2H - |x-y|^2H)."""
    return 0.5 * t * (abs(x) ** (2 * H) + abs(y) ** (2 * H) - abs(x - y) ** (2 * H))

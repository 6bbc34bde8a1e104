"""Weight function, weighted norms, fractional seminorms, and path metrics.

Random fields enter as batches with the ensemble along the first axis; the
expectation inside the weighted L^p norm is a plain Monte Carlo average
over that axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma

from ._singular import increment_weighted_integral
from .exceptions import DomainError, ShapeError
from .grids import SpaceGrid, SpaceTimeGrid

__all__ = [
    "weight_lambda",
    "weight_normalizer",
    "weight_tail_mass",
    "lp_lambda_norm",
    "n_star_norm",
    "pointwise_n_norm",
    "path_metric_dC",
    "path_metric_dC_batch",
    "modulus_of_continuity",
    "WeightedNormReport",
    "path_space_norm",
]


def weight_normalizer(H: float) -> float:
    """Constant making (1+|x|^2)^(H-1) integrate to one over the line."""
    return float(gamma(1.0 - H) / (np.sqrt(np.pi) * gamma(0.5 - H)))


def weight_lambda(x, H: float):
    """Integrable decay weight c_H (1+|x|^2)^(H-1)."""
    if not (0.25 < H < 0.5):
        raise DomainError("Hurst parameter must lie in (1/4, 1/2)")
    return weight_normalizer(H) * (1.0 + np.square(x)) ** (H - 1.0)


def weight_tail_mass(L: float, H: float) -> float:
    """Weight mass beyond the truncated domain, 1 - int_{-L}^{L} lambda."""
    tail, _ = quad(lambda x: weight_lambda(x, H), L, np.inf, limit=200)
    return 2.0 * tail


def _ensemble_lp(v: np.ndarray, grid: SpaceGrid, H: float, p: float) -> float:
    """(int E|v|^p lambda dx)^(1/p); ensemble axis first when 2-D."""
    lam = weight_lambda(grid.x, H)
    mean_pow = np.mean(np.abs(v) ** p, axis=0) if v.ndim == 2 else np.abs(v) ** p
    return float(np.sum(mean_pow * lam) * grid.dx) ** (1.0 / p)


def lp_lambda_norm(v, grid: SpaceGrid, H: float, p: float) -> float:
    """Weighted L^p norm of a field, or of a random field given as a batch."""
    if p < 2:
        raise DomainError("weighted norms require p >= 2")
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != grid.n_points:
        raise ShapeError("field length does not match the grid")
    return _ensemble_lp(v, grid, H, p)


def _shift(grid: SpaceGrid, v: np.ndarray, y: float) -> np.ndarray:
    return np.fft.irfft(np.fft.rfft(v, axis=-1) * np.exp(1j * grid.xi_r * y), grid.n_points, axis=-1)


def _derivative(grid: SpaceGrid, v: np.ndarray) -> np.ndarray:
    return np.fft.irfft(np.fft.rfft(v, axis=-1) * (1j * grid.xi_r), grid.n_points, axis=-1)


def n_star_norm(v, grid: SpaceGrid, H: float, p: float, per_decade: int = 48) -> float:
    """Weighted increment seminorm of one time slice (field or batch).

    Behaves like the increment form of the rough-space norm but with the
    weighted L^p norm inside.  Far increments are dominated by the slice
    minus its boundary plateau; that limit supplies the closed-form tail.
    """
    if p < 2:
        raise DomainError("weighted norms require p >= 2")
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != grid.n_points:
        raise ShapeError("field length does not match the grid")
    plateau = 0.5 * (np.take(v, 0, axis=-1) + np.take(v, -1, axis=-1))
    w = v - np.expand_dims(plateau, -1) if v.ndim == 2 else v - plateau
    dv = _derivative(grid, v)
    quad_coeff = _ensemble_lp(dv, grid, H, p) ** 2
    far_limit = _ensemble_lp(w, grid, H, p) ** 2

    def G(h: np.ndarray) -> np.ndarray:
        out = np.empty_like(h)
        for i, hi in enumerate(h):
            out[i] = _ensemble_lp(v - _shift(grid, v, hi), grid, H, p) ** 2
        return out

    val = increment_weighted_integral(
        G, H, delta=grid.dx, cutoff=grid.half_width,
        quad_coeff=quad_coeff, far_limit=far_limit, per_decade=per_decade,
    )
    return float(np.sqrt(max(val, 0.0)))


def pointwise_n_norm(f, x0: float, grid: SpaceGrid, H: float, per_decade: int = 64) -> float:
    """Pointwise increment norm of a field at location x0."""
    f = np.asarray(f, dtype=float)
    if f.shape[-1] != grid.n_points:
        raise ShapeError("field length does not match the grid")
    j = grid.index_of(x0)
    plateau = 0.5 * (f[0] + f[-1])
    fx = f[j]
    dfx = _derivative(grid, f)[j]

    def G(h: np.ndarray) -> np.ndarray:
        out = np.empty_like(h)
        for i, hi in enumerate(h):
            up = _shift(grid, f, hi)[j] - fx
            dn = _shift(grid, f, -hi)[j] - fx
            out[i] = 0.5 * (up * up + dn * dn)
        return out

    val = increment_weighted_integral(
        G, H, delta=grid.dx, cutoff=grid.half_width / 2.0,
        quad_coeff=dfx * dfx, far_limit=(plateau - fx) ** 2, per_decade=per_decade,
    )
    return float(np.sqrt(max(val, 0.0)))


def _window_max(diff: np.ndarray, grid: SpaceGrid, radius: float) -> np.ndarray:
    lo = grid.index_of(max(-radius, -grid.half_width))
    hi = grid.index_of(min(radius, grid.half_width - grid.dx))
    return diff[..., lo : hi + 1].max(axis=(-2, -1))


def path_metric_dC(u: np.ndarray, v: np.ndarray, grid: SpaceTimeGrid) -> float:
    """Locally-uniform path metric; series truncated at the domain half-width.

    Terms beyond n = ceil(L) each carry weight < 2^-ceil(L) and the grid
    cannot resolve them anyway.
    """
    return float(path_metric_dC_batch(u[None, ...], v, grid)[0])


def path_metric_dC_batch(U: np.ndarray, v: np.ndarray, grid: SpaceTimeGrid) -> np.ndarray:
    """Metric of each path in a batch against a common reference path."""
    U = np.asarray(U, dtype=float)
    v = np.asarray(v, dtype=float)
    if U.shape[-2:] != v.shape or v.shape != (grid.n_steps + 1, grid.n_points):
        raise ShapeError("paths must be sampled on the given space-time grid")
    diff = np.minimum(np.abs(U - v), 1.0)
    n_max = int(np.ceil(grid.space.half_width))
    total = np.zeros(U.shape[0])
    for m in range(1, n_max + 1):
        total += 0.5**m * _window_max(diff, grid.space, float(m))
    return total


def modulus_of_continuity(u: np.ndarray, grid: SpaceTimeGrid, R: float, theta: float) -> float:
    """Largest |u(t,x) - u(s,y)| over on-grid pairs with |t-s| + |x-y| <= theta."""
    if theta <= 0:
        raise DomainError("theta must be positive")
    if R > grid.space.half_width:
        raise DomainError("window radius exceeds the domain half-width")
    u = np.asarray(u, dtype=float)
    if u.shape != (grid.n_steps + 1, grid.n_points):
        raise ShapeError("path must be sampled on the given space-time grid")
    dt, dx = grid.dt, grid.dx
    lo = grid.space.index_of(-R)
    hi = grid.space.index_of(min(R, grid.space.half_width - dx))
    win = u[:, lo : hi + 1]
    nt, nx = win.shape
    best = 0.0
    a_max = min(int(np.floor(theta / dt)), nt - 1)
    for a in range(a_max + 1):
        b_budget = theta - a * dt
        b_max = min(int(np.floor(b_budget / dx)), nx - 1)
        for b in range(-b_max, b_max + 1):
            t_sl = win[a:, :] if a else win
            s_sl = win[: nt - a, :] if a else win
            if b >= 0:
                d = np.abs(t_sl[:, b:] - s_sl[:, : nx - b])
            else:
                d = np.abs(t_sl[:, :b] - s_sl[:, -b:])
            if d.size:
                best = max(best, float(d.max()))
    return best


@dataclass
class WeightedNormReport:
    """Components of the path-space norm: sup-in-t of each piece."""

    lp_lambda: float
    n_star: float
    z_norm: float


def path_space_norm(
    paths: np.ndarray,
    grid: SpaceTimeGrid,
    H: float,
    p: float,
    time_indices=None,
) -> WeightedNormReport:
    """Path-space norm of a deterministic path or a batch of sample paths.

    paths has shape (n_steps+1, n) or (n_paths, n_steps+1, n); the sups run
    over the evaluated time set (all grid times by default).
    """
    paths = np.asarray(paths, dtype=float)
    batch = paths.ndim == 3
    idx = range(grid.n_steps + 1) if time_indices is None else time_indices
    lp_sup, ns_sup = 0.0, 0.0
    for k in idx:
        slc = paths[:, k, :] if batch else paths[k, :]
        lp_sup = max(lp_sup, lp_lambda_norm(slc, grid.space, H, p))
        ns_sup = max(ns_sup, n_star_norm(slc, grid.space, H, p))
    return WeightedNormReport(lp_sup, ns_sup, lp_sup + ns_sup)

"""Shared scheme for integrals against the singular weight |h|^(2H-2).

Every |h|-integral in the package has the same anatomy: the integrand
vanishes quadratically at h = 0, is smooth in between, and tends to a
constant as |h| grows.  The weight |h|^(2H-2) is integrable at 0 but its
tail decays so slowly (exponent 2H-2 in (-3/2, -1)) that for H near 1/4
almost half the mass can sit beyond any practical cutoff.  We therefore
split three ways:

* |h| <= delta   : quadratic expansion, integrated in closed form;
* delta < |h| <= cutoff : trapezoid on a geometric grid (the integrand
  is C^1 there);
* |h| > cutoff  : the limiting constant times the exact power tail.
"""

from __future__ import annotations

import numpy as np

__all__ = ["geometric_nodes", "increment_weighted_integral"]


def geometric_nodes(lo: float, hi: float, per_decade: int) -> np.ndarray:
    """Geometrically spaced nodes on [lo, hi], endpoints included."""
    if hi <= lo:
        raise ValueError("need hi > lo")
    n = max(2, int(np.ceil(per_decade * np.log10(hi / lo))) + 1)
    return np.geomspace(lo, hi, n)


def increment_weighted_integral(
    G,
    H: float,
    delta: float,
    cutoff: float,
    quad_coeff: float,
    far_limit: float,
    per_decade: int = 64,
) -> float:
    """Integrate G(|h|) |h|^(2H-2) over the whole line.

    Parameters
    ----------
    G : callable
        Vectorized even integrand evaluated at positive h.
    delta, cutoff : float
        Inner and outer splitting radii.
    quad_coeff : float
        Coefficient q with G(h) ~ q h^2 as h -> 0.
    far_limit : float
        Limit of G(h) as h -> infinity.
    """
    near = 2.0 * quad_coeff * delta ** (2 * H + 1) / (2 * H + 1)
    h = geometric_nodes(delta, cutoff, per_decade)
    mid = 2.0 * np.trapezoid(G(h) * h ** (2 * H - 2), h)
    far = 2.0 * far_limit * cutoff ** (2 * H - 1) / (1 - 2 * H)
    return float(near + mid + far)

"""Seeded low-discrepancy samplers over chart domains.

Scrambled Sobol streams are deterministic for a fixed seed and nested:
the first n points of a longer stream equal the n-point stream.  Ball
domains are parameterized by geodesic radius (radial coordinate mapped
through u^(1/m)) and an inverse-Gaussian direction, then sent through
the radial exponential map of the space; sphere domains fix the radius.
The parameterization is not the Riemannian volume measure, it is a fixed
documented sampling measure shared by every certificate.
"""

from __future__ import annotations

import numpy as np
from scipy.stats import norm, qmc

from .errors import ValidationError
from .spaces import COMPLEX_HYPERBOLIC, ModelSpace


def sobol_stream(seed: int, dim: int, n: int) -> np.ndarray:
    """n scrambled Sobol points in [0, 1)^dim; nested across n for fixed seed."""
    if n < 1:
        raise ValidationError("need n >= 1 samples")
    eng = qmc.Sobol(d=dim, scramble=True, seed=seed)
    # draw a power-of-two block and truncate: keeps balance properties and
    # the prefix (nesting) property across different n
    block = 1 << int(np.ceil(np.log2(max(2, n))))
    return eng.random_base2(int(np.log2(block)))[:n]


def _directions(u: np.ndarray) -> np.ndarray:
    """Map uniform rows to unit directions via the Gaussian inverse CDF."""
    g = norm.ppf(np.clip(u, 1.0e-12, 1.0 - 1.0e-12))
    nrm = np.linalg.norm(g, axis=1, keepdims=True)
    nrm[nrm < 1.0e-300] = 1.0
    return g / nrm


def _radial_chart_point(space: ModelSpace, r: float, u: np.ndarray) -> np.ndarray:
    """exp_origin(r * u) in chart coordinates (closed form per kind)."""
    if space.kind == COMPLEX_HYPERBOLIC:
        return float(np.tanh(r)) * u
    return r * u


def ball_points(space: ModelSpace, n: int, seed: int, r_max: float,
                r_min: float = 0.0) -> np.ndarray:
    """Quasi-random points with geodesic radius in [r_min, r_max]."""
    if not 0.0 <= r_min < r_max <= space.geodesic_radius + 1e-9:
        raise ValidationError("invalid radial range for the ball sampler")
    m = space.dim
    u = sobol_stream(seed, m + 1, n)
    radii = r_min + (r_max - r_min) * u[:, 0] ** (1.0 / m)
    dirs = _directions(u[:, 1:])
    return np.stack([_radial_chart_point(space, float(r), d)
                     for r, d in zip(radii, dirs)])


def sphere_points(space: ModelSpace, n: int, seed: int, radius: float):
    """Points on the geodesic sphere of the given radius, plus the unit
    tangent-space directions that generated them."""
    if not 0.0 < radius <= space.geodesic_radius + 1e-9:
        raise ValidationError("invalid sphere radius")
    m = space.dim
    u = sobol_stream(seed, m, n)
    dirs = _directions(u)
    pts = np.stack([_radial_chart_point(space, radius, d) for d in dirs])
    return pts, dirs


def disk_points(n: int, seed: int, dim: int, rho_max: float) -> np.ndarray:
    """Quasi-random points in the Euclidean disk |xi| <= rho_max (patch charts)."""
    u = sobol_stream(seed, dim + 1, n)
    radii = rho_max * u[:, 0] ** (1.0 / dim)
    dirs = _directions(u[:, 1:])
    return radii[:, None] * dirs


def discrepancy_estimate(points01: np.ndarray) -> float:
    """Centered L2 discrepancy of points in the unit cube."""
    return float(qmc.discrepancy(np.asarray(points01, dtype=float)))

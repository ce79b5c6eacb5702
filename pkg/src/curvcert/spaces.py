"""Model spaces with pinched negative curvature on explicit charts.

Four chart models, all with a single global chart truncated at geodesic
radius ``geodesic_radius`` (default 8, where sinh conditioning degrades):

* ``euclidean(m)``: flat R^m, identity metric (contrast fixture).
* ``hyperbolic(m)``: curvature -1 in geodesic normal coordinates at the
  origin; in Cartesian chart coordinates the metric is the radial
  projector plus (sinh r / r)^2 on the angular complement.
* ``complex_hyperbolic(n)``: unit-ball model, real dimension 2n with
  interleaved coordinates (x1, y1, ..., xn, yn).  The Hermitian metric
  H = (1-|z|^2)^{-1} I + (1-|z|^2)^{-2} conj(z) z^T is realized as a
  real metric with no extra scale, which puts sectional curvature in
  [-4, -1]: holomorphic planes reach -4, totally real planes -1 (the
  maximum), so the pinching constant is a = 2.
* ``warped(m, profile)``: rotationally symmetric metric
  dr^2 + phi(r)^2 dTheta^2 with phi'' = -K(r) phi, phi(0) = 0,
  phi'(0) = 1 for a radial curvature profile K <= -1.

All evaluators are pure functions of their arguments; the module is safe
for data-parallel evaluation over sample points.

Curvature paths
---------------
Each curvature quantity has two independent routes:

* ``path="closed"``: exact tensors (constant curvature, complex space
  form, rotationally symmetric) built from the metric, J and the warp
  profile; Christoffel symbols from hand-differentiated metric formulas.
* ``path="fd"``: central finite differences of ``metric_at`` only, with
  steps scaled by ``feature_scale`` so the ball-model compression near
  the boundary does not destroy the stencil.

Sign conventions are recorded in `curvcert.conventions`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import DegenerateInputError, DomainError, ValidationError

EUCLIDEAN = "euclidean"
HYPERBOLIC = "hyperbolic"
COMPLEX_HYPERBOLIC = "complex_hyperbolic"
WARPED = "warped"

KINDS = (EUCLIDEAN, HYPERBOLIC, COMPLEX_HYPERBOLIC, WARPED)

# FD defaults: first-derivative stencils use 1e-4 * max(1, |x|), second
# derivative class 1e-3 * max(1, |x|); both multiplied by the local
# feature scale of the chart.
FD_STEP_FIRST = 1.0e-4
FD_STEP_SECOND = 1.0e-3

_SERIES_RADIUS = 1.0e-3


@dataclass(frozen=True)
class WarpProfile:
    """Radial warp phi with phi'' = -K(r) phi, phi(0)=0, phi'(0)=1.

    The profile is integrated once on a dense grid at construction and
    interpolated with cubic Hermite splines (phi' is exact at the nodes).
    """

    curvature: Callable[[float], float]
    r_max: float
    grid_step: float = 1.0e-3
    _phi: CubicHermiteSpline = field(init=False, repr=False, compare=False)
    _dphi: CubicHermiteSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = int(np.ceil(self.r_max / self.grid_step)) + 1
        s = np.linspace(0.0, self.r_max, n)
        h = s[1] - s[0]
        phi = np.empty(n)
        dphi = np.empty(n)
        y = np.array([0.0, 1.0])

        def rhs(r, y):
            return np.array([y[1], -self.curvature(r) * y[0]])

        phi[0], dphi[0] = y
        for i in range(n - 1):
            r = s[i]
            k1 = rhs(r, y)
            k2 = rhs(r + h / 2, y + h / 2 * k1)
            k3 = rhs(r + h / 2, y + h / 2 * k2)
            k4 = rhs(r + h, y + h * k3)
            y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            phi[i + 1], dphi[i + 1] = y
        ddphi = np.array([-self.curvature(r) * p for r, p in zip(s, phi)])
        object.__setattr__(self, "_phi", CubicHermiteSpline(s, phi, dphi))
        object.__setattr__(self, "_dphi", CubicHermiteSpline(s, dphi, ddphi))

    def phi(self, r):
        return float(self._phi(r))

    def dphi(self, r):
        return float(self._dphi(r))

    def k0(self):
        return float(self.curvature(0.0))

    def radial_curvature(self, r):
        """Sectional curvature of planes containing the radial direction."""
        return float(self.curvature(r))

    def tangential_curvature(self, r):
        """Sectional curvature of planes orthogonal to the radial direction."""
        if r < 1.0e-4:
            return self.k0()
        p, dp = self.phi(r), self.dphi(r)
        return (1.0 - dp * dp) / (p * p)


@dataclass(frozen=True)
class ModelSpace:
    """A chart model: kind, dimension, pinching constant, domain truncation."""

    kind: str
    dim: int
    pinching_a: float
    geodesic_radius: float = 8.0
    warp: Optional[WarpProfile] = None

    @property
    def complex_dim(self) -> int:
        if self.kind != COMPLEX_HYPERBOLIC:
            raise ValidationError(f"{self.kind} space has no complex structure")
        return self.dim // 2

    def chart_bound(self) -> float:
        """Chart-coordinate radius of the truncated domain."""
        if self.kind == COMPLEX_HYPERBOLIC:
            return float(np.tanh(self.geodesic_radius))
        return self.geodesic_radius

    def geodesic_r(self, x) -> float:
        """Geodesic distance from the chart origin."""
        rho = float(np.linalg.norm(x))
        if self.kind == COMPLEX_HYPERBOLIC:
            if rho >= 1.0:
                raise DomainError(f"point outside the unit ball: |z| = {rho:.6g}")
            return float(np.arctanh(rho))
        return rho

    def contains(self, x, slack=1.0e-3) -> bool:
        """Soft truncation: FD stencils anchored on the boundary sphere may
        poke out marginally, which the conditioning rationale tolerates."""
        try:
            return self.geodesic_r(x) <= self.geodesic_radius + slack
        except DomainError:
            return False

    def check_point(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValidationError(f"expected chart point of dim {self.dim}, got shape {x.shape}")
        if not self.contains(x):
            raise DomainError(
                f"point at geodesic radius {self.geodesic_r(x):.4f} outside truncated chart "
                f"(limit {self.geodesic_radius})"
            )
        return x

    def feature_scale(self, x) -> float:
        """Smallest chart length over which the metric varies at x.

        The ball model compresses geodesic scales by 1 - |z|^2 near the
        boundary; FD stencils must shrink accordingly.  Other charts are
        uniformly conditioned.
        """
        if self.kind == COMPLEX_HYPERBOLIC:
            rho2 = float(np.dot(x, x))
            return max(1.0 - rho2, 1.0e-12)
        return 1.0

    def fd_trust_radius(self) -> float:
        """Largest geodesic radius where the fully generic double-FD
        curvature stencil stays conditioned in float64.

        Normal-coordinate charts are uniformly conditioned.  The ball
        model loses the radial coordinate to the 1 - |z|^2 cancellation:
        with the standard steps the generic sectional values drift past
        1e-3 from the closed tensor around radius 5 (measured), so FD
        audits stop there; closed-form paths cover the full chart.
        """
        if self.kind == COMPLEX_HYPERBOLIC:
            return min(self.geodesic_radius, 5.0)
        return self.geodesic_radius


def euclidean(m: int) -> ModelSpace:
    if m < 1:
        raise ValidationError("dimension must be >= 1")
    return ModelSpace(EUCLIDEAN, m, pinching_a=1.0)


def hyperbolic(m: int) -> ModelSpace:
    if m < 2:
        raise ValidationError("hyperbolic model needs dimension >= 2")
    return ModelSpace(HYPERBOLIC, m, pinching_a=1.0)


def complex_hyperbolic(n: int) -> ModelSpace:
    if n < 1:
        raise ValidationError("complex dimension must be >= 1")
    return ModelSpace(COMPLEX_HYPERBOLIC, 2 * n, pinching_a=2.0)


def warped(m: int, curvature_profile: Callable[[float], float],
           geodesic_radius: float = 8.0, grid_step: float = 1.0e-3,
           validate: bool = True) -> ModelSpace:
    """Rotationally symmetric model with radial curvature K(r) <= -1.

    The chart is truncated where the angular stretch (phi(r)/r)^2 would
    push the Gram matrix's unit radial eigenvalue below float resolution
    (the same conditioning rationale that caps sinh charts at radius 8).
    """
    if m < 2:
        raise ValidationError("warped model needs dimension >= 2")
    if validate:
        for r in np.linspace(0.0, geodesic_radius, 65):
            if curvature_profile(float(r)) > -1.0 + 1.0e-9:
                raise ValidationError(
                    f"warp curvature profile must stay <= -1; K({r:.3f}) = {curvature_profile(float(r)):.6g}"
                )
    prof = WarpProfile(curvature_profile, r_max=geodesic_radius + 0.5, grid_step=grid_step)
    cap = geodesic_radius
    eps = np.finfo(float).eps
    for r in np.linspace(0.5, geodesic_radius, 256):
        if (prof.phi(float(r)) / float(r)) ** 2 * eps > 1.0e-3:
            cap = float(r)
            break
    a = float(np.sqrt(max(1.0, -min(curvature_profile(float(r))
                                    for r in np.linspace(0.0, cap, 65)))))
    return ModelSpace(WARPED, m, pinching_a=a,
                      geodesic_radius=min(geodesic_radius, cap), warp=prof)


def standard_warped_quadratic(m: int) -> ModelSpace:
    """The strictly pinched fixture K(r) = -1 - r^2."""
    return warped(m, lambda r: -1.0 - r * r)


# ---------------------------------------------------------------------------
# complex structure
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def _j_matrix(m: int) -> np.ndarray:
    J = np.zeros((m, m))
    for i in range(m // 2):
        J[2 * i + 1, 2 * i] = 1.0
        J[2 * i, 2 * i + 1] = -1.0
    J.setflags(write=False)
    return J


def complex_structure(space: ModelSpace) -> np.ndarray:
    """Chart matrix of J: J(d/dx_i) = d/dy_i, J(d/dy_i) = -d/dx_i."""
    if space.kind != COMPLEX_HYPERBOLIC:
        raise ValidationError(f"{space.kind} space has no complex structure")
    return _j_matrix(space.dim)


def to_complex(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v[0::2] + 1j * v[1::2]


def from_complex(z: np.ndarray) -> np.ndarray:
    out = np.empty(2 * z.size)
    out[0::2] = np.real(z)
    out[1::2] = np.imag(z)
    return out


# ---------------------------------------------------------------------------
# radial profile coefficients with small-radius series
# ---------------------------------------------------------------------------

def _hyp_profile_coeffs(r: float):
    """(a, a', c, c') for g = a I + (1-a) P with a = (sinh r / r)^2, c = (1-a)/r^2."""
    if r < _SERIES_RADIUS:
        r2 = r * r
        a = 1.0 + r2 / 3.0 + 2.0 * r2 * r2 / 45.0
        da = 2.0 * r / 3.0 + 8.0 * r2 * r / 45.0
        c = -(1.0 / 3.0 + 2.0 * r2 / 45.0 + r2 * r2 / 315.0)
        dc = -(4.0 * r / 45.0 + 4.0 * r2 * r / 315.0)
        return a, da, c, dc
    sh, ch = np.sinh(r), np.cosh(r)
    w = sh / r
    a = w * w
    da = 2.0 * w * (ch * r - sh) / (r * r)
    c = (1.0 - a) / (r * r)
    dc = -da / (r * r) - 2.0 * (1.0 - a) / (r * r * r)
    return a, da, c, dc


def _warp_profile_coeffs(space: ModelSpace, r: float):
    prof = space.warp
    if r < 1.0e-4:
        b = -prof.k0() / 6.0
        r2 = r * r
        a = 1.0 + 2.0 * b * r2
        da = 4.0 * b * r
        c = -2.0 * b
        dc = 0.0
        return a, da, c, dc
    p, dp = prof.phi(r), prof.dphi(r)
    w = p / r
    a = w * w
    da = 2.0 * w * (dp * r - p) / (r * r)
    c = (1.0 - a) / (r * r)
    dc = -da / (r * r) - 2.0 * (1.0 - a) / (r * r * r)
    return a, da, c, dc


def _radial_metric(x: np.ndarray, a: float) -> np.ndarray:
    m = x.size
    r2 = float(np.dot(x, x))
    if r2 < 1.0e-24:
        return np.eye(m)
    P = np.outer(x, x) / r2
    return a * np.eye(m) + (1.0 - a) * P


# ---------------------------------------------------------------------------
# complex hyperbolic Hermitian blocks
# ---------------------------------------------------------------------------

def _chn_real_metric(x: np.ndarray) -> np.ndarray:
    m = x.size
    z = to_complex(x)
    rho = float(np.dot(x, x))
    d1 = 1.0 / (1.0 - rho)
    d2 = d1 * d1
    H = d1 * np.eye(z.size, dtype=complex) + d2 * np.outer(np.conj(z), z)
    A, B = H.real, H.imag
    G = np.zeros((m, m))
    xi = np.arange(0, m, 2)
    yi = np.arange(1, m, 2)
    G[np.ix_(xi, xi)] = A
    G[np.ix_(yi, yi)] = A
    G[np.ix_(xi, yi)] = B
    G[np.ix_(yi, xi)] = -B
    return G


def _chn_metric_derivative(x: np.ndarray) -> np.ndarray:
    """dG[c, i, j] = d_c G_ij, hand-differentiated Hermitian blocks."""
    m = x.size
    n = m // 2
    xs = x[0::2]
    ys = x[1::2]
    rho = float(np.dot(x, x))
    d1 = 1.0 / (1.0 - rho)
    d2 = d1 * d1
    d3 = d2 * d1
    eye = np.eye(n)
    ReM = np.outer(xs, xs) + np.outer(ys, ys)
    ImM = np.outer(xs, ys) - np.outer(ys, xs)

    dG = np.zeros((m, m, m))
    xi = np.arange(0, m, 2)
    yi = np.arange(1, m, 2)

    for k in range(n):
        for coord, drho in ((2 * k, 2.0 * xs[k]), (2 * k + 1, 2.0 * ys[k])):
            dd1 = d2 * drho
            dd2 = 2.0 * d3 * drho
            if coord % 2 == 0:  # x_k
                dRe = np.zeros((n, n))
                dRe[k, :] += xs
                dRe[:, k] += xs
                dIm = np.zeros((n, n))
                dIm[k, :] += ys
                dIm[:, k] -= ys
            else:  # y_k
                dRe = np.zeros((n, n))
                dRe[k, :] += ys
                dRe[:, k] += ys
                dIm = np.zeros((n, n))
                dIm[:, k] += xs
                dIm[k, :] -= xs
            dA = dd1 * eye + dd2 * ReM + d2 * dRe
            dB = dd2 * ImM + d2 * dIm
            blk = np.zeros((m, m))
            blk[np.ix_(xi, xi)] = dA
            blk[np.ix_(yi, yi)] = dA
            blk[np.ix_(xi, yi)] = dB
            blk[np.ix_(yi, xi)] = -dB
            dG[coord] = blk
    return dG


# ---------------------------------------------------------------------------
# metric, Christoffels, curvature
# ---------------------------------------------------------------------------

def metric_at(space: ModelSpace, x) -> np.ndarray:
    """Gram matrix of the chart metric at x (symmetric positive definite)."""
    x = space.check_point(x)
    if space.kind == EUCLIDEAN:
        return np.eye(space.dim)
    if space.kind == HYPERBOLIC:
        r = float(np.linalg.norm(x))
        a, _, _, _ = _hyp_profile_coeffs(r)
        return _radial_metric(x, a)
    if space.kind == WARPED:
        r = float(np.linalg.norm(x))
        a, _, _, _ = _warp_profile_coeffs(space, r)
        return _radial_metric(x, a)
    return _chn_real_metric(x)


def inverse_metric_at(space: ModelSpace, x) -> np.ndarray:
    return np.linalg.inv(metric_at(space, x))


def metric_derivative_at(space: ModelSpace, x) -> np.ndarray:
    """Closed-form dG[c, i, j] = d_c G_ij."""
    x = space.check_point(x)
    m = space.dim
    if space.kind == EUCLIDEAN:
        return np.zeros((m, m, m))
    if space.kind == COMPLEX_HYPERBOLIC:
        return _chn_metric_derivative(x)
    r = float(np.linalg.norm(x))
    if r < 1.0e-12:
        return np.zeros((m, m, m))
    coeffs = _hyp_profile_coeffs(r) if space.kind == HYPERBOLIC else _warp_profile_coeffs(space, r)
    a, da, c, dc = coeffs
    xhat = x / r
    eye = np.eye(m)
    dG = np.zeros((m, m, m))
    xx = np.outer(x, x)
    for k in range(m):
        term = da * xhat[k] * eye + dc * xhat[k] * xx
        term += c * (np.outer(eye[k], x) + np.outer(x, eye[k]))
        dG[k] = term
    return dG


def _fd_metric_derivative(space: ModelSpace, x, step: float) -> np.ndarray:
    m = space.dim
    h = step * max(1.0, float(np.linalg.norm(x))) * space.feature_scale(x)
    # shrink, never one-sided: keep the stencil inside the chart
    margin = space.chart_bound() - float(np.linalg.norm(x))
    if margin < h:
        h = max(margin / 2.0, 1.0e-14)
    dG = np.empty((m, m, m))
    for k in range(m):
        e = np.zeros(m)
        e[k] = h
        dG[k] = (metric_at(space, x + e) - metric_at(space, x - e)) / (2.0 * h)
    return dG


def christoffel_at(space: ModelSpace, x, path: str = "closed",
                   step: float = FD_STEP_FIRST) -> np.ndarray:
    """Gamma[a, i, j], symmetric in (i, j) by construction.

    path="closed" differentiates the metric analytically; path="fd" uses
    central differences of ``metric_at`` only.
    """
    x = space.check_point(x)
    if space.kind == EUCLIDEAN:
        m = space.dim
        return np.zeros((m, m, m))
    if path == "closed":
        dG = metric_derivative_at(space, x)
    elif path == "fd":
        dG = _fd_metric_derivative(space, x, step)
    else:
        raise ValidationError(f"unknown christoffel path {path!r}")
    ginv = inverse_metric_at(space, x)
    # Gamma^a_{ij} = 1/2 g^{al} (d_i g_{jl} + d_j g_{il} - d_l g_{ij})
    sym = dG + np.einsum('jil->ijl', dG) - np.einsum('lij->ijl', dG)
    return 0.5 * np.einsum('al,ijl->aij', ginv, sym)


def riemann_closed_at(space: ModelSpace, x) -> np.ndarray:
    """Exact curvature tensor Rp[i,j,k,l] = <R(e_i,e_j)e_k, e_l>.

    Contractions satisfy sec(u, v) = Rp(u, v, u, v) / Gram(u, v); see the
    conventions ledger for the operator sign.
    """
    x = space.check_point(x)
    m = space.dim
    G = metric_at(space, x)
    if space.kind == EUCLIDEAN:
        return np.zeros((m, m, m, m))
    if space.kind == HYPERBOLIC:
        kappa = -1.0
        return kappa * (np.einsum('ik,jl->ijkl', G, G) - np.einsum('jk,il->ijkl', G, G))
    if space.kind == COMPLEX_HYPERBOLIC:
        J = _j_matrix(m)
        W = np.einsum('ai,aj->ij', J, G)  # W[i,j] = <J e_i, e_j>
        return (np.einsum('jk,il->ijkl', G, G) - np.einsum('ik,jl->ijkl', G, G)
                + np.einsum('jk,il->ijkl', W, W) - np.einsum('ik,jl->ijkl', W, W)
                - 2.0 * np.einsum('ij,kl->ijkl', W, W))
    # warped: rotationally symmetric tensor from the two curvature profiles
    r = float(np.linalg.norm(x))
    kt = space.warp.tangential_curvature(r)
    kr = space.warp.radial_curvature(r)
    if r < 1.0e-12:
        kappa = space.warp.k0()
        return kappa * (np.einsum('ik,jl->ijkl', G, G) - np.einsum('jk,il->ijkl', G, G))
    nhat = x / r  # unit radial vector (|nhat|_h = 1 in these charts)
    N = G @ nhat  # radial covector
    T0 = np.einsum('ik,jl->ijkl', G, G) - np.einsum('jk,il->ijkl', G, G)
    GN = np.einsum('ik,j,l->ijkl', G, N, N) + np.einsum('jl,i,k->ijkl', G, N, N) \
        - np.einsum('il,j,k->ijkl', G, N, N) - np.einsum('jk,i,l->ijkl', G, N, N)
    # T0 contracts to +Gram and GN to |u|^2 v_n^2 + |v|^2 u_n^2 - 2<u,v> u_n v_n,
    # so tangential planes give kt and radial planes kr.
    return kt * T0 + (kr - kt) * GN


def riemann_at(space: ModelSpace, x, path: str = "fd",
               step: float = FD_STEP_SECOND) -> np.ndarray:
    """Curvature tensor Rp[i,j,k,l]; path="fd" is the fully generic route."""
    x = space.check_point(x)
    if path == "closed":
        return riemann_closed_at(space, x)
    if path != "fd":
        raise ValidationError(f"unknown riemann path {path!r}")
    m = space.dim
    h = step * max(1.0, float(np.linalg.norm(x))) * space.feature_scale(x)
    margin = space.chart_bound() - float(np.linalg.norm(x))
    if margin < h:
        h = max(margin / 2.0, 1.0e-14)
    dGam = np.empty((m, m, m, m))
    for p in range(m):
        e = np.zeros(m)
        e[p] = h
        gp = christoffel_at(space, x + e, path="fd")
        gm = christoffel_at(space, x - e, path="fd")
        dGam[p] = (gp - gm) / (2.0 * h)
    Gam = christoffel_at(space, x, path="fd")
    t1 = np.einsum('ail,ljk->akij', Gam, Gam)
    Rup = (np.einsum('iajk->akij', dGam) - np.einsum('jaik->akij', dGam)
           + t1 - t1.transpose(0, 1, 3, 2))
    G = metric_at(space, x)
    return -np.einsum('la,akij->ijkl', G, Rup)


def sectional_curvature(space: ModelSpace, x, u, v, path: str = "closed",
                        riemann: Optional[np.ndarray] = None) -> float:
    """Sectional curvature of span{u, v}; basis-independent within tolerance."""
    x = space.check_point(x)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    G = metric_at(space, x)
    uu = u @ G @ u
    vv = v @ G @ v
    uv = u @ G @ v
    gram = uu * vv - uv * uv
    if gram <= 1.0e-12 * max(uu * vv, 1.0e-30):
        raise DegenerateInputError("vectors do not span a 2-plane")
    R = riemann if riemann is not None else riemann_at(space, x, path=path)
    num = np.einsum('ijkl,i,j,k,l->', R, u, v, u, v)
    return float(num / gram)


@dataclass(frozen=True)
class CurvatureAudit:
    """One audited plane: the point, an h-orthonormal basis, the value."""

    point: np.ndarray
    plane: tuple
    sectional: float


def curvature_audit(space: ModelSpace, x, u, v, path: str = "closed") -> CurvatureAudit:
    x = space.check_point(x)
    G = metric_at(space, x)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu = float(np.sqrt(u @ G @ u))
    if nu < 1.0e-12:
        raise DegenerateInputError("zero plane vector")
    u = u / nu
    v = v - (v @ G @ u) * u
    nv = float(np.sqrt(v @ G @ v))
    if nv < 1.0e-9:
        raise DegenerateInputError("vectors do not span a 2-plane")
    v = v / nv
    sec = sectional_curvature(space, x, u, v, path=path)
    return CurvatureAudit(point=x, plane=(u, v), sectional=sec)


def jacobi_curvature_matrix(space: ModelSpace, x, T, frame_perp,
                            riemann: Optional[np.ndarray] = None) -> np.ndarray:
    """K[a,b] = <R(T, E_b)T, E_a> in the given perpendicular frame.

    The scalar Jacobi system in a parallel frame is Y'' = -K(s) Y; for
    sec <= -1 and unit T the matrix is <= -I as a quadratic form.
    """
    x = space.check_point(x)
    T = np.asarray(T, dtype=float)
    E = np.asarray(frame_perp, dtype=float)
    if space.kind == EUCLIDEAN:
        return np.zeros((E.shape[1], E.shape[1]))
    if space.kind == HYPERBOLIC:
        return -np.eye(E.shape[1])
    if space.kind == COMPLEX_HYPERBOLIC:
        G = metric_at(space, x)
        q = E.T @ (G @ (_j_matrix(space.dim) @ T))  # frame components of J T
        return -(np.eye(E.shape[1]) + 3.0 * np.outer(q, q))
    # warped
    r = float(np.linalg.norm(x))
    kt = space.warp.tangential_curvature(r)
    kr = space.warp.radial_curvature(r)
    if r < 1.0e-12:
        return space.warp.k0() * np.eye(E.shape[1])
    G = metric_at(space, x)
    nhat = x / r
    nT = float(T @ G @ nhat)
    N = E.T @ (G @ nhat)
    return kt * np.eye(E.shape[1]) + (kr - kt) * (np.outer(N, N) + nT * nT * np.eye(E.shape[1]))


# ---------------------------------------------------------------------------
# inner-product helpers
# ---------------------------------------------------------------------------

def h_inner(space: ModelSpace, x, u, v) -> float:
    G = metric_at(space, x)
    return float(np.asarray(u) @ G @ np.asarray(v))


def h_norm(space: ModelSpace, x, u) -> float:
    return float(np.sqrt(max(0.0, h_inner(space, x, u, u))))


def orthonormal_frame(space: ModelSpace, x) -> np.ndarray:
    """Columns form an h-orthonormal frame at x (Cholesky of the Gram)."""
    G = metric_at(space, x)
    L = np.linalg.cholesky(G)
    return np.linalg.inv(L).T


def gram_schmidt(space: ModelSpace, x, vectors, against=()) -> np.ndarray:
    """h-orthonormalize ``vectors`` after projecting out ``against``."""
    G = metric_at(space, x)
    out = []
    fixed = [np.asarray(a, dtype=float) for a in against]
    for v in vectors:
        w = np.asarray(v, dtype=float).copy()
        for b in fixed + out:
            w = w - (w @ G @ b) * b
        n = float(np.sqrt(max(0.0, w @ G @ w)))
        if n > 1.0e-8:
            out.append(w / n)
    return np.stack(out, axis=1) if out else np.zeros((space.dim, 0))

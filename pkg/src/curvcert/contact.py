"""Contact geometry of distance spheres on the complex hyperbolic model.

The distance function r(x) = d(p, x) from the fixed base point p and the
complex structure J combine into the unit-norm 1-form

    beta(w) = dr(Jw),

which annihilates grad r, pairs with J grad r to -1 (see the conventions
ledger), and restricts to a contact form on every distance sphere.  Its
differential is controlled by the Hessian of r through d beta(X, Y)
= Hess r(X, JY) - Hess r(Y, JX) (valid because J is parallel), so Levi
positivity on the contact distribution,

    Hess r(X, X) + Hess r(JX, JX) = -d beta(X, JX) >= 2 |X|^2,

is a pinching statement.  On the ball model the Hessian eigenvalues are
explicit: 0 radially, 2 coth(2r) on J grad r, coth(r) on the rest.

Three independent Hessian routes are kept:

* ``christoffel``: analytic second partials of r minus the Christoffel
  contraction (stable at every radius, the default);
* ``closed``: the eigenvalue form above;
* ``geodesic_fd``: a second difference of r along exp_x(tX), which is
  the well-conditioned finite-difference cross-check (chart-axis FD of r
  degenerates near the ball boundary, the geodesic parameterization does
  not).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .conventions import LEVI_PAIRING_SIGN
from .errors import DegenerateInputError, DomainError, ValidationError
from .forms import (KFormField, exterior_derivative, h_norm_covector,
                    multi_indices, index_position, wedge_components)
from .geodesics import distance, exp_map
from .spaces import (COMPLEX_HYPERBOLIC, EUCLIDEAN, HYPERBOLIC, WARPED,
                     ModelSpace, christoffel_at, complex_structure, h_inner,
                     h_norm, gram_schmidt, metric_at)

_TINY = 1.0e-12


# ---------------------------------------------------------------------------
# distance function and its first derivatives
# ---------------------------------------------------------------------------

def distance_function(space: ModelSpace, p, x) -> float:
    """r(x) = d(p, x)."""
    return distance(space, p, x)


def _require_origin(space: ModelSpace, p):
    p = space.check_point(p)
    if float(np.linalg.norm(p)) > _TINY:
        raise ValidationError(
            "closed-form radial calculus is anchored at the chart origin; "
            "move the base point there (one differential structure is fixed once)")
    return p


def dr_covector(space: ModelSpace, p, x) -> np.ndarray:
    """Chart components of dr at x (analytic, base at the origin)."""
    _require_origin(space, p)
    x = space.check_point(x)
    rho = float(np.linalg.norm(x))
    if rho < _TINY:
        raise DomainError("dr undefined at the base point")
    if space.kind == COMPLEX_HYPERBOLIC:
        return x / (rho * (1.0 - rho * rho))
    # radial-arclength charts: r = |x|
    return x / rho


def gradient_r(space: ModelSpace, p, x) -> np.ndarray:
    """grad r, the h-unit radial field."""
    dr = dr_covector(space, p, x)
    G = metric_at(space, x)
    return np.linalg.solve(G, dr)


def d2r_matrix(space: ModelSpace, p, x) -> np.ndarray:
    """Analytic chart second partials of r (not yet covariant)."""
    _require_origin(space, p)
    x = space.check_point(x)
    m = space.dim
    rho = float(np.linalg.norm(x))
    if rho < _TINY:
        raise DomainError("Hess r undefined at the base point")
    if space.kind == COMPLEX_HYPERBOLIC:
        rho2 = rho * rho
        one = 1.0 - rho2
        return (np.eye(m) / (rho * one)
                - np.outer(x, x) * (1.0 - 3.0 * rho2) / (rho ** 3 * one * one))
    return (np.eye(m) - np.outer(x, x) / rho ** 2) / rho


def hessian_r_matrix(space: ModelSpace, p, x, path: str = "christoffel") -> np.ndarray:
    """Hess r as a bilinear form: Hess_ij = d_i d_j r - Gamma^a_ij (dr)_a."""
    x = space.check_point(x)
    if path == "christoffel":
        dr = dr_covector(space, p, x)
        Gam = christoffel_at(space, x, path="closed")
        return d2r_matrix(space, p, x) - np.einsum('aij,a->ij', Gam, dr)
    if path == "closed":
        return _hessian_closed(space, p, x)
    raise ValidationError(f"unknown hessian path {path!r}")


def _hessian_closed(space: ModelSpace, p, x) -> np.ndarray:
    _require_origin(space, p)
    r = distance(space, p, x)
    G = metric_at(space, x)
    q = dr_covector(space, p, x)  # dr, also G @ grad
    if space.kind == EUCLIDEAN:
        return (G - np.outer(q, q)) / r
    if space.kind == HYPERBOLIC:
        return (G - np.outer(q, q)) / np.tanh(r)
    if space.kind == WARPED:
        prof = space.warp
        return (G - np.outer(q, q)) * (prof.dphi(r) / prof.phi(r))
    # complex hyperbolic: coth r on the contact block, 2 coth 2r on J grad r
    J = complex_structure(space)
    b = -(J.T @ q)  # covector of <J grad r, .>
    coth = 1.0 / np.tanh(r)
    coth2 = 2.0 / np.tanh(2.0 * r)
    return coth * (G - np.outer(q, q) - np.outer(b, b)) + coth2 * np.outer(b, b)


def hessian_r(space: ModelSpace, p, x, X, path: str = "christoffel",
              fd_step: float = 1.0e-3, check_tangent: bool = True) -> float:
    """Hess r(X, X) for X tangent to the distance sphere through x."""
    x = space.check_point(x)
    X = np.asarray(X, dtype=float)
    nx = h_norm(space, x, X)
    if nx < _TINY:
        raise DegenerateInputError("zero test vector")
    if check_tangent:
        dr = dr_covector(space, p, x)
        if abs(float(dr @ X)) > 1.0e-6 * nx:
            raise ValidationError(
                "X must be tangent to the distance sphere (dr(X) = 0); the "
                "pinching statement concerns sphere-tangent directions")
    if path == "geodesic_fd":
        h = fd_step / max(1.0, nx)
        r0 = distance(space, p, x)
        rp = distance(space, p, exp_map(space, x, h * X))
        rm = distance(space, p, exp_map(space, x, -h * X))
        return float((rp - 2.0 * r0 + rm) / (h * h))
    H = hessian_r_matrix(space, p, x, path=path)
    return float(X @ H @ X)


# ---------------------------------------------------------------------------
# the contact form beta = J o dr
# ---------------------------------------------------------------------------

def beta_covector(space: ModelSpace, p, x) -> np.ndarray:
    """Chart components of beta(w) = dr(Jw); h-norm 1 away from the base."""
    J = complex_structure(space)
    dr = dr_covector(space, p, x)
    return J.T @ dr


def beta_field(space: ModelSpace, p) -> KFormField:
    _require_origin(space, p)
    p = np.asarray(p, dtype=float)
    return KFormField(degree=1, dim=space.dim,
                      components=lambda x: beta_covector(space, p, x),
                      label="beta")


def beta_norm(space: ModelSpace, p, x) -> float:
    return h_norm_covector(space, x, beta_covector(space, p, x))


def dbeta_via_hessian(space: ModelSpace, p, x) -> np.ndarray:
    """Components of d beta from d beta(e_i, e_j) = Hess(e_i, J e_j) -
    Hess(e_j, J e_i); exact for a parallel J."""
    J = complex_structure(space)
    H = hessian_r_matrix(space, p, x, path="christoffel")
    D = H @ J
    D = D - D.T
    m = space.dim
    idx = multi_indices(m, 2)
    return np.array([D[i, j] for (i, j) in idx])


def dbeta_fd(space: ModelSpace, p, x, step: float = 1.0e-4) -> np.ndarray:
    """Finite-difference d beta (generic dual path, moderate radii)."""
    f = beta_field(space, p)
    d = exterior_derivative(f, step=step, space=space)
    return d.comps(x)


def levi_positivity(space: ModelSpace, p, x, X, path: str = "christoffel") -> float:
    """Hess r(X, X) + Hess r(JX, JX) for X in the contact distribution.

    Equals LEVI_PAIRING_SIGN * d beta(X, JX) and is bounded below by
    2 |X|^2 when sec <= -1.
    """
    x = space.check_point(x)
    X = np.asarray(X, dtype=float)
    J = complex_structure(space)
    grad = gradient_r(space, p, x)
    nx = h_norm(space, x, X)
    if nx < _TINY:
        raise DegenerateInputError("zero test vector")
    if abs(h_inner(space, x, X, grad)) > 1.0e-6 * nx or \
       abs(h_inner(space, x, X, J @ grad)) > 1.0e-6 * nx:
        raise ValidationError("X must lie in the contact distribution "
                              "(orthogonal to grad r and J grad r)")
    H = hessian_r_matrix(space, p, x, path=path)
    JX = J @ X
    return float(X @ H @ X + JX @ H @ JX)


def levi_vs_dbeta_residual(space: ModelSpace, p, x, X, step: float = 1.0e-4) -> float:
    """|levi - sign * dbeta_fd(X, JX)|: the dual-path consistency check."""
    J = complex_structure(space)
    levi = levi_positivity(space, p, x, X)
    comps = dbeta_fd(space, p, x, step=step)
    idx = index_position(space.dim, 2)
    JX = J @ np.asarray(X, dtype=float)
    val = 0.0
    Xv = np.asarray(X, dtype=float)
    # evaluate the 2-form on (X, JX) from components
    for (i, j), pos in idx.items():
        val += comps[pos] * (Xv[i] * JX[j] - Xv[j] * JX[i])
    return abs(levi - LEVI_PAIRING_SIGN * val)


def grad_beta_operator_norm(space: ModelSpace, p, x, X) -> float:
    """|grad_X beta|_h = |Hess r(X, J .)|_h, the equicontinuity quantity.

    With pinched curvature it is bounded by the upper pinching constant
    times |X| for sphere-tangent X at large radius.
    """
    J = complex_structure(space)
    H = hessian_r_matrix(space, p, x, path="christoffel")
    c = J.T @ (H @ np.asarray(X, dtype=float))
    return h_norm_covector(space, x, c)


# ---------------------------------------------------------------------------
# sphere frames and the contact defect
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SphereFrame:
    """h-orthonormal tangent frame of the distance sphere at x.

    Columns of ``frame``: [J grad r, X_2, J X_2, X_3, J X_3, ...] for the
    complex kinds, all orthogonal to grad r.
    """

    point: np.ndarray
    grad_r: np.ndarray
    frame: np.ndarray

    @property
    def contact(self) -> np.ndarray:
        return self.frame[:, 1:]


def sphere_frame(space: ModelSpace, p, x, rng: Optional[np.random.Generator] = None) -> SphereFrame:
    x = space.check_point(x)
    grad = gradient_r(space, p, x)
    J = complex_structure(space)
    cols = [J @ grad]
    m = space.dim
    n_pairs = (m - 2) // 2
    rng = rng or np.random.default_rng(0)
    G = metric_at(space, x)
    attempts = 0
    while len(cols) < m - 1:
        cand = rng.normal(size=m) if attempts else np.eye(m)[len(cols) % m]
        attempts += 1
        if attempts > 50:
            raise DegenerateInputError("sphere frame construction failed")
        w = cand.astype(float)
        for b in [grad] + cols:
            w = w - (w @ G @ b) * b / (b @ G @ b)
        nw = float(np.sqrt(max(0.0, w @ G @ w)))
        if nw < 1.0e-6:
            continue
        w = w / nw
        cols.append(w)
        if len(cols) < m - 1:
            jw = J @ w
            # orthogonal to everything so far by construction; renormalize
            jw = jw / float(np.sqrt(jw @ G @ jw))
            cols.append(jw)
    F = np.stack(cols, axis=1)
    return SphereFrame(point=x, grad_r=grad, frame=F)


def contact_defect(space: ModelSpace, p, r: float, n_samples: int = 64,
                   seed: int = 3, use_fd_dbeta: bool = False):
    """min over sphere samples of |beta ^ (d beta)^{n-1}| on sphere frames.

    A strictly positive value certifies contact nondegeneracy at radius
    r.  d beta comes from the Hessian identity by default (stable at all
    radii); the FD route is for moderate-radius cross-checks.
    """
    if space.kind != COMPLEX_HYPERBOLIC:
        raise ValidationError("contact defect needs the complex kind")
    if not (0.0 < r <= space.geodesic_radius):
        raise ValidationError("radius outside the certified range")
    from . import sampling
    from .forms import pullback_linear
    pts, _ = sampling.sphere_points(space, n_samples, seed=seed, radius=r)
    n = space.complex_dim
    dim_s = 2 * n - 1
    best = np.inf
    argmin = None
    for x in pts:
        fr = sphere_frame(space, p, x)
        beta_c = beta_covector(space, p, x)
        b_frame = fr.frame.T @ beta_c  # beta evaluated on the frame vectors
        if n == 1:
            val = abs(float(b_frame[0]))
        else:
            comps2 = dbeta_fd(space, p, x) if use_fd_dbeta else dbeta_via_hessian(space, p, x)
            db_frame = pullback_linear(comps2, fr.frame, 2)  # dbeta on frame pairs
            cur = b_frame
            cur_deg = 1
            for _ in range(n - 1):
                cur = wedge_components(cur, db_frame, dim_s, cur_deg, 2)
                cur_deg += 2
            val = abs(float(cur[0]))  # top coefficient on the ordered frame
        if val < best:
            best = val
            argmin = x
    return float(best), argmin


def kaehler_form(space: ModelSpace) -> KFormField:
    """The fundamental 2-form omega(X, Y) = h(JX, Y); closed, constant norm."""
    J = complex_structure(space)
    m = space.dim
    idx = multi_indices(m, 2)

    def comps(x):
        G = metric_at(space, x)
        W = J.T @ G  # W[i, j] = <J e_i, e_j> = omega(e_i, e_j)
        return np.array([W[i, j] for (i, j) in idx])

    return KFormField(degree=2, dim=m, components=comps, label="omega")

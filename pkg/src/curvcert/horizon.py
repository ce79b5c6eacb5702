"""The horizon chart and convergence of sphere-restricted contact forms.

A fixed differential structure on the boundary sphere comes from the
compactifying map F_p(v) = exp_p(v / (1 - |v|)) on the closed unit ball:
the sphere of chart radius v = r/(1+r) is the geodesic sphere of radius
r, and rescaling to the unit sphere identifies every geodesic sphere
with one parameter sphere S^{m-1}.  The parameter sphere carries two
stereographic patches (poles +/- e_m) whose overlap is audited.

Restricting the unit-norm contact form to spheres of growing radius and
pulling back to the parameter sphere stretches coefficients by the
sphere's metric growth, so the family is renormalized by exp(-a r) with
a the upper pinching constant before differencing.  On the ball model
the normalized family is exactly proportional to the standard contact
form of S^{2n-1} with coefficient (1 - exp(-4r))/4, so successive
sup-differences decay geometrically and the extrapolated limit matches
the standard form after one global scale fit.  The report records the
decay table, the extrapolated limit, the Levi matrices of its
differential on the contact planes, and equicontinuity statistics; a
non-monotone difference table produces a FAIL report, not an exception.

Numerical note: coefficients are evaluated parametrically in (r, u), not
through chart points near the ball boundary, where float64 cannot hold
the radial coordinate to better than eps * cosh(r)^2.  The generic
chart-point route is kept for arbitrary forms and cross-validated at
moderate radius.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .conventions import LEVI_PAIRING_SIGN
from .errors import DomainError, ValidationError
from .forms import (KFormField, exterior_derivative, multi_indices,
                    pullback_linear)
from .sampling import disk_points, sphere_points
from .spaces import COMPLEX_HYPERBOLIC, ModelSpace, complex_structure
from . import contact as ct

_TINY = 1.0e-12


# ---------------------------------------------------------------------------
# the compactifying chart
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HorizonChart:
    """F_p: open unit ball -> chart, v -> exp_p(v / (1 - |v|))."""

    space: ModelSpace
    center: np.ndarray

    def __post_init__(self):
        c = self.space.check_point(self.center)
        if float(np.linalg.norm(c)) > _TINY:
            raise ValidationError("the horizon chart is anchored at the origin")
        object.__setattr__(self, "center", c)

    def to_chart(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        nv = float(np.linalg.norm(v))
        if nv >= 1.0:
            raise DomainError("|v| must be < 1 (the unit sphere is the horizon)")
        if nv < _TINY:
            return self.center.copy()
        r = nv / (1.0 - nv)
        return _radial_point(self.space, r, v / nv)

    def from_chart(self, x) -> np.ndarray:
        x = self.space.check_point(x)
        r = self.space.geodesic_r(x)
        if r < _TINY:
            return np.zeros(self.space.dim)
        u = x / float(np.linalg.norm(x))
        return (r / (1.0 + r)) * u

    def sphere_parameter_radius(self, r: float) -> float:
        return r / (1.0 + r)


def _radial_point(space: ModelSpace, r: float, u: np.ndarray) -> np.ndarray:
    if r > space.geodesic_radius + 1e-9:
        raise DomainError(f"radius {r:.3f} outside the truncated chart")
    if space.kind == COMPLEX_HYPERBOLIC:
        return float(np.tanh(r)) * u
    return r * u


# ---------------------------------------------------------------------------
# stereographic patches of the parameter sphere
# ---------------------------------------------------------------------------

def stereographic_point(sign: int, xi: np.ndarray) -> np.ndarray:
    """Inverse stereographic map R^{m-1} -> S^{m-1} from the pole sign*e_m."""
    xi = np.asarray(xi, dtype=float)
    q = float(np.dot(xi, xi))
    D = 1.0 + q
    return np.append(2.0 * xi / D, sign * (q - 1.0) / D)


def stereographic_jacobian(sign: int, xi: np.ndarray) -> np.ndarray:
    """du/dxi, shape (m, m-1)."""
    xi = np.asarray(xi, dtype=float)
    d = xi.size
    q = float(np.dot(xi, xi))
    D = 1.0 + q
    top = 2.0 * np.eye(d) / D - 4.0 * np.outer(xi, xi) / (D * D)
    bottom = sign * 4.0 * xi / (D * D)
    return np.vstack([top, bottom[None, :]])


def patch_transition(xi: np.ndarray) -> np.ndarray:
    """Coordinates of the same sphere point in the opposite patch."""
    q = float(np.dot(xi, xi))
    if q < _TINY:
        raise DomainError("transition undefined at the patch center")
    return np.asarray(xi, dtype=float) / q


# ---------------------------------------------------------------------------
# pullbacks to the parameter sphere
# ---------------------------------------------------------------------------

def horizon_pullback(space: ModelSpace, p, r: float, form: Optional[KFormField] = None,
                     patch_sign: int = 1) -> KFormField:
    """Pull a form restricted to the geodesic r-sphere back to a patch chart.

    form=None selects the model contact form beta = J o dr through the
    cancellation-free parametric route (required beyond moderate radius);
    any explicit form goes through chart points and the chain rule.
    """
    ct._require_origin(space, p)
    if not (0.0 < r <= space.geodesic_radius + 1e-9):
        raise ValidationError("radius outside the truncated chart")
    m = space.dim
    scale = float(np.tanh(r)) if space.kind == COMPLEX_HYPERBOLIC else r

    if form is None:
        if space.kind != COMPLEX_HYPERBOLIC:
            raise ValidationError("the model contact form needs the complex kind")
        J = complex_structure(space)
        sinhcosh = float(np.sinh(r) * np.cosh(r))

        def comps(xi):
            u = stereographic_point(patch_sign, xi)
            U = stereographic_jacobian(patch_sign, xi)
            return sinhcosh * (u @ (J @ U))

        return KFormField(degree=1, dim=m - 1, components=comps,
                          label=f"beta|sphere(r={r:g})")

    def comps_generic(xi):
        u = stereographic_point(patch_sign, xi)
        U = stereographic_jacobian(patch_sign, xi)
        x = _radial_point(space, r, u)
        jac = scale * U
        return pullback_linear(form.comps(x), jac, form.degree)

    return KFormField(degree=form.degree, dim=m - 1, components=comps_generic,
                      label=f"{form.label}|sphere(r={r:g})")


def normalized_beta_pullback(space: ModelSpace, r: float, patch_sign: int = 1,
                             rate: Optional[float] = None) -> KFormField:
    """exp(-rate * r) times the pulled-back contact form (rate defaults to
    the upper pinching constant)."""
    rate = space.pinching_a if rate is None else rate
    raw = horizon_pullback(space, np.zeros(space.dim), r, form=None,
                           patch_sign=patch_sign)
    damp = float(np.exp(-rate * r))

    def comps(xi):
        return damp * raw.comps(xi)

    return KFormField(degree=1, dim=space.dim - 1, components=comps,
                      label=f"normalized {raw.label}")


def standard_contact_form(space: ModelSpace, patch_sign: int = 1) -> KFormField:
    """The standard contact form of S^{2n-1}, alpha(w) = <Ju, w>, on a patch."""
    J = complex_structure(space)
    m = space.dim

    def comps(xi):
        u = stereographic_point(patch_sign, xi)
        U = stereographic_jacobian(patch_sign, xi)
        return (J @ u) @ U

    return KFormField(degree=1, dim=m - 1, components=comps, label="alpha_std")


def overlap_audit(space: ModelSpace, r: float, n_samples: int = 40,
                  seed: int = 5) -> float:
    """Worst mismatch of the two patch representations on the overlap ring."""
    d = space.dim - 1
    rng = np.random.default_rng(seed)
    worst = 0.0
    f_plus = horizon_pullback(space, np.zeros(space.dim), r, patch_sign=1)
    f_minus = horizon_pullback(space, np.zeros(space.dim), r, patch_sign=-1)
    for _ in range(n_samples):
        xi = rng.normal(size=d)
        xi *= (0.7 + 0.6 * rng.random()) / max(float(np.linalg.norm(xi)), 1e-12)
        xi2 = patch_transition(xi)
        q = float(np.dot(xi, xi))
        Jt = np.eye(d) / q - 2.0 * np.outer(xi, xi) / (q * q)
        lhs = f_plus.comps(xi)
        rhs = Jt.T @ f_minus.comps(xi2)
        scale = max(1.0, float(np.linalg.norm(lhs)))
        worst = max(worst, float(np.linalg.norm(lhs - rhs)) / scale)
    return worst


# ---------------------------------------------------------------------------
# the convergence report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HorizonReport:
    """Monotone-Cauchy table and extrapolated boundary data on the r-grid."""

    r_grid: np.ndarray
    sup_norms: np.ndarray            # per r, of the normalized pullback
    sup_diffs: np.ndarray            # between consecutive r
    diffs_strictly_decreasing: bool
    decay_ratios: np.ndarray
    scale_fit: float                 # c with c * beta_inf ~ alpha_std
    fit_discrepancy: float
    levi_eigen_min: float
    levi_eigen_max: float
    levi_symmetry_defect: float
    n_levi_samples: int
    equicontinuity_sup: np.ndarray   # per r: sup |grad_X beta| / |X| on sphere samples
    patch_derivative_sup: np.ndarray  # per r: sup patch-FD derivative of normalized pullback
    passed: bool
    failure_reason: str = ""


def _limit_field(space: ModelSpace, r1: float, r2: float, q: float,
                 patch_sign: int, rate: Optional[float]) -> KFormField:
    """Geometric extrapolation of the normalized family from its last two rows."""
    f1 = normalized_beta_pullback(space, r1, patch_sign, rate)
    f2 = normalized_beta_pullback(space, r2, patch_sign, rate)
    gain = q / (1.0 - q)

    def comps(xi):
        b2 = f2.comps(xi)
        return b2 + gain * (b2 - f1.comps(xi))

    return KFormField(degree=1, dim=space.dim - 1, components=comps,
                      label="beta_infinity")


def _levi_matrix_at(space: ModelSpace, beta_inf: KFormField, xi,
                    patch_sign: int, fd_step: float = 1.0e-5):
    """Levi matrix of d(beta_inf) on the contact plane at u(xi)."""
    m = space.dim
    J = complex_structure(space)
    u = stereographic_point(patch_sign, xi)
    U = stereographic_jacobian(patch_sign, xi)
    alpha_row = (J @ u) @ U  # alpha_std on patch directions
    # contact plane: patch combinations annihilated by alpha
    _, _, Vt = np.linalg.svd(alpha_row[None, :])
    null = Vt[1:]            # (m-2) patch combos spanning the contact plane
    d_beta = exterior_derivative(beta_inf, step=fd_step)
    comps2 = d_beta.comps(np.asarray(xi, dtype=float))
    idx = multi_indices(m - 1, 2)

    def eval2(vpatch, wpatch):
        acc = 0.0
        for pos, (i, j) in enumerate(idx):
            acc += comps2[pos] * (vpatch[i] * wpatch[j] - vpatch[j] * wpatch[i])
        return acc

    k = null.shape[0]
    L = np.empty((k, k))
    patch_of = []
    for a in range(k):
        w_amb = U @ null[a]
        jw = J @ w_amb
        d, *_ = np.linalg.lstsq(U, jw, rcond=None)
        patch_of.append(d)
    for a in range(k):
        for b in range(k):
            L[a, b] = LEVI_PAIRING_SIGN * eval2(null[a], patch_of[b])
    return L


def horizon_limit_report(space: ModelSpace, p, r_grid, n_samples: int = 120,
                         seed: int = 9, rate: Optional[float] = None,
                         n_levi: int = 200, equicontinuity_slack: float = 1.0e-3
                         ) -> HorizonReport:
    """Convergence table, extrapolated limit, Levi data and equicontinuity.

    Non-monotone sup-differences mark the report FAILED rather than
    raising; the table is still returned for inspection.
    """
    if space.kind != COMPLEX_HYPERBOLIC:
        raise ValidationError("the horizon report needs the complex kind")
    ct._require_origin(space, p)
    r_grid = np.asarray(sorted(float(r) for r in r_grid))
    if r_grid.size < 3 or r_grid[0] < 2.0 - 1e-9 or r_grid[-1] > space.geodesic_radius + 1e-9:
        raise ValidationError("need an increasing grid of at least 3 radii in [2, r_max]")
    m = space.dim
    d = m - 1

    xi_samples = disk_points(max(8, n_samples // 2), seed=seed, dim=d, rho_max=0.95)
    patches = (1, -1)

    tables = []
    deriv_sups = []
    equi_sups = []
    for r in r_grid:
        rows = []
        dsup = 0.0
        for sign in patches:
            f = normalized_beta_pullback(space, float(r), sign, rate)
            for xi in xi_samples:
                rows.append(f.comps(xi))
                # patch-FD derivative of the normalized coefficients
                h = 1.0e-5
                for j in range(d):
                    e = np.zeros(d)
                    e[j] = h
                    dj = (f.comps(xi + e) - f.comps(xi - e)) / (2 * h)
                    dsup = max(dsup, float(np.max(np.abs(dj))))
        tables.append(np.asarray(rows))
        deriv_sups.append(dsup)

        # covariant equicontinuity bound on sphere samples at this radius
        pts, _ = sphere_points(space, 24, seed=seed + 1, radius=float(r))
        sup_ratio = 0.0
        for x in pts:
            fr = ct.sphere_frame(space, p, x)
            for col in range(fr.frame.shape[1]):
                X = fr.frame[:, col]
                sup_ratio = max(sup_ratio, ct.grad_beta_operator_norm(space, p, x, X))
        equi_sups.append(sup_ratio)

    tables = np.asarray(tables)
    sup_norms = np.array([float(np.max(np.abs(t))) for t in tables])
    sup_diffs = np.array([float(np.max(np.abs(tables[i + 1] - tables[i])))
                          for i in range(len(r_grid) - 1)])
    decreasing = bool(np.all(np.diff(sup_diffs) < 0.0))
    ratios = sup_diffs[1:] / np.maximum(sup_diffs[:-1], 1e-300)

    q = float(np.clip(ratios[-1] if ratios.size else 0.5, 0.0, 0.9))
    beta_inf = _limit_field(space, float(r_grid[-2]), float(r_grid[-1]), q, 1, rate)

    alpha = standard_contact_form(space, 1)
    A = np.asarray([alpha.comps(xi) for xi in xi_samples])
    B = np.asarray([beta_inf.comps(xi) for xi in xi_samples])
    denom = float(np.sum(B * B))
    c = float(np.sum(A * B) / denom) if denom > 0 else 0.0
    fit_disc = float(np.max(np.abs(c * B - A)) / max(1e-300, np.max(np.abs(A))))

    # Levi matrices of the limit (skip for n = 1: no contact plane)
    lev_min, lev_max, lev_sym = np.inf, -np.inf, 0.0
    n_levi_done = 0
    if space.complex_dim >= 2:
        levi_xis = disk_points(n_levi, seed=seed + 2, dim=d, rho_max=0.9)
        for xi in levi_xis:
            L = _levi_matrix_at(space, beta_inf, xi, 1)
            Ls = 0.5 * (L + L.T)
            lev_sym = max(lev_sym, float(np.max(np.abs(L - L.T))))
            w = np.linalg.eigvalsh(Ls)
            lev_min = min(lev_min, float(w[0]))
            lev_max = max(lev_max, float(w[-1]))
            n_levi_done += 1
    else:
        lev_min = lev_max = np.nan

    passed = True
    reason = ""
    if not decreasing:
        passed = False
        reason = "sup-differences of the normalized pullbacks are not strictly decreasing"
    elif space.complex_dim >= 2 and not (lev_min > 0.0):
        passed = False
        reason = f"extrapolated Levi matrix not positive definite (min eig {lev_min:.3e})"
    equi_bound = space.pinching_a * (1.0 + equicontinuity_slack)
    if passed and max(equi_sups) > equi_bound:
        passed = False
        reason = (f"equicontinuity proxy sup |grad beta| = {max(equi_sups):.6f} "
                  f"exceeds a(1+tol) = {equi_bound:.6f}")

    return HorizonReport(
        r_grid=r_grid, sup_norms=sup_norms, sup_diffs=sup_diffs,
        diffs_strictly_decreasing=decreasing, decay_ratios=ratios,
        scale_fit=c, fit_discrepancy=fit_disc,
        levi_eigen_min=float(lev_min), levi_eigen_max=float(lev_max),
        levi_symmetry_defect=float(lev_sym), n_levi_samples=n_levi_done,
        equicontinuity_sup=np.asarray(equi_sups),
        patch_derivative_sup=np.asarray(deriv_sups),
        passed=passed, failure_reason=reason)

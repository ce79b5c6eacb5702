import numpy as np
import pytest

import curvcert as cc
from curvcert import horizon as hz
from curvcert.errors import DomainError, ValidationError


# ---------------------------------------------------------------------------
# the compactifying chart
# ---------------------------------------------------------------------------

def test_horizon_chart_roundtrip(ch2, rng):
    chart = hz.HorizonChart(ch2, np.zeros(4))
    for _ in range(30):
        v = rng.normal(size=4)
        v = v / np.linalg.norm(v) * (0.85 * rng.random())
        x = chart.to_chart(v)
        assert np.max(np.abs(chart.from_chart(x) - v)) < 1e-9


def test_horizon_chart_radial_monotone(ch2):
    chart = hz.HorizonChart(ch2, np.zeros(4))
    u = np.array([1.0, 0.0, 0.0, 0.0])
    radii = [ch2.geodesic_r(chart.to_chart(t * u)) for t in (0.1, 0.4, 0.7, 0.85)]
    assert all(a < b for a, b in zip(radii, radii[1:]))


def test_horizon_chart_guards(ch2):
    chart = hz.HorizonChart(ch2, np.zeros(4))
    with pytest.raises(DomainError):
        chart.to_chart(np.array([1.0, 0.0, 0.0, 0.0]))
    with pytest.raises(ValidationError):
        hz.HorizonChart(ch2, np.array([0.3, 0.0, 0.0, 0.0]))


# ---------------------------------------------------------------------------
# patches
# ---------------------------------------------------------------------------

def test_stereographic_inverse_pair(rng):
    for sign in (1, -1):
        xi = rng.normal(size=3) * 0.8
        u = hz.stereographic_point(sign, xi)
        assert abs(np.linalg.norm(u) - 1.0) < 1e-12
        U = hz.stereographic_jacobian(sign, xi)
        assert np.max(np.abs(u @ U)) < 1e-12  # tangency to the sphere


def test_patch_transition_consistency(rng):
    xi = rng.normal(size=3)
    xi = xi / np.linalg.norm(xi) * 1.1
    u1 = hz.stereographic_point(1, xi)
    u2 = hz.stereographic_point(-1, hz.patch_transition(xi))
    assert np.max(np.abs(u1 - u2)) < 1e-12


def test_overlap_audit_small(ch2):
    assert hz.overlap_audit(ch2, 2.5, n_samples=20) < 1e-12


# ---------------------------------------------------------------------------
# pullbacks
# ---------------------------------------------------------------------------

def test_pullback_proportional_to_standard_form(ch2, rng):
    alpha = hz.standard_contact_form(ch2, 1)
    for r in (2.0, 5.0):
        f = hz.horizon_pullback(ch2, np.zeros(4), r)
        xi = rng.normal(size=3) * 0.5
        ratio = f.comps(xi) / alpha.comps(xi)
        assert np.max(np.abs(ratio + np.sinh(r) * np.cosh(r))) < 1e-6 * np.sinh(r) * np.cosh(r)


def test_pullback_generic_path_matches_stable(ch2, rng):
    beta = cc.beta_field(ch2, np.zeros(4))
    f_stable = hz.horizon_pullback(ch2, np.zeros(4), 3.0)
    f_generic = hz.horizon_pullback(ch2, np.zeros(4), 3.0, form=beta)
    for _ in range(5):
        xi = rng.normal(size=3) * 0.6
        assert np.max(np.abs(f_stable.comps(xi) - f_generic.comps(xi))) < 1e-8


def test_pullback_ch1_angular_form(ch1, rng):
    # the circle case degenerates to the angular form up to normalization
    alpha = hz.standard_contact_form(ch1, 1)
    f = hz.horizon_pullback(ch1, np.zeros(2), 3.0)
    for _ in range(5):
        xi = rng.normal(size=1)
        ratio = f.comps(xi)[0] / alpha.comps(xi)[0]
        assert abs(ratio + np.sinh(3.0) * np.cosh(3.0)) < 1e-8 * abs(ratio)


def test_pullback_rotation_equivariance(ch2, rng):
    # beta restricted to the sphere is invariant under the isometric
    # block rotation exp(theta J)
    J = cc.complex_structure(ch2)
    theta = 0.6
    R = np.cos(theta) * np.eye(4) + np.sin(theta) * J
    r = 3.0
    u = rng.normal(size=4)
    u /= np.linalg.norm(u)
    w = rng.normal(size=4)
    b1 = cc.beta_covector(ch2, np.zeros(4), np.tanh(r) * u) @ w
    b2 = cc.beta_covector(ch2, np.zeros(4), np.tanh(r) * (R @ u)) @ (R @ w)
    assert abs(b1 - b2) < 1e-6


def test_normalized_family_monotone_cauchy(ch2, rng):
    # pullbacks at consecutive radii approach each other monotonically
    xi_set = [rng.normal(size=3) * 0.5 for _ in range(10)]
    diffs = []
    grid = [2.0, 3.0, 4.0, 5.0]
    for r1, r2 in zip(grid, grid[1:]):
        f1 = hz.normalized_beta_pullback(ch2, r1)
        f2 = hz.normalized_beta_pullback(ch2, r2)
        diffs.append(max(np.max(np.abs(f2.comps(xi) - f1.comps(xi))) for xi in xi_set))
    assert all(b < a for a, b in zip(diffs, diffs[1:]))
    assert all(b < a / 2.0 for a, b in zip(diffs, diffs[1:]))  # factor >= 2 decay


# ---------------------------------------------------------------------------
# the limit report
# ---------------------------------------------------------------------------

def test_horizon_report_passes(ch2):
    rep = hz.horizon_limit_report(ch2, np.zeros(4), np.arange(2.0, 8.5, 1.0),
                                  n_samples=40, n_levi=40, seed=12)
    assert rep.passed
    assert rep.diffs_strictly_decreasing
    assert np.all(rep.decay_ratios < 0.5)
    assert rep.fit_discrepancy < 1e-2
    assert rep.levi_eigen_min > 0.0
    assert rep.levi_symmetry_defect < 1e-8
    assert np.all(rep.equicontinuity_sup <= ch2.pinching_a * (1 + 1e-3))


def test_horizon_report_ch1_skips_levi(ch1):
    rep = hz.horizon_limit_report(ch1, np.zeros(2), [2.0, 3.0, 4.0, 5.0],
                                  n_samples=20, seed=4)
    assert rep.passed
    assert rep.n_levi_samples == 0
    assert np.isnan(rep.levi_eigen_min)


def test_horizon_report_fails_without_normalization(ch2):
    # rate 0 disables the attenuation: the raw pullbacks diverge and the
    # report must FAIL (not raise)
    rep = hz.horizon_limit_report(ch2, np.zeros(4), [2.0, 3.0, 4.0, 5.0],
                                  n_samples=20, rate=0.0, seed=4)
    assert not rep.passed
    assert "not strictly decreasing" in rep.failure_reason


def test_horizon_report_guards(ch2, hyp3):
    with pytest.raises(ValidationError):
        hz.horizon_limit_report(hyp3, np.zeros(3), [2, 3, 4])
    with pytest.raises(ValidationError):
        hz.horizon_limit_report(ch2, np.zeros(4), [2.0, 3.0])  # too short


def test_scale_fit_matches_model(ch2):
    # the normalized limit is -(1/4) alpha_std, so the fitted scale is -4
    rep = hz.horizon_limit_report(ch2, np.zeros(4), [2.0, 4.0, 6.0, 8.0],
                                  n_samples=30, n_levi=10, seed=2)
    assert abs(rep.scale_fit + 4.0) < 1e-6

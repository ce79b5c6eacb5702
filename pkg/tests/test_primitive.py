import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import curvcert as cc
from curvcert import sampling
from curvcert.errors import ClosednessError, QuadratureError, ValidationError
from curvcert.forms import KFormField, constant_form, coordinate_form, h_norm_form
from curvcert.primitive import (PrimitiveProblem, bound_certificate,
                                closedness_audit, exactness_audit,
                                kaehler_primitive, primitive_components_at,
                                primitive_field, pullback_err_norm,
                                sinh_ratio_bound)

HSET = settings(max_examples=30, deadline=None, derandomize=True)


def _problem(space, psi, order=32):
    return PrimitiveProblem(space=space, base=np.zeros(space.dim), psi=psi,
                            quadrature_order=order)


# ---------------------------------------------------------------------------
# closed-form oracles
# ---------------------------------------------------------------------------

def test_euclidean_constant_two_form(eu3, rng):
    # the flat radial operator gives (x1 dx2 - x2 dx1)/2 for dx1 ^ dx2
    eu2 = cc.euclidean(2)
    prob = _problem(eu2, coordinate_form(2, (0, 1)))
    for _ in range(5):
        x = rng.normal(size=2)
        comps = primitive_components_at(prob, x)
        assert np.max(np.abs(comps - np.array([-x[1], x[0]]) / 2.0)) < 1e-13


def test_zero_at_base(hyp2):
    prob = _problem(hyp2, cc.fixture_form(hyp2, 2))
    assert np.array_equal(primitive_components_at(prob, np.zeros(2)), np.zeros(2))


def test_hyperbolic_area_closed_form(hyp2, rng):
    # Phi = (cosh r - 1) dtheta, |Phi|_h = tanh(r/2)
    prob = _problem(hyp2, cc.fixture_form(hyp2, 2))
    for _ in range(10):
        x = rng.normal(size=2) * 2.5
        if np.linalg.norm(x) > 7.5:
            x = x / np.linalg.norm(x) * 7.5
        r = np.linalg.norm(x)
        comps = primitive_components_at(prob, x)
        want = (np.cosh(r) - 1.0) / r ** 2 * np.array([-x[1], x[0]])
        assert np.max(np.abs(comps - want)) < 1e-10
        norm = np.linalg.norm(pullback_err_norm(hyp2, comps, x, 1))
        assert abs(norm - np.tanh(r / 2.0)) < 1e-10


def test_linearity_in_source(hyp3, rng):
    psi1 = constant_form(3, 2, rng.normal(size=3))
    psi2 = constant_form(3, 2, rng.normal(size=3))
    a, b = 1.7, -0.45
    combo = constant_form(3, 2, a * psi1.comps(np.zeros(3)) + b * psi2.comps(np.zeros(3)))
    x = rng.normal(size=3) * 1.2
    lhs = primitive_components_at(_problem(hyp3, combo), x)
    rhs = (a * primitive_components_at(_problem(hyp3, psi1), x)
           + b * primitive_components_at(_problem(hyp3, psi2), x))
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_quadrature_doubling_small(ch2, rng):
    _, prob = kaehler_primitive(ch2)
    x = rng.normal(size=4)
    x = x / np.linalg.norm(x) * 0.6
    v16 = primitive_components_at(prob, x, order=16)
    v32 = primitive_components_at(prob, x, order=32)
    assert np.max(np.abs(v32 - v16)) < 1e-8
    # the strict mode runs the check internally
    primitive_components_at(prob, x, strict=True)


def test_quadrature_divergence_raises(hyp2):
    # an intentionally rough source defeats a 4-point rule
    def comps(x):
        r2 = x @ x
        return np.array([np.cos(40.0 * r2)])

    psi = KFormField(degree=2, dim=2, components=comps)
    prob = _problem(hyp2, psi, order=4)
    with pytest.raises(QuadratureError) as err:
        primitive_components_at(prob, np.array([1.7, 1.1]), strict=True)
    assert err.value.estimate is not None


# ---------------------------------------------------------------------------
# d Phi = Psi
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("maker,dim,k,tol", [
    (cc.euclidean, 3, 2, 1e-6),
    (cc.hyperbolic, 2, 2, 1e-4),
    (cc.hyperbolic, 3, 3, 1e-4),
])
def test_exactness(maker, dim, k, tol):
    space = maker(dim)
    psi = cc.fixture_form(space, k)
    prob = _problem(space, psi)
    pts = sampling.ball_points(space, 25, seed=6, r_max=2.5, r_min=0.3)
    audit = exactness_audit(prob, pts)
    assert audit["normalized"] < tol


def test_exactness_kaehler(ch2):
    _, prob = kaehler_primitive(ch2)
    pts = sampling.ball_points(ch2, 25, seed=6, r_max=2.5, r_min=0.3)
    audit = exactness_audit(prob, pts)
    assert audit["normalized"] < 1e-4


# ---------------------------------------------------------------------------
# the sinh attenuation ratio
# ---------------------------------------------------------------------------

def test_sinh_ratio_frozen_values():
    assert abs(sinh_ratio_bound(2, 1.0) - (np.cosh(1.0) - 1.0) / np.sinh(1.0)) < 1e-14
    assert abs(sinh_ratio_bound(2, 1.0) - 0.46212) < 5e-6
    want3 = (np.sinh(2.0) - 2.0) / 4.0 / np.sinh(1.0) ** 2
    assert abs(sinh_ratio_bound(3, 1.0) - want3) < 1e-14
    assert abs(sinh_ratio_bound(3, 1.0) - 0.2945) < 5e-5


def test_sinh_ratio_limit_from_below():
    assert sinh_ratio_bound(2, 25.0) < 1.0
    assert 1.0 - sinh_ratio_bound(2, 25.0) < 1e-10


@given(st.integers(2, 6), st.floats(0.05, 8.0))
@HSET
def test_sinh_ratio_below_uniform_bound(k, r):
    assert sinh_ratio_bound(k, r) < 1.0 / (k - 1)


def test_sinh_ratio_quad_matches_closed_form():
    # the adaptive generic path against the k = 2, 3 antiderivatives
    from scipy.integrate import quad
    for k, r in ((2, 2.3), (3, 1.7)):
        generic, _ = quad(lambda s: (np.sinh(s) / np.sinh(r)) ** (k - 1), 0, r)
        assert abs(generic - sinh_ratio_bound(k, r)) < 1e-10


def test_sinh_ratio_rejects_bad_input():
    with pytest.raises(ValidationError):
        sinh_ratio_bound(1, 1.0)
    with pytest.raises(ValidationError):
        sinh_ratio_bound(2, 0.0)


# ---------------------------------------------------------------------------
# audits and certificates
# ---------------------------------------------------------------------------

def test_degree_one_rejected_at_construction(hyp2):
    with pytest.raises(ValidationError) as err:
        _problem(hyp2, coordinate_form(2, (0,)))
    assert "k >= 2" in str(err.value)


def test_closedness_audit_flags_non_closed(hyp3):
    # x2 dx1 ^ dx3 is not closed
    def comps(x):
        return np.array([0.0, x[1], 0.0])

    psi = KFormField(degree=2, dim=3, components=comps)
    prob = _problem(hyp3, psi)
    with pytest.raises(ClosednessError):
        closedness_audit(prob)
    with pytest.raises(ClosednessError):
        bound_certificate(prob, n_samples=10)


def test_certificate_hyperbolic_area(hyp2):
    prob = _problem(hyp2, cc.fixture_form(hyp2, 2))
    cert = bound_certificate(prob, n_samples=200, seed=13)
    assert cert.passed
    assert cert.kind == "curved"
    assert cert.theoretical_ratio == 1.0
    # sup tends to tanh(r_max / 2) from below
    assert cert.sup_primitive <= np.tanh(hyp2.geodesic_radius / 2.0) + 1e-9
    assert len(cert.worst_offenders) == 10
    for rec in cert.worst_offenders:
        assert rec.primitive_norm <= rec.middle_term * (1 + 1e-9)
        assert rec.middle_term <= rec.sinh_ratio * rec.segment_sup * (1 + 1e-9)


def test_certificate_records_seed_and_is_reproducible(hyp3):
    prob = _problem(hyp3, cc.fixture_form(hyp3, 3))
    c1 = bound_certificate(prob, n_samples=60, seed=21)
    c2 = bound_certificate(prob, n_samples=60, seed=21)
    assert c1.sup_primitive == c2.sup_primitive
    assert c1.sup_source == c2.sup_source
    assert c1.seed == 21


def test_certificate_flat_contrast(eu3):
    prob = _problem(eu3, coordinate_form(3, (0, 1)))
    cert = bound_certificate(prob, n_samples=100, seed=5)
    assert cert.kind == "flat-contrast"
    assert np.isnan(cert.theoretical_ratio)
    assert "no uniform bound" in cert.notes
    assert cert.passed
    # linear growth is realized: the sup reaches r_max/k within slack
    assert cert.sup_primitive > 1.0  # far beyond any 1/(k-1) bound


def test_certificate_fail_is_reported_not_dropped(hyp2):
    prob = _problem(hyp2, cc.fixture_form(hyp2, 2))
    cert = bound_certificate(prob, n_samples=50, seed=2, slack=-0.9)
    # negative slack forces the comparison below the attainable sup
    assert not cert.passed
    assert cert.margin < 0


def test_certificate_chn_kaehler(ch2):
    beta_star, prob = kaehler_primitive(ch2)
    cert = bound_certificate(prob, n_samples=150, seed=3)
    assert cert.passed
    assert cert.sup_primitive <= cert.sup_source * (1 + 1e-3)
    # the source has constant norm sqrt(2)
    assert abs(cert.sup_source - np.sqrt(2.0)) < 1e-6

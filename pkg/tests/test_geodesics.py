import numpy as np
import pytest

import curvcert as cc
from curvcert.errors import (DegenerateInputError, DomainError,
                             ValidationError)
from curvcert.geodesics import (_transport_ode, distance, exp_map,
                                geodesic_flow, geodesic_scaling,
                                jacobi_comparison, log_map, make_ray,
                                pushforward_matrices, pushforward_scaling,
                                radial_transport, ratio_monotone_check)
from curvcert.spaces import metric_at

from conftest import random_h_unit


# ---------------------------------------------------------------------------
# exp / log / distance
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("maker,dim,base_scale,vec_len", [
    (cc.euclidean, 3, 1.0, 3.0),
    (cc.hyperbolic, 3, 0.8, 3.0),
    (cc.complex_hyperbolic, 2, 0.15, 3.0),
])
def test_exp_log_roundtrip_100(maker, dim, base_scale, vec_len, rng):
    space = maker(dim)
    m = space.dim
    for _ in range(100):
        base = rng.normal(size=m) * base_scale
        v = rng.normal(size=m)
        v = v / cc.h_norm(space, base, v) * (vec_len * rng.random() + 1e-3)
        y = exp_map(space, base, v)
        back = log_map(space, base, y)
        assert np.max(np.abs(back - v)) < 1e-6
        assert abs(distance(space, base, y) - cc.h_norm(space, base, v)) < 1e-9


def test_exp_log_roundtrip_warped(warp3, rng):
    # shooting path; moderate radii
    for _ in range(8):
        base = rng.normal(size=3) * 0.25
        v = rng.normal(size=3)
        v = v / cc.h_norm(warp3, base, v) * (1.0 * rng.random() + 0.1)
        y = exp_map(warp3, base, v)
        back = log_map(warp3, base, y)
        assert np.max(np.abs(back - v)) < 1e-6


def test_warped_center_radial_exact(warp3, rng):
    v = rng.normal(size=3)
    y = exp_map(warp3, np.zeros(3), v)
    assert np.allclose(y, v)
    assert np.allclose(log_map(warp3, np.zeros(3), y), v)


def test_euclidean_exp_is_translation(eu3, rng):
    base, v = rng.normal(size=3), rng.normal(size=3)
    assert np.allclose(exp_map(eu3, base, v), base + v)


def test_hyperbolic_exp_from_origin_is_identity(hyp3, rng):
    v = rng.normal(size=3)
    assert np.max(np.abs(exp_map(hyp3, np.zeros(3), v) - v)) < 1e-12


def test_ch1_radial_flow_is_tanh(ch1):
    ray = make_ray(ch1, np.zeros(2), np.array([1.0, 0.0]), max_param=5.0)
    for s in (0.5, 1.5, 3.0):
        pt, vel = geodesic_flow(ch1, ray, s)
        assert abs(pt[0] - np.tanh(s)) < 1e-12
        assert abs(pt[1]) < 1e-12
        assert abs(cc.h_norm(ch1, pt, vel) - 1.0) < 1e-12


def test_flow_unit_speed_and_dual_path(hyp3, rng):
    base = rng.normal(size=3) * 0.4
    ray = make_ray(hyp3, base, rng.normal(size=3), max_param=3.0)
    pt_c, vel_c = geodesic_flow(hyp3, ray, 2.2, path="closed")
    pt_o, vel_o = geodesic_flow(hyp3, ray, 2.2, path="ode")
    assert np.max(np.abs(pt_c - pt_o)) < 1e-6
    assert np.max(np.abs(vel_c - vel_o)) < 1e-6
    assert abs(cc.h_norm(hyp3, pt_o, vel_o) - 1.0) < 1e-9


def test_flow_truncation_carries_partial(hyp2):
    ray = make_ray(hyp2, np.array([7.5, 0.0]), np.array([1.0, 0.0]), max_param=5.0)
    with pytest.raises(DomainError) as err:
        geodesic_flow(hyp2, ray, 3.0, path="ode")
    assert err.value.partial is not None
    x_part, v_part, s_reached = err.value.partial
    assert 0.0 < s_reached < 3.0


# ---------------------------------------------------------------------------
# scaling map
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("maker,dim,scale", [
    (cc.euclidean, 3, 1.0), (cc.hyperbolic, 3, 1.0),
    (cc.complex_hyperbolic, 2, 0.2),
])
def test_scaling_endpoints_and_distance(maker, dim, scale, rng):
    space = maker(dim)
    m = space.dim
    base = rng.normal(size=m) * 0.2 * scale
    x = rng.normal(size=m) * scale
    assert np.allclose(geodesic_scaling(space, base, x, 0.0), base)
    assert np.allclose(geodesic_scaling(space, base, x, 1.0), x)
    r = distance(space, base, x)
    for t in (0.25, 0.7):
        y = geodesic_scaling(space, base, x, t)
        assert abs(distance(space, base, y) - t * r) < 1e-9


def test_scaling_hyperbolic_origin_is_linear(hyp3, rng):
    x = rng.normal(size=3) * 1.5
    for t in (0.3, 0.8):
        assert np.array_equal(geodesic_scaling(hyp3, np.zeros(3), x, t), t * x)


def test_scaling_composition(ch2, hyp3, rng):
    for space, scale in ((ch2, 0.3), (hyp3, 1.5)):
        base = rng.normal(size=space.dim) * 0.1 * scale
        x = rng.normal(size=space.dim) * scale
        for _ in range(5):
            s, t = rng.random(), rng.random()
            lhs = geodesic_scaling(space, base, geodesic_scaling(space, base, x, t), s)
            rhs = geodesic_scaling(space, base, x, s * t)
            assert np.max(np.abs(lhs - rhs)) < 1e-9


# ---------------------------------------------------------------------------
# pushforward of the scaling map
# ---------------------------------------------------------------------------

def test_pushforward_identity_at_t1(ch2, rng):
    x = rng.normal(size=4) * 0.3
    xi = rng.normal(size=4)
    res = pushforward_scaling(ch2, np.zeros(4), x, 1.0, xi)
    assert np.max(np.abs(res - xi)) < 1e-12


def test_pushforward_radial_factor_t(hyp3, ch2, warp3, rng):
    for space, scale in ((hyp3, 1.0), (ch2, 0.2), (warp3, 1.0)):
        x = rng.normal(size=space.dim) * scale
        r = distance(space, np.zeros(space.dim), x)
        rad = cc.unit_radial(space, np.zeros(space.dim), x)
        t = 0.6
        res = pushforward_scaling(space, np.zeros(space.dim), x, t, rad)
        target = geodesic_scaling(space, np.zeros(space.dim), x, t)
        assert abs(cc.h_norm(space, target, res) - t) < 1e-9


def test_pushforward_hyperbolic_perp_ratio(hyp3, rng):
    # |(tau_t)_* xi| = sinh(tr)/sinh(r) |xi| for perpendicular xi
    base = rng.normal(size=3) * 0.5
    x = rng.normal(size=3) * 1.2
    r = distance(hyp3, base, x)
    rad = cc.unit_radial(hyp3, base, x)
    xi = random_h_unit(hyp3, x, rng, orthogonal_to=[rad])
    for t in (0.35, 0.8):
        res = pushforward_scaling(hyp3, base, x, t, xi)
        target = geodesic_scaling(hyp3, base, x, t)
        want = np.sinh(t * r) / np.sinh(r)
        assert abs(cc.h_norm(hyp3, target, res) - want) < 1e-5


def test_pushforward_chn_jt_factor(ch2, rng):
    J = cc.complex_structure(ch2)
    u = rng.normal(size=4)
    u /= np.linalg.norm(u)
    r = 1.9
    x = np.tanh(r) * u
    rad = cc.unit_radial(ch2, np.zeros(4), x)
    t = 0.45
    res = pushforward_scaling(ch2, np.zeros(4), x, t, J @ rad)
    target = geodesic_scaling(ch2, np.zeros(4), x, t)
    want = np.sinh(2 * t * r) / np.sinh(2 * r)
    assert abs(cc.h_norm(ch2, target, res) - want) < 1e-10


def test_pushforward_euclidean_is_scalar(eu3, rng):
    base = rng.normal(size=3)
    x = base + rng.normal(size=3)
    _, _, _, mats = pushforward_matrices(eu3, base, x, [0.3, 0.9])
    assert np.allclose(mats[0], 0.3 * np.eye(3))
    assert np.allclose(mats[1], 0.9 * np.eye(3))


def test_pushforward_warped_generic_vs_center(warp3, rng):
    # the matrix-BVP generic path agrees with the center eigen-structure
    # when the base is moved to the center
    u = rng.normal(size=3)
    u /= np.linalg.norm(u)
    x = 1.8 * u
    t = 0.5
    xi = random_h_unit(warp3, x, rng, orthogonal_to=[u])
    res_center = pushforward_scaling(warp3, np.zeros(3), x, t, xi)
    from curvcert.geodesics import _pushforward_ode
    _, targets, _, mats = _pushforward_ode(warp3, np.zeros(3), x, [t], 1.8)
    res_ode = mats[0] @ xi
    assert np.max(np.abs(res_center - res_ode)) < 1e-6


def test_pushforward_at_base_rejected(hyp2):
    with pytest.raises(DegenerateInputError):
        pushforward_scaling(hyp2, np.zeros(2), np.zeros(2), 0.5, np.array([1.0, 0.0]))


def test_radial_transport_frames_orthonormal(ch2, hyp3, rng):
    for space, scale in ((ch2, 0.25), (hyp3, 1.0)):
        base = rng.normal(size=space.dim) * 0.2 * scale
        x = rng.normal(size=space.dim) * scale
        r = distance(space, base, x)
        data = radial_transport(space, base, x, [0.3 * r, r])
        for pt, F in zip(data.points, data.frames):
            G = metric_at(space, pt)
            assert np.max(np.abs(F.T @ G @ F - np.eye(space.dim))) < 1e-9


def test_chn_frames_parallel_vs_ode(ch2, rng):
    # the ambient-constant complex-orthogonal frame really is parallel
    base = rng.normal(size=4) * 0.15
    x = rng.normal(size=4) * 0.3
    r = distance(ch2, base, x)
    data = radial_transport(ch2, base, x, [r])
    v = log_map(ch2, base, x)
    ray = make_ray(ch2, base, v, max_param=r)
    pts, _, frames = _transport_ode(ch2, ray, [0.0, r])
    F0_ode, Fr_ode = frames
    data0 = radial_transport(ch2, base, x, [1e-9 * r, r])
    # transport the closed-form frame at 0 with the ODE and compare at r
    C = np.linalg.solve(F0_ode, data0.frames[0])
    assert np.max(np.abs(Fr_ode @ C - data0.frames[1])) < 1e-6


# ---------------------------------------------------------------------------
# Jacobi comparison
# ---------------------------------------------------------------------------

def _perp_unit(space, ray, rng):
    G = metric_at(space, ray.base)
    xi = rng.normal(size=space.dim)
    xi = xi - (xi @ G @ ray.direction) * ray.direction
    return xi / np.sqrt(xi @ G @ xi)


def test_jacobi_hyperbolic_equality_case(hyp3, rng):
    for _ in range(5):
        base = rng.normal(size=3) * 0.5
        ray = make_ray(hyp3, base, rng.normal(size=3), max_param=5.0)
        xi = _perp_unit(hyp3, ray, rng)
        r = 1.0 + 3.5 * rng.random()
        sol = jacobi_comparison(hyp3, ray, r, xi)
        eta = sol.eta()
        assert np.max(np.abs(eta - 1.0 / np.sinh(r))) < 1e-5
        assert abs(sol.boundary_norm - 1.0) < 1e-12


def test_jacobi_boundary_condition_exact(ch2, rng):
    base = rng.normal(size=4) * 0.2
    ray = make_ray(ch2, base, rng.normal(size=4), max_param=4.0)
    xi = _perp_unit(ch2, ray, rng)
    sol = jacobi_comparison(ch2, ray, 3.0, xi)
    assert abs(sol.samples[-1, 0] - 3.0) < 1e-9
    assert abs(sol.boundary_norm - 1.0) < 1e-12
    assert sol.eta_min_increment() >= -1e-6


def test_jacobi_warped_strictly_increasing(warp3, rng):
    base = rng.normal(size=3) * 0.3
    ray = make_ray(warp3, base, rng.normal(size=3), max_param=3.0)
    xi = _perp_unit(warp3, ray, rng)
    sol = jacobi_comparison(warp3, ray, 2.5, xi)
    assert sol.eta_min_increment() > 0.0


def test_jacobi_chn_matches_closed_factors(ch2, rng):
    # radial ray from the origin: eta of the J-tangent component follows
    # sinh(2s)/(2 sinh s) growth relative to sinh
    u = rng.normal(size=4)
    u /= np.linalg.norm(u)
    ray = make_ray(ch2, np.zeros(4), u, max_param=3.0)
    J = cc.complex_structure(ch2)
    xi = J @ u
    r = 2.5
    sol = jacobi_comparison(ch2, ray, r, xi)
    s, norms = sol.samples[:, 0], sol.samples[:, 1]
    want = np.sinh(2 * s) / np.sinh(2 * r)
    assert np.max(np.abs(norms - want)) < 1e-8


def test_jacobi_preconditions(hyp3, rng):
    ray = make_ray(hyp3, np.zeros(3), np.array([1.0, 0.0, 0.0]), max_param=2.0)
    with pytest.raises(ValidationError):
        jacobi_comparison(hyp3, ray, 1.0, np.array([1.0, 0.2, 0.0]))  # not perp
    with pytest.raises(DegenerateInputError):
        jacobi_comparison(hyp3, ray, 1.0, np.zeros(3))


# ---------------------------------------------------------------------------
# cumulative ratio monotonicity
# ---------------------------------------------------------------------------

def test_ratio_monotone_equal_functions():
    s = np.linspace(0.1, 5.0, 200)
    rep = ratio_monotone_check(s, np.exp(s), np.exp(s))
    assert rep.ok and rep.precondition_ok


def test_ratio_monotone_sinh_pair():
    # f = sinh^2, g = 2 sinh cosh: the cumulative ratio is the k = 3
    # attenuation factor and must be nondecreasing
    s = np.linspace(1e-3, 5.0, 400)
    f = np.sinh(s) ** 2
    g = 2.0 * np.sinh(s) * np.cosh(s)
    rep = ratio_monotone_check(s, f, g)
    assert rep.ok and rep.precondition_ok


def test_ratio_monotone_flags_precondition():
    # f/g = 1/s decreasing: not a counterexample to the device, the
    # hypothesis fails and the conclusion fails with it
    s = np.linspace(0.1, 3.0, 100)
    rep = ratio_monotone_check(s, np.ones_like(s), s)
    assert not rep.precondition_ok
    assert not rep.ok
    assert rep.first_violation is not None


def test_ratio_monotone_rejects_nonpositive():
    s = np.linspace(0.1, 1.0, 10)
    with pytest.raises(ValidationError):
        ratio_monotone_check(s, np.zeros_like(s), np.ones_like(s))


def test_ray_unit_speed(hyp3, rng):
    base = rng.normal(size=3) * 0.5
    ray = make_ray(hyp3, base, rng.normal(size=3), max_param=2.0)
    assert abs(cc.h_norm(hyp3, base, ray.direction) - 1.0) < 1e-12
    for s in (0.5, 1.5):
        pt, vel = geodesic_flow(hyp3, ray, s)
        assert abs(cc.h_norm(hyp3, pt, vel) - 1.0) < 1e-10

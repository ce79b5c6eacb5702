"""End-to-end acceptance suite.

One test per criterion, each printing a [PASS]/[FAIL] line with the
measured quantities.  Tolerances are pinned here, not configured.  Run
with `pytest tests/test_acceptance.py -v -s`; the suite completes on a
laptop well inside fifteen minutes.
"""

import time

import numpy as np
import pytest

import curvcert as cc
from curvcert import contact as ct
from curvcert import horizon as hz
from curvcert import primitive as pr
from curvcert import sampling
from curvcert.experiments import ExperimentConfig, fixture_form, run
from curvcert.geodesics import (jacobi_comparison, make_ray,
                                ratio_monotone_check)
from curvcert.spaces import metric_at


def _report(ok: bool, label: str, detail: str):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    assert ok, f"{label}: {detail}"


# ---------------------------------------------------------------------------
# 1. curvature audit
# ---------------------------------------------------------------------------

def test_criterion_01_curvature_audit():
    t0 = time.perf_counter()
    details = []
    ok = True
    for m in (2, 3, 4):
        rec = run(ExperimentConfig.from_dict({
            "experiment": "curvature-audit", "model": "hyperbolic",
            "dim": m, "samples": 1000, "seed": 101 + m}))
        closed = np.array([r["sec"] for r in rec.rows if r["path"] == "closed"])
        fd = np.array([r["sec"] for r in rec.rows if r["path"] == "fd"])
        ok_m = (closed.size == 1000 and fd.size == 1000
                and np.max(np.abs(closed + 1.0)) < 1e-6
                and np.max(np.abs(fd + 1.0)) < 1e-2)
        ok &= ok_m
        details.append(f"H{m}: closed dev {np.max(np.abs(closed + 1)):.1e}, "
                       f"fd dev {np.max(np.abs(fd + 1)):.1e}")
    for n in (1, 2):
        rec = run(ExperimentConfig.from_dict({
            "experiment": "curvature-audit", "model": "chn",
            "dim": 2 * n, "samples": 1000, "seed": 110 + n}))
        vals = np.array([r["sec"] for r in rec.rows])
        hol = np.array([r["sec_holomorphic"] for r in rec.rows])
        ok_n = (vals.size == 2000 and np.all(vals >= -4.01) and np.all(vals <= -0.99)
                and np.max(np.abs(hol + 4.0)) < 1e-2)
        ok &= ok_n
        details.append(f"CH{n}: band [{vals.min():.4f}, {vals.max():.4f}], "
                       f"hol dev {np.max(np.abs(hol + 4)):.1e} ({hol.size} planes)")
    _report(ok, "criterion 1 (curvature audit)",
            "; ".join(details) + f" [{time.perf_counter() - t0:.1f}s]")


# ---------------------------------------------------------------------------
# 2. Jacobi comparison
# ---------------------------------------------------------------------------

def test_criterion_02_jacobi_comparison():
    t0 = time.perf_counter()
    spaces = (cc.hyperbolic(3), cc.complex_hyperbolic(2),
              cc.standard_warped_quadratic(3))
    ok = True
    details = []
    for space in spaces:
        min_inc = np.inf
        eq_worst = 0.0
        for i in range(50):
            rng = np.random.default_rng([202, i, space.dim, hash(space.kind) % 997])
            base = rng.normal(size=space.dim) * 0.1
            ray = make_ray(space, base, rng.normal(size=space.dim), max_param=5.2)
            G = metric_at(space, base)
            xi = rng.normal(size=space.dim)
            xi = xi - (xi @ G @ ray.direction) * ray.direction
            xi = xi / np.sqrt(xi @ G @ xi)
            r = 1.0 + 4.0 * rng.random()
            sol = jacobi_comparison(space, ray, r, xi)
            min_inc = min(min_inc, sol.eta_min_increment())
            if space.kind == "hyperbolic":
                eta = sol.eta()
                eq_worst = max(eq_worst, float(np.max(np.abs(eta - eta[-1]))))
        ok_s = min_inc >= -1e-6
        if space.kind == "hyperbolic":
            ok_s = ok_s and eq_worst < 1e-5
            details.append(f"{space.kind}: min inc {min_inc:.2e}, equality dev {eq_worst:.2e}")
        else:
            details.append(f"{space.kind}: min inc {min_inc:.2e}")
        ok &= ok_s
    _report(ok, "criterion 2 (Jacobi comparison, 50 triples per space)",
            "; ".join(details) + f" [{time.perf_counter() - t0:.1f}s]")


# ---------------------------------------------------------------------------
# 3. exactness of the radial primitive
# ---------------------------------------------------------------------------

def test_criterion_03_exactness():
    t0 = time.perf_counter()
    cases = [
        (cc.euclidean(3), 2, "euclidean constant"),
        (cc.hyperbolic(2), 2, "hyperbolic volume m=2"),
        (cc.hyperbolic(3), 3, "hyperbolic volume m=3"),
        (cc.complex_hyperbolic(2), 2, "CH2 fundamental form"),
    ]
    ok = True
    details = []
    for space, k, label in cases:
        psi = fixture_form(space, k)
        prob = pr.PrimitiveProblem(space=space, base=np.zeros(space.dim), psi=psi)
        pts = sampling.ball_points(space, 100, seed=303, r_max=3.0, r_min=0.2)
        audit = pr.exactness_audit(prob, pts)
        ok_c = audit["normalized"] < 1e-4
        ok &= ok_c
        details.append(f"{label}: {audit['normalized']:.2e}")
    _report(ok, "criterion 3 (|dPhi - Psi| < 1e-4 (1 + sup|Psi|), 100 points)",
            "; ".join(details) + f" [{time.perf_counter() - t0:.1f}s]")


# ---------------------------------------------------------------------------
# 4. uniform bound certificates
# ---------------------------------------------------------------------------

def test_criterion_04_bound_certificates():
    t0 = time.perf_counter()
    cases = [
        (cc.hyperbolic(2), 2), (cc.hyperbolic(3), 2), (cc.hyperbolic(3), 3),
        (cc.hyperbolic(4), 3), (cc.complex_hyperbolic(2), 2),
    ]
    ok = True
    details = []
    for space, k in cases:
        psi = fixture_form(space, k)
        prob = pr.PrimitiveProblem(space=space, base=np.zeros(space.dim), psi=psi)
        cert = pr.bound_certificate(prob, n_samples=1000, seed=404)
        ratio = cert.sup_primitive / cert.sup_source
        ok_c = cert.passed and cert.sup_primitive <= cert.sup_source / (k - 1) * 1.001
        ok &= ok_c
        details.append(f"{space.kind}{space.dim} k={k}: "
                       f"ratio {ratio:.4f} <= {1.0 / (k - 1):.3f}")
    # pointwise oracle of the curvature -1 area fixture
    hyp2 = cc.hyperbolic(2)
    prob = pr.PrimitiveProblem(space=hyp2, base=np.zeros(2),
                               psi=fixture_form(hyp2, 2))
    pts = sampling.ball_points(hyp2, 1000, seed=405, r_max=8.0, r_min=1e-3)
    worst = 0.0
    for x in pts:
        comps = pr.primitive_components_at(prob, x)
        got = float(np.linalg.norm(pr.pullback_err_norm(hyp2, comps, x, 1)))
        worst = max(worst, abs(got - np.tanh(np.linalg.norm(x) / 2.0)))
    ok_o = worst < 1e-4
    ok &= ok_o
    details.append(f"area fixture pointwise tanh(r/2) dev {worst:.2e}")
    _report(ok, "criterion 4 (sup|Phi| <= sup|Psi|/(k-1) * 1.001, 1000 points)",
            "; ".join(details) + f" [{time.perf_counter() - t0:.1f}s]")


# ---------------------------------------------------------------------------
# 5. the attenuation ratio and the cumulative comparison device
# ---------------------------------------------------------------------------

def test_criterion_05_sinh_ratio():
    t0 = time.perf_counter()
    ok = True
    details = []
    grid = np.linspace(8.0 / 100, 8.0, 100)
    for k in range(2, 7):
        vals = np.array([pr.sinh_ratio_bound(k, float(r)) for r in grid])
        below = bool(np.all(vals < 1.0 / (k - 1)))
        f = np.sinh(grid) ** (k - 1)
        g = (k - 1) * np.sinh(grid) ** (k - 2) * np.cosh(grid)
        mono = ratio_monotone_check(grid, f, g)
        nondecreasing = bool(np.all(np.diff(vals) > -1e-12))
        ok_k = below and mono.ok and nondecreasing
        ok &= ok_k
        details.append(f"k={k}: max {vals.max():.6f} < {1.0 / (k - 1):.4f}, "
                       f"monotone={mono.ok}")
    _report(ok, "criterion 5 (attenuation ratio below 1/(k-1), nondecreasing)",
            "; ".join(details) + f" [{time.perf_counter() - t0:.1f}s]")


# ---------------------------------------------------------------------------
# 6. contact construction
# ---------------------------------------------------------------------------

def test_criterion_06_contact():
    t0 = time.perf_counter()
    ok = True
    details = []
    r_grid = np.arange(2.0, 8.5, 1.0)
    for n in (1, 2, 3):
        space = cc.complex_hyperbolic(n)
        p = np.zeros(space.dim)
        pts = sampling.ball_points(space, 1000, seed=606 + n, r_max=8.0, r_min=0.05)
        beta_dev = max(abs(ct.beta_norm(space, p, x) - 1.0) for x in pts)
        ok_beta = beta_dev < 1e-6

        levi_min = np.inf
        if n >= 2:
            per_r = 1000 // len(r_grid) + 1
            count = 0
            for j, r in enumerate(r_grid):
                sph, _ = sampling.sphere_points(space, per_r, seed=650 + n * 10 + j,
                                                radius=float(r))
                for i, x in enumerate(sph):
                    if count >= 1000:
                        break
                    rng = np.random.default_rng([606, n, j, i])
                    fr = ct.sphere_frame(space, p, x, rng=rng)
                    X = fr.contact @ rng.normal(size=fr.contact.shape[1])
                    X = X / cc.h_norm(space, x, X)
                    levi_min = min(levi_min, ct.levi_positivity(space, p, x, X))
                    count += 1
            ok_levi = levi_min >= 2.0 * 0.999
        else:
            ok_levi = True  # no contact directions exist on the circle

        defect_min = np.inf
        for r in r_grid:
            val, _ = ct.contact_defect(space, p, float(r), n_samples=24,
                                       seed=660 + n)
            defect_min = min(defect_min, val)
        ok_defect = defect_min > 0.0

        ok &= ok_beta and ok_levi and ok_defect
        levi_txt = f"{levi_min:.6f}" if n >= 2 else "vacuous (no contact plane)"
        details.append(f"CH{n}: |beta| dev {beta_dev:.1e}, levi min {levi_txt}, "
                       f"defect min {defect_min:.3e}")
    _report(ok, "criterion 6 (contact construction on CH^n)",
            "; ".join(details) + f" [{time.perf_counter() - t0:.1f}s]")


# ---------------------------------------------------------------------------
# 7. Hessian pinching
# ---------------------------------------------------------------------------

def test_criterion_07_hessian_pinching():
    t0 = time.perf_counter()
    ok = True
    details = []
    for n in (1, 2):
        space = cc.complex_hyperbolic(n)
        p = np.zeros(space.dim)
        worst_band = 0.0
        worst_dual = 0.0
        for j, r in enumerate(np.arange(2.0, 8.5, 1.0)):
            lo, hi = 1.0 / np.tanh(r), 2.0 / np.tanh(2.0 * r)
            sph, _ = sampling.sphere_points(space, 10, seed=700 + 10 * n + j,
                                            radius=float(r))
            for i, x in enumerate(sph):
                rng = np.random.default_rng([707, n, j, i])
                fr = ct.sphere_frame(space, p, x, rng=rng)
                X = fr.frame @ rng.normal(size=fr.frame.shape[1])
                X = X / cc.h_norm(space, x, X)
                h_chr = ct.hessian_r(space, p, x, X, path="christoffel")
                h_cl = ct.hessian_r(space, p, x, X, path="closed")
                h_fd = ct.hessian_r(space, p, x, X, path="geodesic_fd")
                worst_band = max(worst_band, lo - 1e-3 - h_chr, h_chr - hi - 1e-3)
                worst_dual = max(worst_dual, abs(h_chr - h_cl), abs(h_fd - h_cl))
        ok_n = worst_band <= 0.0 and worst_dual < 1e-3
        ok &= ok_n
        details.append(f"CH{n}: band slack {-worst_band:.2e}, dual gap {worst_dual:.2e}")
    _report(ok, "criterion 7 (Hessian in [coth r, 2 coth 2r] +- 1e-3, dual paths)",
            "; ".join(details) + f" [{time.perf_counter() - t0:.1f}s]")


# ---------------------------------------------------------------------------
# 8. horizon convergence
# ---------------------------------------------------------------------------

def test_criterion_08_horizon():
    t0 = time.perf_counter()
    space = cc.complex_hyperbolic(2)
    rep = hz.horizon_limit_report(space, np.zeros(4), np.arange(2.0, 8.5, 1.0),
                                  n_samples=120, n_levi=200, seed=808)
    ok = (rep.passed and rep.diffs_strictly_decreasing
          and rep.fit_discrepancy < 1e-2 and rep.levi_eigen_min > 0.0
          and rep.n_levi_samples == 200)
    _report(ok, "criterion 8 (horizon convergence on CH2)",
            f"sup diffs {np.array2string(rep.sup_diffs, precision=2)}, "
            f"decay ratios <= {rep.decay_ratios.max():.3f}, "
            f"scale fit {rep.scale_fit:.6f}, discrepancy {rep.fit_discrepancy:.2e}, "
            f"Levi eig in [{rep.levi_eigen_min:.3f}, {rep.levi_eigen_max:.3f}] "
            f"({rep.n_levi_samples} samples) [{time.perf_counter() - t0:.1f}s]")


# ---------------------------------------------------------------------------
# 9. the bounded primitive of the fundamental form
# ---------------------------------------------------------------------------

def test_criterion_09_kaehler_primitive():
    t0 = time.perf_counter()
    rec = run(ExperimentConfig.from_dict({
        "experiment": "kaehler-primitive", "model": "chn", "dim": 4,
        "samples": 500, "seed": 909}))
    s = rec.summary
    ok = (s["passed"] and s["exactness_normalized"] < 1e-4
          and s["sup_beta_star"] <= s["sup_omega"] * 1.001)
    _report(ok, "criterion 9 (d beta* = omega, sup|beta*| <= sup|omega|)",
            f"exactness {s['exactness_normalized']:.2e}, "
            f"ratio {s['bound_ratio']:.4f}, "
            f"measured sup|grad beta*| = {s['grad_beta_star_sup_measured']:.4f} "
            f"(reported, no bound asserted) [{time.perf_counter() - t0:.1f}s]")


# ---------------------------------------------------------------------------
# 10. reproducibility
# ---------------------------------------------------------------------------

def test_criterion_10_reproducibility():
    t0 = time.perf_counter()
    data = {"experiment": "verify-primitive", "model": "chn", "dim": 4,
            "k": 2, "samples": 120, "seed": 1010}
    r1 = run(ExperimentConfig.from_dict(data))
    r2 = run(ExperimentConfig.from_dict(data))
    keys = [k for k, v in r1.summary.items() if isinstance(v, float)]
    worst = max(abs(r1.summary[k] - r2.summary[k]) for k in keys)
    ok = r1.rows == r2.rows and worst <= 1e-12 and r1.config_hash == r2.config_hash
    _report(ok, "criterion 10 (identical config + seed reproduces results)",
            f"summary drift {worst:.1e}, rows bitwise equal: {r1.rows == r2.rows} "
            f"[{time.perf_counter() - t0:.1f}s]")

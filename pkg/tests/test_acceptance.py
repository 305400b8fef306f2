"""End-to-end acceptance criteria, one test per criterion.

Each test prints a ``criterion N: PASS|FAIL`` line (collected again in the
terminal summary) and then asserts the gating condition.
"""

import time

import numpy as np
from helpers import random_cone_points, random_points
from perspcone.cli import run_bench
from perspcone.functions import get_function
from perspcone.projection import ConePoint, certify_error_bound, project, project_batch
from perspcone.rootfind import SolverConfig
from perspcone.special import lambert_w
from perspcone.testgen import generate_labeled, oracle_project, region

SEED = 2024


def test_criterion_1_exp_r2(verdict):
    run_bench("exp", "r2", 10, SEED, 1e-9, "brent")  # compile outside the timing
    t0 = time.perf_counter()
    rep = run_bench("exp", "r2", 10000, SEED, 1e-9, "brent")
    wall = time.perf_counter() - t0
    ok = rep.n_failed == 0 and rep.error_mean <= 1e-9 and rep.error_std <= 1e-7
    verdict(1, ok, f"exp R2 n=10000: mean {rep.error_mean:.3e} (<= 1e-9), "
                   f"std {rep.error_std:.3e} (<= 1e-7), {wall:.1f}s")
    assert ok


def test_criterion_2_exp_r1(verdict):
    rep = run_bench("exp", "r1", 10000, SEED, 1e-9, "brent")
    ok = rep.n_failed == 0 and rep.error_mean <= 3.2e-3
    verdict(2, ok, f"exp R1 n=10000: mean {rep.error_mean:.3e} (<= 3.2e-3), "
                   f"max {rep.error_max:.3e}")
    stretch = rep.error_mean <= 1e-8
    print(f"criterion 2 stretch (non-gating): mean <= 1e-8: "
          f"{'PASS' if stretch else 'FAIL'}")
    assert ok


def test_criterion_3_radial_exp_r3(verdict):
    run_bench("exp-radial", "r3", 2, SEED, 5e-10, "brent", dim=10000)
    t0 = time.perf_counter()
    rep = run_bench("exp-radial", "r3", 1000, SEED, 5e-10, "brent", dim=10000)
    wall = time.perf_counter() - t0
    ok = rep.n_failed == 0 and rep.error_mean <= 1e-8 and rep.dim == 10000
    verdict(3, ok, f"radial exp R3 n=1000 dim=10000: mean {rep.error_mean:.3e} "
                   f"(<= 1e-8), {wall:.1f}s")
    assert ok


def test_criterion_4_hyperbolic_r4(verdict):
    run_bench("hyperbolic", "r4", 10, SEED, 1e-12, "brent")
    t0 = time.perf_counter()
    rep = run_bench("hyperbolic", "r4", 10000, SEED, 1e-12, "brent")
    wall = time.perf_counter() - t0
    ok = rep.n_failed == 0 and rep.error_mean <= 1e-10
    verdict(4, ok, f"hyperbolic R4 n=10000: mean {rep.error_mean:.3e} "
                   f"(<= 1e-10), {wall:.1f}s")
    assert ok


def test_criterion_5_bisection_error_bound(verdict):
    fn = get_function("exp")
    samples = generate_labeled(fn, region("R2"), 1000, SEED)
    bad = {}
    for eps in (1e-3, 1e-6, 1e-9):
        cfg = SolverConfig(tol_outer=eps, method="bisection")
        n_bad = 0
        for s in samples:
            r = project(fn, s.input, cfg)
            d_err = abs(r.point.delta - s.exact.delta)
            xy_err = np.linalg.norm(r.point.as_array()[:-1] - s.exact.as_array()[:-1])
            if d_err > eps or xy_err > certify_error_bound(r, s.input, eps) + eps:
                n_bad += 1
        bad[eps] = n_bad
    ok = not any(bad.values())
    verdict(5, ok, "bisection on 1000 R2 samples, violations per eps: "
            + ", ".join(f"{e:g}: {n}" for e, n in bad.items()))
    assert ok


def test_criterion_6_oracle_equivalence(verdict):
    rng = np.random.default_rng(SEED)
    worst = {}
    for name in ("exp", "hyperbolic", "quadratic"):
        fn = get_function(name)
        gaps = []
        for _ in range(100):
            p = ConePoint(*rng.uniform(-2, 2, 3))
            a = project(fn, p).point.as_array()
            b = oracle_project(fn, p).as_array()
            gaps.append(np.linalg.norm(a - b))
        worst[name] = max(gaps)
    ok = max(worst.values()) <= 1e-4
    verdict(6, ok, "max ||project - oracle|| over 100 points: "
            + ", ".join(f"{k} {v:.2e}" for k, v in worst.items()) + " (<= 1e-4)")
    assert ok


def _property_violations(fn, rng, n, dim):
    tol = 1e-9
    lim = 10 * tol
    cfg = SolverConfig(tol_outer=tol)
    points = random_points(rng, n, dim=dim)
    cone = [c.as_array() for c in random_cone_points(fn, rng, 100, dim=dim)]
    proj = [project(fn, p, cfg).point for p in points]
    counts = dict.fromkeys(["membership", "idempotence", "homogeneity",
                            "nonexpansive", "variational"], 0)
    for i, (p, q) in enumerate(zip(points, proj)):
        qa, pa = q.as_array(), p.as_array()
        base = float(np.linalg.norm(q.x)) if dim > 1 else float(q.x[0])
        scale = max(1.0, np.linalg.norm(qa))
        if fn.eval_persp(base, q.eta) - q.delta > lim * scale:
            counts["membership"] += 1
        if np.linalg.norm(project(fn, q, cfg).point.as_array() - qa) > lim * scale:
            counts["idempotence"] += 1
        for lam in (0.1, 7.0):
            lp = ConePoint(lam * p.x, lam * p.eta, lam * p.delta)
            got = project(fn, lp, cfg).point.as_array()
            if np.linalg.norm(got - lam * qa) > lim * max(1.0, lam * scale):
                counts["homogeneity"] += 1
        o, oq = points[i - 1], proj[i - 1]
        gap = np.linalg.norm(qa - oq.as_array())
        if gap > np.linalg.norm(pa - o.as_array()) + lim * scale:
            counts["nonexpansive"] += 1
        normal = pa - qa
        vi = max(float(normal @ (c - qa)) for c in cone)
        if vi > lim * max(1.0, np.linalg.norm(normal)) * scale:
            counts["variational"] += 1
    return counts


def test_criterion_7_property_suite(verdict):
    rng = np.random.default_rng(SEED)
    summary, total = [], 0
    for name, dim in (("exp", 1), ("hyperbolic", 1), ("quadratic", 1),
                      ("exp-radial", 3)):
        counts = _property_violations(get_function(name), rng, 500, dim)
        total += sum(counts.values())
        summary.append(f"{name} {sum(counts.values())}")
        if sum(counts.values()):
            summary[-1] += " " + str({k: v for k, v in counts.items() if v})
    ok = total == 0
    verdict(7, ok, "violations beyond 10*tol on 500 points/cone: " + ", ".join(summary))
    assert ok


def test_criterion_8_micro_suites(verdict):
    rng = np.random.default_rng(SEED)
    moreau_bad = 0
    for name in ("exp", "hyperbolic", "quadratic"):
        fn = get_function(name)
        for _ in range(200):
            gamma = 10.0 ** rng.uniform(-3, 3)
            x = rng.uniform(-50, 50)
            r = fn.prox_f(gamma, x) + gamma * fn.prox_fstar(1 / gamma, x / gamma) - x
            moreau_bad += abs(r) > 1e-9 * max(1.0, abs(x))
    w = rng.uniform(-1, 700, 1000)
    back = np.array([lambert_w(v * np.exp(v)) for v in w])
    lambert_bad = int(np.count_nonzero(np.abs(back - w) > 1e-12 * np.maximum(np.abs(w), 1e-300)))
    ok = moreau_bad == 0 and lambert_bad == 0
    verdict(8, ok, f"Moreau identity violations {moreau_bad}/600, "
                   f"Lambert W round-trip violations {lambert_bad}/1000")
    assert ok


def test_criterion_9_performance(verdict):
    medians = {}
    for name, reg in (("exp", "R2"), ("exp", "R1"), ("hyperbolic", "R4")):
        fn = get_function(name)
        samples = generate_labeled(fn, region(reg), 2000, SEED)
        Z = np.array([s.input.as_array() for s in samples])
        b = project_batch(fn, Z[:, :1], Z[:, 1], Z[:, 2], SolverConfig(tol_outer=1e-9),
                          warmup=100)
        medians[f"{name} {reg}"] = float(np.median(b.time_ns)) / 1e3
    ok = max(medians.values()) <= 100.0
    verdict(9, ok, "median per-point time (us): "
            + ", ".join(f"{k} {v:.1f}" for k, v in medians.items()) + " (<= 100)")
    assert ok

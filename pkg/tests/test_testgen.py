import math

import numpy as np
import pytest

from perspcone.projection import ConePoint, project_epi
from perspcone.testgen import (RegionSpec, generate_labeled, labeled_sample,
                               oracle_project, perspective_gradient, region)


def test_exp_sample_example(exp_fn):
    s = labeled_sample(exp_fn, 0.0, 1.0, 0.5)
    assert np.allclose(s.exact.as_array(), [0, 1, 1], atol=1e-15)
    assert np.allclose(s.input.as_array(), [0.5, 1.5, 0.5], atol=1e-15)


def test_hyperbolic_sample_example(hyp_fn):
    s = labeled_sample(hyp_fn, 0.0, 1.0, 1.0)
    assert np.allclose(s.input.as_array(), [1, 1, -1], atol=1e-15)


@pytest.mark.parametrize("t", [0.0, -1.0, math.nan])
def test_nonpositive_step_rejected(exp_fn, t):
    with pytest.raises(ValueError):
        labeled_sample(exp_fn, 0.0, 1.0, t)


def test_sample_outside_domain_rejected(hyp_fn):
    with pytest.raises(ValueError):
        labeled_sample(hyp_fn, 2.0, 1.0, 1.0)


def test_gradient_matches_finite_differences(scalar_fns, rexp_fn, rng):
    h = 1e-6
    for fn in scalar_fns.values():
        for _ in range(30):
            eta = rng.uniform(0.5, 2)
            x = rng.uniform(-2, 0.4) * eta
            gx, ge = perspective_gradient(fn, x, eta)
            fx = (fn.eval_persp(x + h, eta) - fn.eval_persp(x - h, eta)) / (2 * h)
            fe = (fn.eval_persp(x, eta + h) - fn.eval_persp(x, eta - h)) / (2 * h)
            assert gx == pytest.approx(fx, rel=1e-6, abs=1e-8)
            assert ge == pytest.approx(fe, rel=1e-6, abs=1e-8)
    x, eta = np.array([0.3, -0.4]), 0.7
    gx, ge = perspective_gradient(rexp_fn, x, eta)
    assert np.allclose(gx, x / 0.5 * math.exp(0.5 / eta))
    assert ge == pytest.approx(math.exp(0.5 / eta) * (1 - 0.5 / eta))


def test_region_bounds():
    r1, r3, r4 = region("R1"), region("r3"), region("R4")
    assert (r1.eps, r1.eta_max, r1.x_bounds(2.0)) == (1e-15, 20.0, (0.0, 20.0))
    assert region("R2").x_bounds(3.0) == (-10.0, 0.0)
    assert r3.dim == 10000 and r3.x_bounds(2.0) == (0.0, 10.0) and r3.t_open
    assert r4.x_bounds(5.0) == (-100.0, 5.0) and r4.x_hi_open
    with pytest.raises(ValueError):
        region("R9")


@pytest.mark.parametrize("kwargs", [dict(eps=0.0), dict(multiplier=-1.0),
                                    dict(eps=30.0)])
def test_invalid_regions_rejected(kwargs):
    with pytest.raises(ValueError):
        region("R1", **kwargs)


def test_empty_x_range_rejected():
    with pytest.raises(ValueError):
        RegionSpec("custom", 1e-3, 1.0, 1.0, 0.0)


def test_generation_is_deterministic(exp_fn):
    a = generate_labeled(exp_fn, region("R2"), 20, seed=7)
    b = generate_labeled(exp_fn, region("R2"), 20, seed=7)
    c = generate_labeled(exp_fn, region("R2"), 20, seed=8)
    assert all(np.array_equal(s.input.as_array(), q.input.as_array()) for s, q in zip(a, b))
    assert not np.array_equal(a[0].input.as_array(), c[0].input.as_array())


def test_prefix_stability(exp_fn):
    # one stream per index: a longer run extends a shorter one
    a = generate_labeled(exp_fn, region("R1"), 5, seed=3)
    b = generate_labeled(exp_fn, region("R1"), 50, seed=3)
    assert all(np.array_equal(s.input.as_array(), q.input.as_array()) for s, q in zip(a, b))


def test_generation_rejects_bad_requests(exp_fn, rexp_fn, hyp_fn):
    with pytest.raises(ValueError):
        generate_labeled(exp_fn, region("R2"), 0, seed=1)
    with pytest.raises(ValueError):
        generate_labeled(exp_fn, region("R3"), 2, seed=1)
    with pytest.raises(ValueError):
        generate_labeled(rexp_fn, region("R2"), 2, seed=1)
    with pytest.raises(ValueError):
        # x up to 10 eta leaves the hyperbolic domain x < eta
        generate_labeled(hyp_fn, region("R1"), 50, seed=1)


@pytest.mark.parametrize("name,reg", [("exp", "R1"), ("exp", "R2"),
                                      ("hyperbolic", "R4"), ("quadratic", "R2")])
def test_sample_invariants(scalar_fns, name, reg):
    fn = scalar_fns[name]
    spec = region(reg)
    for s in generate_labeled(fn, spec, 500, seed=11):
        e = s.exact
        assert spec.contains(e.x[0], e.eta)
        assert e.delta == pytest.approx(fn.eval_persp(e.x[0], e.eta), rel=1e-12, abs=1e-300)
        gx, ge = perspective_gradient(fn, e.x[0], e.eta)
        assert 0 < s.t <= 10
        assert np.allclose(s.input.as_array(), e.as_array() + s.t * np.array([gx, ge, -1.0]),
                           rtol=1e-15, atol=0)


def test_radial_sample_invariants(rexp_fn):
    spec = region("R3", dim=50)
    for s in generate_labeled(rexp_fn, spec, 100, seed=5):
        r = float(np.linalg.norm(s.exact.x))
        assert spec.contains(r, s.exact.eta) and r > 0
        assert 0 < s.t < 1
        assert s.exact.delta == pytest.approx(rexp_fn.eval_persp(r, s.exact.eta), rel=1e-12)
        d = s.input.x - s.exact.x
        assert abs(d @ s.exact.x) == pytest.approx(np.linalg.norm(d) * r, rel=1e-9)


def test_oracle_examples(exp_fn, quad_fn):
    assert np.allclose(oracle_project(exp_fn, ConePoint(0.0, 1.0, 2.0)).as_array(), [0, 1, 2], atol=1e-5)
    assert np.allclose(oracle_project(exp_fn, ConePoint(0.5, 1.5, 0.5)).as_array(), [0, 1, 1], atol=1e-5)
    p = ConePoint(1.0, 0.0, -1.0)
    a = oracle_project(quad_fn, p).as_array()
    b = project_epi(quad_fn, p).point.as_array()
    assert np.linalg.norm(a - b) <= 1e-4


def test_oracle_argument_checks(exp_fn, rexp_fn):
    with pytest.raises(ValueError):
        oracle_project(exp_fn, ConePoint(0.0, 1.0, 2.0), rounds=2)
    with pytest.raises(ValueError):
        oracle_project(rexp_fn, ConePoint(np.zeros(4), 1.0, 2.0))
    with pytest.raises(ValueError):
        oracle_project(exp_fn, ConePoint(np.zeros(2), 1.0, 2.0))


@pytest.mark.parametrize("name,reg,kw", [
    ("exp", "R2", {}),
    ("exp", "R1", dict(multiplier=2.0, eps=0.1)),
    ("hyperbolic", "R4", {}),
    ("quadratic", "R2", dict(multiplier=2.0, eps=0.1)),
])
def test_oracle_recovers_ground_truth(scalar_fns, name, reg, kw):
    # moderate boxes: with eta near 1e-15 the inputs reach 1e30 and no grid
    # search resolves the answer
    fn = scalar_fns[name]
    for s in generate_labeled(fn, region(reg, **kw), 25, seed=2):
        o = oracle_project(fn, s.input).as_array()
        e = s.exact.as_array()
        assert np.linalg.norm(o - e) <= 1e-4 * max(1.0, np.linalg.norm(e))


def test_oracle_radial_ground_truth(rexp_fn):
    for s in generate_labeled(rexp_fn, region("R3", dim=3), 10, seed=4):
        o = oracle_project(rexp_fn, s.input).as_array()
        e = s.exact.as_array()
        assert np.linalg.norm(o - e) <= 1e-4 * max(1.0, np.linalg.norm(e))

"""Shared oracles and samplers for the projection tests."""

import math

import numpy as np

from perspcone.projection import ConePoint, project


def rotated_soc_projection(x, eta, delta):
    """Closed-form projection onto {||x||^2 <= 2 eta delta, eta, delta >= 0}.

    With u = (eta + delta)/sqrt(2), v = (eta - delta)/sqrt(2) the set is the
    Lorentz cone ||(x, v)|| <= u, whose projection is classical.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    s2 = math.sqrt(2.0)
    u, v = (eta + delta) / s2, (eta - delta) / s2
    z = np.append(x, v)
    nz = float(np.linalg.norm(z))
    if nz <= u:
        pu, pz = u, z
    elif nz <= -u:
        pu, pz = 0.0, np.zeros_like(z)
    else:
        a = 0.5 * (u + nz)
        pu, pz = a, a * z / nz
    pv = pz[-1]
    return np.append(pz[:-1], [(pu + pv) / s2, (pu - pv) / s2])


def random_points(rng, n, dim=1, spread=3.0):
    """Mix of uniform points and points near the origin and near boundaries."""
    pts = []
    for i in range(n):
        kind = i % 4
        if kind == 0:
            z = rng.uniform(-spread, spread, dim + 2)
        elif kind == 1:
            z = rng.normal(size=dim + 2) * spread / 3
        elif kind == 2:
            z = rng.uniform(-spread, spread, dim + 2) * 10.0 ** rng.uniform(-3, 0)
        else:
            z = rng.uniform(-spread, spread, dim + 2)
            z[-1] = rng.uniform(-0.1, 0.1)
        pts.append(ConePoint(z[:-2], z[-2], z[-1]))
    return pts


def random_cone_points(fn, rng, n, dim=1):
    """Cone points: boundary or interior points of the epigraph, some on eta = 0."""
    out = []
    radial = dim > 1 or fn.radial
    while len(out) < n:
        eta = 10.0 ** rng.uniform(-2, 0.5)
        if radial:
            x = rng.normal(size=dim)
            x *= rng.uniform(0, 2) * eta / max(np.linalg.norm(x), 1e-300)
            val = fn.eval_persp(float(np.linalg.norm(x)), eta)
        else:
            x = np.array([rng.uniform(-3, 1) * eta])
            val = fn.eval_persp(float(x[0]), eta)
        if not math.isfinite(val):
            continue
        if rng.random() < 0.2:
            # recession face: eta = 0 and rec f(x) <= delta
            base = np.linalg.norm(x) if radial else float(x[0])
            if math.isfinite(fn.eval_rec(base)):
                out.append(ConePoint(x, 0.0, max(0.0, val) + rng.uniform(0, 1)))
                continue
        out.append(ConePoint(x, eta, val + rng.uniform(0, 1) * (rng.random() < 0.5)))
    return out


def vec(p):
    return p.as_array()


def proj(fn, p, cfg=None):
    return project(fn, p, cfg)

"""Labeled test points with known projections, and a brute-force oracle.

If ``z`` is on the boundary of the cone and ``g`` is the gradient of ``f~`` at
``(z_x, z_eta)``, then ``(g, -1)`` is an outward normal there and every point
``z + t (g, -1)``, ``t > 0``, projects onto ``z``. The generators sample ``z``
from one of four benchmark regions and then step along the normal.

Randomness comes from one PCG64 stream per sample index, derived from the
user seed with :class:`numpy.random.SeedSequence`, so sample ``i`` does not
depend on how many samples are drawn.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .functions import (ExpFunction, HyperbolicFunction, QuadraticFunction,
                        RadialExpFunction)
from .projection import ConePoint

__all__ = [
    "RegionSpec",
    "LabeledSample",
    "region",
    "REGIONS",
    "labeled_sample",
    "generate_labeled",
    "perspective_gradient",
    "oracle_project",
]


@dataclass(frozen=True)
class RegionSpec:
    """Sampling box for boundary points ``(x, eta, f~(x, eta))``.

    ``eta`` is drawn log-uniformly from ``[eps, eta_max]``. The bound on ``x``
    (on ``||x||`` when ``dim > 1``) is ``[x_lo, x_hi]``; a bound flagged
    ``*_rel`` is a multiple of ``eta``. ``t`` is drawn from ``(0, t_max]``, or
    ``(0, t_max)`` when ``t_open``.
    """

    name: str
    eps: float
    eta_max: float
    x_lo: float
    x_hi: float
    x_lo_rel: bool = False
    x_hi_rel: bool = False
    x_hi_open: bool = False
    multiplier: float = 1.0
    t_max: float = 10.0
    t_open: bool = False
    dim: int = 1

    def __post_init__(self):
        if not (self.eps > 0 and self.multiplier > 0 and self.t_max > 0):
            raise ValueError("eps, multiplier and t_max must be positive")
        if not self.eps < self.eta_max:
            raise ValueError(f"empty eta range [{self.eps}, {self.eta_max}]")
        if self.dim < 1:
            raise ValueError("dim must be at least 1")
        for eta in (self.eps, self.eta_max):
            lo, hi = self.x_bounds(eta)
            if not lo < hi:
                raise ValueError(f"empty x range [{lo}, {hi}] at eta={eta}")
        if self.dim > 1 and self.x_bounds(self.eps)[0] < 0:
            raise ValueError("norm bounds must be nonnegative")

    def x_bounds(self, eta: float) -> tuple[float, float]:
        lo = self.x_lo * eta if self.x_lo_rel else self.x_lo
        hi = self.x_hi * eta if self.x_hi_rel else self.x_hi
        return lo, hi

    def contains(self, x: float, eta: float) -> bool:
        """Membership of a boundary point's ``(x or ||x||, eta)``."""
        lo, hi = self.x_bounds(eta)
        upper = x < hi if self.x_hi_open else x <= hi * (1 + 1e-12)
        return (self.eps * (1 - 1e-12) <= eta <= self.eta_max * (1 + 1e-12)
                and lo * (1 + 1e-12) - 1e-300 <= x and upper)


def _r1(multiplier=10.0, eps=1e-15, dim=1):
    return RegionSpec("R1", eps, 20.0, 0.0, multiplier, x_hi_rel=True,
                      multiplier=multiplier)


def _r2(multiplier=10.0, eps=1e-15, dim=1):
    return RegionSpec("R2", eps, 20.0, -multiplier, 0.0, multiplier=multiplier)


def _r3(multiplier=5.0, eps=1.0, dim=10000):
    # the lower norm bound is open; a zero norm is redrawn
    return RegionSpec("R3", eps, 10.0, 0.0, multiplier, x_hi_rel=True,
                      multiplier=multiplier, t_max=1.0, t_open=True, dim=dim)


def _r4(multiplier=1.0, eps=1e-15, dim=1):
    return RegionSpec("R4", eps, 100.0, -100.0, 1.0, x_hi_rel=True,
                      x_hi_open=True, multiplier=multiplier)


REGIONS = {"R1": _r1, "R2": _r2, "R3": _r3, "R4": _r4}


def region(name: str, **overrides) -> RegionSpec:
    """Benchmark region by name (``"R1"`` ... ``"R4"``, case-insensitive)."""
    try:
        make = REGIONS[name.upper()]
    except KeyError:
        raise ValueError(f"unknown region {name!r}") from None
    return make(**overrides)


@dataclass(frozen=True)
class LabeledSample:
    input: ConePoint
    exact: ConePoint
    t: float
    region: str


def perspective_gradient(fn, x, eta: float):
    """Gradient of ``f~`` at ``(x, eta)``, ``eta > 0``, inside ``dom f~``.

    Returns ``(g_x, g_eta)``; ``g_x`` is an array when ``x`` is.
    """
    if not eta > 0:
        raise ValueError("gradient needs eta > 0")
    if np.ndim(x) > 0:
        x = np.asarray(x, dtype=float)
        r = float(np.linalg.norm(x))
        u = r / eta
        d = fn.grad_f(u)
        direction = x / r if r > 0 else np.zeros_like(x)
        return direction * d, fn.eval_f(u) - u * d
    x = float(x)
    u = x / eta
    if isinstance(fn, ExpFunction):
        e = math.exp(u)
        return e, e * (1.0 - u)
    if isinstance(fn, HyperbolicFunction):
        d = eta - x
        return eta * eta / (d * d), -(x * x) / (d * d)
    if isinstance(fn, QuadraticFunction):
        return u, -0.5 * u * u
    d = fn.grad_f(u)
    return d, fn.eval_f(u) - u * d


def labeled_sample(fn, x, eta: float, t: float, name: str = "custom") -> LabeledSample:
    """Labeled sample: boundary point ``(x, eta, f~)`` pushed out by ``t``."""
    if not t > 0:
        raise ValueError(f"step length must be positive, got {t!r}")
    vector = np.ndim(x) > 0
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    base = float(np.linalg.norm(xv)) if vector else float(xv[0])
    delta = fn.eval_persp(base, float(eta))
    if not math.isfinite(delta):
        raise ValueError(f"({x!r}, {eta!r}) is outside the domain")
    gx, ge = perspective_gradient(fn, xv if vector else float(xv[0]), float(eta))
    exact = ConePoint(xv, eta, delta)
    inp = ConePoint(xv + t * np.atleast_1d(gx), eta + t * ge, delta - t)
    return LabeledSample(inp, exact, float(t), name)


def _stream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(seed, spawn_key=(index,))))


def _draw(fn, spec: RegionSpec, rng: np.random.Generator):
    eta = math.exp(rng.uniform(math.log(spec.eps), math.log(spec.eta_max)))
    eta = min(max(eta, spec.eps), spec.eta_max)
    lo, hi = spec.x_bounds(eta)
    while True:
        xs = lo + (hi - lo) * rng.random()
        if spec.dim > 1 and xs == 0.0:
            continue
        if spec.x_hi_open and xs >= hi:
            continue
        break
    while True:
        t = spec.t_max * (1.0 - rng.random())
        if not (spec.t_open and t >= spec.t_max):
            break
    if spec.dim > 1:
        v = rng.standard_normal(spec.dim)
        x = v * (xs / np.linalg.norm(v))
    else:
        x = xs
    return x, eta, t


def generate_labeled(fn, spec: RegionSpec, count: int, seed: int) -> list[LabeledSample]:
    """Draw ``count`` labeled samples from ``spec``; deterministic in ``seed``.

    Raises
    ------
    ValueError
        If ``count < 1`` or the region does not fit the function (vector
        regions need a radial function, and boundary points must lie in the
        domain of ``f~``).
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if spec.dim > 1 and not fn.radial:
        raise ValueError(f"region {spec.name} is {spec.dim}-dimensional but "
                         "the function is not radial")
    if isinstance(fn, RadialExpFunction) and spec.dim == 1:
        raise ValueError("the radial profile needs a vector region")
    out = []
    for i in range(count):
        x, eta, t = _draw(fn, spec, _stream(seed, i))
        try:
            out.append(labeled_sample(fn, x, eta, t, spec.name))
        except ValueError:
            raise ValueError(f"region {spec.name} leaves the domain of the "
                             f"function at x={x!r}, eta={eta!r}") from None
    return out


# ---------------------------------------------------------------- oracle
#
# Three parametrizations of the epigraph are searched: over (x', eta') with
# delta' = max(delta, f~); over (eta', delta') with x' the nearest feasible
# value; over (x', delta') with eta' the nearest feasible value. Each is
# badly conditioned somewhere (the first wherever f~ is steep), but every
# candidate is a cone point, and for a cone point z the inequality
# ||p - z||^2 >= ||p - P(p)||^2 + ||z - P(p)||^2 makes the closest
# candidate also the most accurate one.

_SCAN = 64


@njit
def _persp(fn, radial, z):
    if radial:
        r = 0.0
        for k in range(z.size - 1):
            r += z[k] * z[k]
        return fn.eval_persp(math.sqrt(r), z[z.size - 1])
    return fn.eval_persp(z[0], z[1])


@njit
def _slice_value(fn, which, fixed, s):
    if which == 0:
        return fn.eval_persp(s, fixed)
    return fn.eval_persp(fixed, s)


@njit
def _nearest_in_slice(fn, which, fixed, target, level, window):
    # nearest s to target with f~ <= level, the other coordinate held fixed;
    # the feasible set is an interval because f~ is jointly convex
    if _slice_value(fn, which, fixed, target) <= level:
        return target
    step = 2.0 * window / _SCAN
    best_s = math.nan
    best_v = math.inf
    for k in range(_SCAN + 1):
        s = target - window + k * step
        v = _slice_value(fn, which, fixed, s)
        if v < best_v:
            best_v = v
            best_s = s
    if best_s != best_s:
        return math.nan
    if best_v > level:
        a = best_s - step
        b = best_s + step
        ratio = 0.6180339887498949
        for _ in range(60):
            c = b - ratio * (b - a)
            d = a + ratio * (b - a)
            if _slice_value(fn, which, fixed, c) <= _slice_value(fn, which, fixed, d):
                b = d
            else:
                a = c
        best_s = 0.5 * (a + b)
        if _slice_value(fn, which, fixed, best_s) > level:
            return math.nan
    a = best_s
    b = target
    for _ in range(100):
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        if _slice_value(fn, which, fixed, m) <= level:
            a = m
        else:
            b = m
    return a


@njit
def _radius(fn, eta, level, rmax):
    # largest r <= rmax with phi~(r, eta) <= level
    if not fn.eval_persp(0.0, eta) <= level:
        return math.nan
    if fn.eval_persp(rmax, eta) <= level:
        return rmax
    a = 0.0
    b = rmax
    for _ in range(200):
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        if fn.eval_persp(m, eta) <= level:
            a = m
        else:
            b = m
    return a


@njit
def _candidate(fn, mode, radial, v, p, window, out):
    n = p.size - 2
    if mode == 0:
        for k in range(n + 1):
            out[k] = v[k]
        f = _persp(fn, radial, out[:n + 1])
        if not f < math.inf:
            return False
        out[n + 1] = max(p[n + 1], f)
        return True
    if mode == 1:
        out[n] = v[0]
        out[n + 1] = v[1]
        if radial:
            r = 0.0
            for k in range(n):
                r += p[k] * p[k]
            r = math.sqrt(r)
            rho = _radius(fn, v[0], v[1], r)
            if rho != rho:
                return False
            sc = rho / r if r > 0.0 else 0.0
            for k in range(n):
                out[k] = p[k] * sc
        else:
            s = _nearest_in_slice(fn, 0, v[0], p[0], v[1], window)
            if s != s:
                return False
            out[0] = s
        return True
    s = _nearest_in_slice(fn, 1, v[0], p[1], v[1], window)
    if s != s:
        return False
    out[0] = v[0]
    out[1] = s
    out[2] = v[1]
    return True


@njit
def _dist2(a, b):
    s = 0.0
    for k in range(a.size):
        s += (a[k] - b[k]) ** 2
    return s


@njit
def _refine(fn, mode, radial, p, v0, halfwidth, rounds, g):
    d = v0.size
    cand = np.empty(p.size)
    best_pt = np.full(p.size, math.nan)
    best_val = math.inf
    best = v0.copy()
    center = v0.copy()
    if _candidate(fn, mode, radial, best, p, halfwidth, cand):
        best_val = _dist2(cand, p)
        best_pt[:] = cand
    h = halfwidth
    v = np.empty(d)
    idx = np.zeros(d, dtype=np.int64)
    total = g ** d
    done = 0
    recenters = 0
    while done < rounds and recenters < 100:
        idx[:] = 0
        for _ in range(total):
            for k in range(d):
                v[k] = center[k] - h + 2.0 * h * idx[k] / (g - 1)
            if _candidate(fn, mode, radial, v, p, halfwidth, cand):
                val = _dist2(cand, p)
                if val < best_val:
                    best_val = val
                    best_pt[:] = cand
                    best[:] = v
            k = 0
            while k < d:
                idx[k] += 1
                if idx[k] < g:
                    break
                idx[k] = 0
                k += 1
        on_edge = False
        for k in range(d):
            if abs(best[k] - center[k]) > h * (1.0 - 1.5 / (g - 1)):
                on_edge = True
        center[:] = best
        # an incumbent on the edge means the box missed the minimizer:
        # re-center without shrinking
        if on_edge:
            recenters += 1
        else:
            h /= 10.0
            done += 1
    return best_pt, best_val


def oracle_project(fn, p: ConePoint, box_halfwidth: float | None = None,
                   rounds: int = 8) -> ConePoint:
    """Projection by nested grid refinement; independent of the solvers.

    Minimizes ``||p - z||^2`` over cone points by searching a grid on a box
    around the incumbent and shrinking the box tenfold per round. The
    search is run in several coordinate systems of the epigraph and the
    closest cone point found is returned. Supports scalar points and radial
    functions with ``len(x) <= 3``.
    """
    if rounds < 3:
        raise ValueError("rounds must be at least 3")
    n = p.x.size
    radial = n > 1 or bool(fn.radial)
    if n > 3:
        raise ValueError("the grid oracle is limited to len(x) <= 3")
    if radial and not fn.radial:
        raise ValueError("vector points need a radial function")
    z = p.as_array()
    if box_halfwidth is None:
        box_halfwidth = 2.0 * max(1.0, float(np.max(np.abs(z))))
    starts = [(0, z[:n + 1]), (1, z[n:])]
    if not radial:
        starts.append((2, z[[0, 2]]))
    best, best_val = np.zeros_like(z), _dist2(np.zeros_like(z), z)
    for mode, v0 in starts:
        g = 41 if v0.size <= 2 else 25
        pt, val = _refine(fn, mode, radial, z, np.ascontiguousarray(v0),
                          float(box_halfwidth), int(rounds), g)
        if val < best_val:
            best, best_val = pt, val
    return ConePoint.from_array(best)

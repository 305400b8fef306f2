"""Scalar special functions: principal Lambert W and monotone cubic roots.

Everything here is compiled with numba and callable both from Python and
from other jitted code.
"""

from __future__ import annotations

import math

from numba import njit

__all__ = ["lambert_w", "lambert_w_of_exp", "safeguarded_cubic_root"]

_INV_E = math.exp(-1.0)
_BRANCH_SLACK = 1e-12
_MAX_ITER = 50
# W(e^s) switches to the log-domain iteration above this s.
_LOG_SWITCH = 2.0


@njit(cache=True)
def _halley_w(z, w):
    for _ in range(_MAX_ITER):
        ew = math.exp(w)
        r = w * ew - z
        wp1 = w + 1.0
        if wp1 <= 0.0 or r == 0.0:
            break
        dw = r / (ew * wp1 - 0.5 * (w + 2.0) * r / wp1)
        w_new = w - dw
        if w_new < -1.0:
            w_new = -1.0
        if abs(w_new - w) <= 1e-15 * (1.0 + abs(w_new)):
            w = w_new
            break
        w = w_new
    return w


@njit(cache=True)
def _w_log_domain(s):
    # Solves w + log(w) = s for s > _LOG_SWITCH, where w > 1.
    ls = math.log(s)
    w = s - ls + ls / s
    for _ in range(_MAX_ITER):
        h = w + math.log(w) - s
        hp = 1.0 + 1.0 / w
        dw = h / (hp + 0.5 * h / (w * w * hp))
        w -= dw
        if abs(dw) <= 4e-16 * w:
            break
    return w


@njit(cache=True)
def lambert_w(z):
    """Principal branch of the Lambert W function.

    Parameters
    ----------
    z : float
        Argument, ``z >= -1/e``. Values within ``1e-12`` below the branch
        point are clamped to it.

    Returns
    -------
    float
        ``w >= -1`` with ``w * exp(w) == z``.

    Raises
    ------
    ValueError
        If ``z < -1/e - 1e-12``.
    """
    if z != z:
        return z
    if z < -_INV_E - _BRANCH_SLACK:
        raise ValueError("lambert_w: argument below the branch point -1/e")
    if z <= -_INV_E:
        return -1.0
    if z == 0.0:
        return 0.0
    if z == math.inf:
        return math.inf
    if z > 1e300:
        return _w_log_domain(math.log(z))
    if z < -0.32:
        p = math.sqrt(max(2.0 * (math.e * z + 1.0), 0.0))
        w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * 11.0 / 72.0))
    elif z < 3.0:
        l1 = math.log1p(z)
        w = l1 * (1.0 - math.log1p(l1) / (2.0 + l1))
    else:
        l1 = math.log(z)
        l2 = math.log(l1)
        w = l1 - l2 + l2 / l1
    return _halley_w(z, w)


@njit(cache=True)
def lambert_w_of_exp(s):
    """``W(exp(s))`` without forming ``exp(s)`` when it would overflow.

    For ``s > 2`` this solves ``w + log(w) = s`` directly; below that the
    exponential is harmless and :func:`lambert_w` is used.
    """
    if s != s:
        return s
    if s > _LOG_SWITCH:
        if s == math.inf:
            return math.inf
        return _w_log_domain(s)
    return lambert_w(math.exp(s))


@njit(cache=True)
def safeguarded_cubic_root(c2, c1, c0, lo, hi):
    """Root of the monic cubic ``t^3 + c2 t^2 + c1 t + c0`` inside ``[lo, hi]``.

    The cubic must be increasing and convex on the bracket with a
    nonpositive value at ``lo`` and a positive value at ``hi``. Newton steps
    start from ``hi`` (which makes them monotone for convex increasing
    polynomials); any step leaving the current bracket is replaced by a
    bisection step.
    """
    t = hi
    for _ in range(200):
        v = ((t + c2) * t + c1) * t + c0
        if v == 0.0:
            return t
        if v > 0.0:
            hi = t
        else:
            lo = t
        d = (3.0 * t + 2.0 * c2) * t + c1
        if d > 0.0:
            t_new = t - v / d
        else:
            t_new = 0.5 * (lo + hi)
        if not (lo <= t_new <= hi):
            t_new = 0.5 * (lo + hi)
        if abs(t_new - t) <= 4e-16 * abs(t) or hi - lo <= 4e-16 * abs(hi):
            return t_new
        t = t_new
    return t

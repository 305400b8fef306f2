"""Bracketed scalar root finding.

The kernels ``brent_core`` and ``bisect_core`` take an objective ``g`` and an
argument tuple and call ``g(t, args)``. Inside jitted code ``g`` is another
jitted function; the Python entry points (:func:`solve_brent`,
:func:`solve_bisection`, :func:`expand_bracket`) run the very same kernels
uncompiled (``.py_func``) so they accept any Python callable.

Objectives may return ``+inf`` (counted as positive) or ``-inf``; infinite
endpoint values force bisection steps until both ends are finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from numba import njit

from .errors import BracketExpansionExceeded

__all__ = [
    "Bracket",
    "RootResult",
    "SolverConfig",
    "expand_bracket",
    "solve_bisection",
    "solve_brent",
]

# status codes shared with the jitted projection kernels
OK = 0
NAN_OBJECTIVE = 1
NOT_CONVERGED = 2

RTOL = 4.0 * 2.220446049250313e-16


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and limits for the outer (mu) and inner (nu) equations.

    ``method`` selects the outer solver: ``"brent"`` or ``"bisection"`` (the
    latter reproduces the halving loop with its a-priori error bound). The
    inner equation is always solved with Brent's method.

    ``tol_outer`` is an error target for the projected point. Bisection
    locates ``mu`` to within ``tol_outer``. Brent goes on until
    ``|mu - mu*| <= tol_outer * mu / ||p - P(p)||``, which keeps the point
    within about ``tol_outer`` even when ``mu`` is tiny next to the distance;
    if the result then violates membership by more than ``tol_outer`` it is
    moved to the feasible side of the final bracket.

    With ``norm_bracket`` the outer upper bound is additionally capped by the
    norm of the point, which also bounds ``mu`` (the origin is in the cone).
    Turning it off gives the plain bracket: ``f~(P) - delta``, or growth
    probes when that is infinite.
    """

    tol_outer: float = 1e-9
    tol_inner: float | None = None
    bracket_growth: float = 2.0
    max_expansions: int = 200
    max_iterations: int = 200
    method: str = "brent"
    norm_bracket: bool = True

    def __post_init__(self):
        if self.tol_inner is None:
            object.__setattr__(self, "tol_inner", self.tol_outer / 10.0)
        if not (self.tol_outer > 0 and self.tol_inner > 0):
            raise ValueError("tolerances must be positive")
        if not self.bracket_growth > 1:
            raise ValueError("bracket_growth must exceed 1")
        if self.max_expansions < 1 or self.max_iterations < 1:
            raise ValueError("iteration caps must be positive")
        if self.method not in ("brent", "bisection"):
            raise ValueError(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class Bracket:
    """Interval with ``g(lo) <= 0 < g(hi)``; the objective values are kept."""

    lo: float
    hi: float
    g_lo: float
    g_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty bracket [{self.lo}, {self.hi}]")
        if not (self.g_lo <= 0 < self.g_hi):
            raise ValueError(
                f"no sign change: g(lo)={self.g_lo}, g(hi)={self.g_hi}")

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class RootResult:
    root: float
    residual: float
    iterations: int
    bracket_width: float


@njit
def brent_core(g, args, a, b, fa, fb, xtol, rtol, maxiter):
    """Brent's method on ``[a, b]`` given ``fa = g(a) <= 0 < fb = g(b)``.

    Returns ``(root, g(root), iterations, final bracket width, status)``.
    """
    if fa == 0.0:
        return a, fa, 0, b - a, OK
    if fb == 0.0:
        return b, fb, 0, b - a, OK
    xpre, fpre = a, fa
    xcur, fcur = b, fb
    xblk, fblk = a, fa
    spre = scur = b - a
    for it in range(1, maxiter + 1):
        if (fpre < 0.0) != (fcur < 0.0):
            xblk, fblk = xpre, fpre
            spre = scur = xcur - xpre
        if abs(fblk) < abs(fcur):
            xpre, fpre = xcur, fcur
            xcur, fcur = xblk, fblk
            xblk, fblk = xpre, fpre
        tol = 0.5 * (xtol + rtol * abs(xcur))
        sbis = 0.5 * (xblk - xcur)
        if fcur == 0.0 or abs(sbis) < tol:
            return xcur, fcur, it - 1, abs(xblk - xcur), OK
        finite = (math.isfinite(fpre) and math.isfinite(fcur)
                  and math.isfinite(fblk))
        if finite and abs(spre) > tol and abs(fcur) < abs(fpre):
            if xpre == xblk:
                stry = -fcur * (xcur - xpre) / (fcur - fpre)
            else:
                dpre = (fpre - fcur) / (xpre - xcur)
                dblk = (fblk - fcur) / (xblk - xcur)
                stry = (-fcur * (fblk * dblk - fpre * dpre)
                        / (dblk * dpre * (fblk - fpre)))
            if 2.0 * abs(stry) < min(abs(spre), 3.0 * abs(sbis) - tol):
                spre = scur
                scur = stry
            else:
                spre = sbis
                scur = sbis
        else:
            spre = sbis
            scur = sbis
        xpre, fpre = xcur, fcur
        if abs(scur) > tol:
            xcur += scur
        elif sbis > 0.0:
            xcur += tol
        else:
            xcur -= tol
        fcur = g(xcur, args)
        if fcur != fcur:
            return xcur, fcur, it, abs(xblk - xcur), NAN_OBJECTIVE
    return xcur, fcur, maxiter, abs(xblk - xcur), NOT_CONVERGED


@njit
def bisect_core(g, args, a, b, fa, fb, eps):
    """Plain halving on ``[a, b]`` for ``ceil(log2((b - a) / eps))`` steps.

    Returns the midpoint of the final interval; its distance to the root is
    at most ``eps / 2``. A midpoint with ``g == 0`` is returned at once.
    """
    width = b - a
    m = 0
    if width > eps:
        m = int(math.ceil(math.log2(width / eps)))
    lo, hi = a, b
    for it in range(1, m + 1):
        mid = 0.5 * (lo + hi)
        gm = g(mid, args)
        if gm != gm:
            return mid, gm, it, hi - lo, NAN_OBJECTIVE
        if gm == 0.0:
            return mid, gm, it, hi - lo, OK
        if gm > 0.0:
            hi = mid
        else:
            lo = mid
    root = 0.5 * (lo + hi)
    return root, g(root, args), m, hi - lo, OK


def _call(t, g):
    return g(t)


def expand_bracket(g: Callable[[float], float], growth: float = 2.0,
                   max_expansions: int = 200) -> Bracket:
    """Grow ``hi = growth**k``, ``k = 1, 2, ...``, until ``g(hi) > 0``.

    ``g`` must be increasing on ``(0, inf)`` and negative near ``0``. The low
    end is the previous probe, or ``0`` when the first probe already works
    (its value is then reported as ``-inf``, the limit used by the solvers).
    """
    if not growth > 1:
        raise ValueError("growth must exceed 1")
    lo, g_lo = 0.0, -math.inf
    hi = float(growth)
    for _ in range(max_expansions):
        g_hi = g(hi)
        if g_hi > 0:
            return Bracket(lo, hi, g_lo, g_hi)
        lo, g_lo = hi, g_hi
        hi *= growth
    raise BracketExpansionExceeded(
        f"no sign change up to {lo:g} after {max_expansions} expansions")


def solve_bisection(g: Callable[[float], float], bracket: Bracket,
                    eps: float) -> RootResult:
    root, res, it, width, status = bisect_core.py_func(
        _call, g, bracket.lo, bracket.hi, bracket.g_lo, bracket.g_hi, eps)
    if status != OK:
        raise ArithmeticError(f"objective returned NaN at {root!r}")
    return RootResult(root, abs(res), it, width)


def solve_brent(g: Callable[[float], float], bracket: Bracket, eps: float,
                max_iterations: int = 200) -> RootResult:
    """Brent's method with absolute tolerance ``eps`` (plus a few ulps)."""
    root, res, it, width, status = brent_core.py_func(
        _call, g, bracket.lo, bracket.hi, bracket.g_lo, bracket.g_hi, eps,
        RTOL, max_iterations)
    if status == NAN_OBJECTIVE:
        raise ArithmeticError(f"objective returned NaN at {root!r}")
    return RootResult(root, abs(res), it, width)

"""Cone-defining scalar convex functions.

A function object bundles ``f``, its conjugate, both proximity operators,
the recession function and the domain projections needed to project onto
the epigraph of its perspective. The projection kernels are compiled with
numba, so function objects are numba ``jitclass`` instances; a user-defined
function only has to provide the same methods (see
:class:`ScalarConvexFunction`).

Extended-real values are plain floats: ``+inf`` marks points outside the
domain, and no method returns NaN on finite input.
"""

from __future__ import annotations

import math
from typing import Protocol

from numba import njit
from numba.experimental import jitclass
from numba.types import boolean

from .special import lambert_w_of_exp, safeguarded_cubic_root

__all__ = [
    "ScalarConvexFunction",
    "ExpFunction",
    "HyperbolicFunction",
    "QuadraticFunction",
    "RadialExpFunction",
    "exp_prox_f",
    "exp_value_at_prox",
    "exp_prox_fstar",
    "exp_value_at_prox_fstar",
    "hyp_prox_f",
    "hyp_prox_fstar",
    "get_function",
    "FUNCTIONS",
]

INF = math.inf
GAMMA_FLOOR = 1e-300
# exp(t) is formed as exp(log(eta) + t) above this exponent
_EXP_LOG_SWITCH = 700.0


class ScalarConvexFunction(Protocol):
    """Methods every cone-defining function provides.

    ``radial`` is true when the function is even, supercoercive and has full
    domain, which is what the radial projection in R^n requires.
    """

    radial: bool

    def eval_f(self, x: float) -> float: ...
    def grad_f(self, x: float) -> float: ...
    def eval_fstar(self, u: float) -> float: ...
    def eval_rec(self, x: float) -> float: ...
    def eval_persp(self, x: float, eta: float) -> float: ...
    def prox_f(self, gamma: float, x: float) -> float: ...
    def prox_fstar(self, gamma: float, x: float) -> float: ...
    def prox_rec(self, gamma: float, x: float) -> float: ...
    def project_dom_fstar(self, u: float) -> float: ...
    def project_dom_persp(self, x: float, eta: float) -> tuple[float, float]: ...

    def prox_f_and_value(self, gamma: float, x: float) -> tuple[float, float]:
        """``(p, f(p))`` with ``p = prox_{gamma f}(x)``."""

    def value_at_prox_fstar(self, gamma: float, x: float) -> float:
        """``f*(prox_{gamma f*}(x))``."""


# ---------------------------------------------------------------- exponential

@njit(cache=True)
def _exp_f_and_prox(gamma, x):
    gamma = max(gamma, GAMMA_FLOOR)
    w = lambert_w_of_exp(math.log(gamma) + x)
    if w <= 1.0:
        p = x - w
    else:
        # x - w = log(w) - log(gamma) since w + log(w) = log(gamma) + x
        p = math.log(w) - math.log(gamma)
    if w > 1e-290:
        value = w / gamma
    else:
        value = math.exp(p)
    return p, value


@njit(cache=True)
def exp_prox_f(gamma, x):
    """``prox_{gamma exp}(x) = x - W(gamma e^x)``, overflow-safe."""
    return _exp_f_and_prox(gamma, x)[0]


@njit(cache=True)
def exp_value_at_prox(gamma, x):
    """``exp(prox_{gamma exp}(x)) = W(gamma e^x) / gamma``."""
    return _exp_f_and_prox(gamma, x)[1]


@njit(cache=True)
def _exp_fstar(u):
    if u > 0.0:
        return u * (math.log(u) - 1.0)
    if u == 0.0:
        return 0.0
    return INF


@njit(cache=True)
def exp_prox_fstar(gamma, x):
    """``prox_{gamma f*}(x) = gamma W(e^{x/gamma} / gamma)`` for ``f = exp``."""
    gamma = max(gamma, GAMMA_FLOOR)
    w = lambert_w_of_exp(x / gamma - math.log(gamma))
    if w == INF:
        return max(x, 0.0)
    return gamma * w


@njit(cache=True)
def exp_value_at_prox_fstar(gamma, x):
    """``f*(prox_{gamma f*}(x))`` for ``f = exp``, without cancellation."""
    gamma = max(gamma, GAMMA_FLOOR)
    s = x / gamma - math.log(gamma)
    w = lambert_w_of_exp(s)
    if w == 0.0:
        return 0.0
    if w == INF:
        return _exp_fstar(max(x, 0.0))
    q = gamma * w
    # log(w) = s - w is exact in spirit and safe when w underflows
    logw = s - w if w < 1.0 else math.log(w)
    return q * (math.log(gamma) + logw - 1.0)


@njit(cache=True)
def _exp_persp(xa, eta):
    # perspective of exp at (|x| or x, eta), eta > 0 assumed
    t = xa / eta
    if t > _EXP_LOG_SWITCH:
        return math.exp(math.log(eta) + t)
    return eta * math.exp(t)


@jitclass([("radial", boolean)])
class ExpFunction:
    """``f(x) = e^x``; the epigraph of its perspective is the exponential cone."""

    def __init__(self):
        self.radial = False

    def eval_f(self, x):
        return math.exp(x) if x < 709.0 else INF

    def grad_f(self, x):
        return self.eval_f(x)

    def eval_fstar(self, u):
        return _exp_fstar(u)

    def eval_rec(self, x):
        return 0.0 if x <= 0.0 else INF

    def eval_persp(self, x, eta):
        if eta > 0.0:
            return _exp_persp(x, eta)
        if eta == 0.0:
            return self.eval_rec(x)
        return INF

    def prox_f(self, gamma, x):
        return exp_prox_f(gamma, x)

    def prox_fstar(self, gamma, x):
        return exp_prox_fstar(gamma, x)

    def prox_rec(self, gamma, x):
        return min(x, 0.0)

    def project_dom_fstar(self, u):
        return max(u, 0.0)

    def project_dom_persp(self, x, eta):
        return x, max(eta, 0.0)

    def prox_f_and_value(self, gamma, x):
        return _exp_f_and_prox(gamma, x)

    def value_at_prox_fstar(self, gamma, x):
        return exp_value_at_prox_fstar(gamma, x)


@jitclass([("radial", boolean)])
class RadialExpFunction:
    """``phi(t) = e^{|t|}``, the profile of the radial exponential cone."""

    def __init__(self):
        self.radial = True

    def eval_f(self, x):
        a = abs(x)
        return math.exp(a) if a < 709.0 else INF

    def grad_f(self, x):
        if x == 0.0:
            return 0.0
        g = self.eval_f(x)
        return g if x > 0.0 else -g

    def eval_fstar(self, u):
        a = abs(u)
        if a <= 1.0:
            return -1.0
        return a * (math.log(a) - 1.0)

    def eval_rec(self, x):
        return 0.0 if x == 0.0 else INF

    def eval_persp(self, x, eta):
        if eta > 0.0:
            return _exp_persp(abs(x), eta)
        if eta == 0.0:
            return self.eval_rec(x)
        return INF

    def prox_f(self, gamma, x):
        return self.prox_f_and_value(gamma, x)[0]

    def prox_fstar(self, gamma, x):
        a = abs(x)
        if a <= 1.0:
            return x
        q = exp_prox_fstar(gamma, a)
        return q if x > 0.0 else -q

    def prox_rec(self, gamma, x):
        return 0.0

    def project_dom_fstar(self, u):
        return u

    def project_dom_persp(self, x, eta):
        return x, max(eta, 0.0)

    def prox_f_and_value(self, gamma, x):
        a = abs(x)
        if a <= max(gamma, GAMMA_FLOOR):
            return 0.0, 1.0
        p, v = _exp_f_and_prox(gamma, a)
        if p < 0.0:
            p = 0.0
        return (p if x > 0.0 else -p), v

    def value_at_prox_fstar(self, gamma, x):
        a = abs(x)
        if a <= 1.0:
            return -1.0
        return exp_value_at_prox_fstar(gamma, a)


# ----------------------------------------------------------------- hyperbolic

@njit(cache=True)
def _hyp_prox_parts(gamma, x):
    # returns (p, 1 - p) for the root p < 1 of (x - p)(1 - p)^2 = gamma
    gamma = max(gamma, GAMMA_FLOOR)
    a = x - 1.0
    if a >= 0.0:
        # u = 1 - p:  u^3 + a u^2 - gamma = 0
        hi = gamma ** (1.0 / 3.0)
        if a > 0.0:
            hi = min(hi, math.sqrt(gamma / a))
        u = safeguarded_cubic_root(a, 0.0, -gamma, 0.0, hi)
        return 1.0 - u, u
    # w = x - p:  w (w - a)^2 - gamma = 0
    hi = min(gamma / (a * a), gamma ** (1.0 / 3.0))
    w = safeguarded_cubic_root(-2.0 * a, a * a, -gamma, 0.0, hi)
    return x - w, w - a


@njit(cache=True)
def hyp_prox_f(gamma, x):
    """``prox_{gamma f}(x)`` for ``f(x) = x / (1 - x)``: the root ``p < 1`` of
    ``(x - p)(1 - p)^2 = gamma``."""
    return _hyp_prox_parts(gamma, x)[0]


@njit(cache=True)
def hyp_prox_fstar(gamma, x):
    """``prox_{gamma f*}(x)``: the root ``q > max(x - gamma, 0)`` of
    ``q (q + gamma - x)^2 = gamma^2``."""
    gamma = max(gamma, GAMMA_FLOOR)
    b = gamma - x
    g2 = gamma * gamma
    if b >= 0.0:
        hi = gamma ** (2.0 / 3.0)
        if b > 0.0:
            hi = min(hi, g2 / (b * b))
        return safeguarded_cubic_root(2.0 * b, b * b, -g2, 0.0, hi)
    # v = q + b:  v^3 - b v^2 - gamma^2 = 0
    hi = min(gamma ** (2.0 / 3.0), gamma / math.sqrt(-b))
    v = safeguarded_cubic_root(-b, 0.0, -g2, 0.0, hi)
    return v - b


@njit(cache=True)
def _hyp_fstar(u):
    if u >= 0.0:
        r = math.sqrt(u) - 1.0
        return r * r
    return INF


@jitclass([("radial", boolean)])
class HyperbolicFunction:
    """Hyperbolic penalty ``f(x) = x / (1 - x)`` on ``x < 1``."""

    def __init__(self):
        self.radial = False

    def eval_f(self, x):
        return x / (1.0 - x) if x < 1.0 else INF

    def grad_f(self, x):
        if x < 1.0:
            d = 1.0 - x
            return 1.0 / (d * d)
        return INF

    def eval_fstar(self, u):
        return _hyp_fstar(u)

    def eval_rec(self, x):
        return 0.0 if x <= 0.0 else INF

    def eval_persp(self, x, eta):
        if eta > 0.0:
            if x < eta:
                return eta * x / (eta - x)
            return INF
        if eta == 0.0:
            return self.eval_rec(x)
        return INF

    def prox_f(self, gamma, x):
        return hyp_prox_f(gamma, x)

    def prox_fstar(self, gamma, x):
        return hyp_prox_fstar(gamma, x)

    def prox_rec(self, gamma, x):
        return min(x, 0.0)

    def project_dom_fstar(self, u):
        return max(u, 0.0)

    def project_dom_persp(self, x, eta):
        if eta <= 0.0 and x <= -eta:
            return min(0.0, x), 0.0
        if abs(eta) <= x:
            m = 0.5 * (x + eta)
            return m, m
        return x, eta

    def prox_f_and_value(self, gamma, x):
        p, u = _hyp_prox_parts(gamma, x)
        return p, p / u

    def value_at_prox_fstar(self, gamma, x):
        return _hyp_fstar(hyp_prox_fstar(gamma, x))


# ------------------------------------------------------------------ quadratic

@jitclass([("radial", boolean)])
class QuadraticFunction:
    """``f(x) = x^2 / 2``, self-conjugate; its cone is a rotated Lorentz cone."""

    def __init__(self):
        self.radial = True

    def eval_f(self, x):
        return 0.5 * x * x

    def grad_f(self, x):
        return x

    def eval_fstar(self, u):
        return 0.5 * u * u

    def eval_rec(self, x):
        return 0.0 if x == 0.0 else INF

    def eval_persp(self, x, eta):
        if eta > 0.0:
            return 0.5 * x * (x / eta)
        if eta == 0.0:
            return self.eval_rec(x)
        return INF

    def prox_f(self, gamma, x):
        return x / (1.0 + gamma)

    def prox_fstar(self, gamma, x):
        return x / (1.0 + gamma)

    def prox_rec(self, gamma, x):
        return 0.0

    def project_dom_fstar(self, u):
        return u

    def project_dom_persp(self, x, eta):
        return x, max(eta, 0.0)

    def prox_f_and_value(self, gamma, x):
        p = x / (1.0 + gamma)
        return p, 0.5 * p * p

    def value_at_prox_fstar(self, gamma, x):
        q = x / (1.0 + gamma)
        return 0.5 * q * q


FUNCTIONS = {
    "exp": ExpFunction,
    "exp-radial": RadialExpFunction,
    "hyperbolic": HyperbolicFunction,
    "quadratic": QuadraticFunction,
}


def get_function(name: str):
    """Instantiate a builtin function by its CLI name."""
    try:
        return FUNCTIONS[name]()
    except KeyError:
        raise ValueError(
            f"unknown function {name!r}; choose from {sorted(FUNCTIONS)}"
        ) from None

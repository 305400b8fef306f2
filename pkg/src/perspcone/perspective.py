"""Proximity operator of the perspective ``mu * f~`` and its value.

For ``(x, eta)`` and ``mu > 0`` there are two regimes. When
``eta + mu f*(P(x/mu)) <= 0`` (``P`` the projection onto the closure of
``dom f*``) the prox lands on ``eta = 0`` and is obtained from the prox of
the recession function. Otherwise the second coordinate ``nu`` is the unique
root in ``(0, nu_hi]``, ``nu_hi = eta + mu f*(P(x/mu))``, of

    psi(nu) = nu - eta - mu f*(prox_{(nu/mu) f*}(x/mu)),

and the prox is ``(nu prox_{(mu/nu) f}(x/nu), nu)``. ``psi`` is increasing,
tends to ``-nu_hi`` as ``nu -> 0`` and is nonnegative at ``nu_hi``, so the
root is bracketed without any search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import InnerSolveFailed
from .rootfind import NAN_OBJECTIVE, OK, RTOL, SolverConfig, brent_core

__all__ = [
    "PerspProxResult",
    "persp_prox",
    "persp_prox_radial",
    "nu_residual",
    "nu_residual_via_f",
]

RECESSION_BRANCH = 0
INTERIOR_BRANCH = 1
INNER_FAILED = 3

MU_FLOOR = 1e-300
_CASE_NAMES = {RECESSION_BRANCH: "recession_branch",
               INTERIOR_BRANCH: "interior_branch"}


@njit
def nu_residual(nu, args):
    """``psi_mu(nu)``, written through the conjugate: args ``(fn, mu, x, eta)``."""
    fn, mu, x, eta = args
    return nu - eta - mu * fn.value_at_prox_fstar(nu / mu, x / mu)


@njit
def nu_residual_via_f(nu, args):
    """``psi_mu(nu)`` written through ``f`` at ``p = prox_{(mu/nu) f}(x/nu)``.

    Uses ``q = (x - nu p) / mu = prox_{(nu/mu) f*}(x/mu)`` and the
    Fenchel-Young equality ``f*(q) = p q - f(p)``.
    """
    fn, mu, x, eta = args
    p, fp = fn.prox_f_and_value(mu / nu, x / nu)
    q = (x - nu * p) / mu
    return nu - eta - mu * (p * q - fp)


@njit
def persp_prox_core(fn, mu, x, eta, xtol, maxiter):
    """Returns ``(xbar, etabar, value, nu, branch, inner_iterations, status)``.

    ``value`` is ``f~(xbar, etabar)``; ``nu`` is 0 on the recession branch.
    """
    mu = max(mu, MU_FLOOR)
    nu_hi = eta + mu * fn.eval_fstar(fn.project_dom_fstar(x / mu))
    if nu_hi <= 0.0:
        xb = fn.prox_rec(mu, x)
        return xb, 0.0, fn.eval_rec(xb), 0.0, RECESSION_BRANCH, 0, OK
    if nu_hi == math.inf:
        # mu f*(x/mu) overflows only for mu negligible against (x, eta); the
        # prox has then converged to its mu -> 0 limit, the domain projection
        px, pe = fn.project_dom_persp(x, eta)
        branch = INTERIOR_BRANCH if pe > 0.0 else RECESSION_BRANCH
        return px, pe, fn.eval_persp(px, pe), pe, branch, 0, OK
    if not math.isfinite(nu_hi):
        return math.nan, math.nan, math.nan, nu_hi, INTERIOR_BRANCH, 0, INNER_FAILED
    args = (fn, mu, x, eta)
    psi_hi = nu_residual(nu_hi, args)
    it = 0
    if psi_hi != psi_hi or psi_hi < -1e-8 * max(1.0, nu_hi):
        return math.nan, math.nan, math.nan, nu_hi, INTERIOR_BRANCH, 0, INNER_FAILED
    if psi_hi <= 0.0:
        nu = nu_hi
    else:
        nu, _, it, _, status = brent_core(
            nu_residual, args, 0.0, nu_hi, -nu_hi, psi_hi, xtol, RTOL, maxiter)
        if status == NAN_OBJECTIVE:
            return math.nan, math.nan, math.nan, nu, INTERIOR_BRANCH, it, INNER_FAILED
        if nu <= 0.0:
            nu = MU_FLOOR
    xn = x / nu
    if math.isfinite(xn) and math.isfinite(mu / nu):
        p, fp = fn.prox_f_and_value(mu / nu, xn)
        if math.isfinite(p) and math.isfinite(fp):
            return nu * p, nu, nu * fp, nu, INTERIOR_BRANCH, it, OK
    # x / nu overflows for tiny nu; use the Moreau split x = xbar + mu q instead
    xb = x - mu * fn.prox_fstar(nu / mu, x / mu)
    return xb, nu, fn.eval_persp(xb, nu), nu, INTERIOR_BRANCH, it, OK


@dataclass(frozen=True)
class PerspProxResult:
    point: tuple[float, float]
    value: float
    nu: float | None
    case: str
    inner_iterations: int = 0


def _run_core(fn, mu, x, eta, cfg):
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu!r}")
    out = persp_prox_core(fn, float(mu), float(x), float(eta),
                          cfg.tol_inner, cfg.max_iterations)
    if out[6] == INNER_FAILED:
        raise InnerSolveFailed(
            f"psi has no sign change on (0, {out[3]!r}] for mu={mu!r}, "
            f"x={x!r}, eta={eta!r}")
    return out


def persp_prox(fn, mu: float, x: float, eta: float,
               cfg: SolverConfig | None = None) -> PerspProxResult:
    """``prox_{mu f~}(x, eta)`` together with ``f~`` at the result."""
    cfg = cfg or SolverConfig()
    xb, eb, value, nu, branch, it, _ = _run_core(fn, mu, x, eta, cfg)
    return PerspProxResult((xb, eb), value,
                           nu if branch == INTERIOR_BRANCH else None,
                           _CASE_NAMES[branch], it)


def persp_prox_radial(phi, mu: float, x, eta: float,
                      cfg: SolverConfig | None = None):
    """Prox of ``mu f~`` for ``f = phi(||.||)`` on ``R^n``.

    Returns ``(xbar, etabar, value, nu)`` with ``xbar`` an array collinear
    with ``x`` and ``nu`` None on the recession branch.
    """
    cfg = cfg or SolverConfig()
    if not phi.radial:
        raise ValueError("radial prox needs an even function with full domain")
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    rb, eb, value, nu, branch, _, _ = _run_core(phi, mu, r, eta, cfg)
    if branch == RECESSION_BRANCH:
        # (1 - mu P(r/mu)/r) x, with r - mu P(r/mu) = prox_{mu rec}(r)
        xb = x * (rb / r) if r > 0 else np.zeros_like(x)
        return xb, 0.0, value, None
    if r == 0:
        return np.zeros_like(x), eta + mu * phi.eval_fstar(0.0), value, nu
    return x * (rb / r), eb, value, nu

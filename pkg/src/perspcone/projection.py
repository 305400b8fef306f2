"""Projection onto the epigraph of a perspective function.

Given ``(x, eta, delta)`` let ``P`` be the projection of ``(x, eta)`` onto
the closure of ``dom f~``. If ``f~(P) <= delta`` the projection is
``(P, delta)``. Otherwise it is ``(prox_{mu f~}(x, eta), delta + mu)`` where
``mu > 0`` is the unique root of the increasing function

    phi(mu) = mu + delta - f~(prox_{mu f~}(x, eta)),    phi(0) = delta - f~(P).

The root lies in ``[0, f~(P) - delta]`` when ``f~(P)`` is finite; otherwise
an upper bound is found by probing ``2, 4, 8, ...``. By default the bound
is also capped by ``||(x, eta, delta)||``, since ``mu`` is at most the
distance to the origin, a cone point. Every evaluation of
``phi`` runs one inner solve for the second prox coordinate (see
:mod:`perspcone.perspective`).

All work is done on the point divided by a power of two close to its
largest coordinate, which keeps the two nested solves well scaled and is
exact in floating point.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import (BracketExpansionExceeded, ConeProjectionError,
                     InnerSolveFailed, NonFiniteInput)
from .perspective import MU_FLOOR, persp_prox, persp_prox_core
from .rootfind import (NAN_OBJECTIVE, NOT_CONVERGED, OK, RTOL, SolverConfig,
                       bisect_core, brent_core)

__all__ = [
    "ConePoint",
    "ProjectionResult",
    "PhiObjective",
    "BatchResult",
    "project_epi",
    "project_epi_radial",
    "project_batch",
    "certify_error_bound",
]

CASE_INTERIOR = 0
CASE_DOMAIN_FACE = 1
CASE_PROX = 2
CASE_NAMES = ("interior", "domain_face", "prox_branch")

INNER_FAILED = 3
BRACKET_EXCEEDED = 4


@dataclass(frozen=True, eq=False)
class ConePoint:
    """A point ``(x, eta, delta)``; ``x`` is stored as a 1-D float array."""

    x: np.ndarray
    eta: float
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "x", np.atleast_1d(np.asarray(self.x, dtype=float)))
        object.__setattr__(self, "eta", float(self.eta))
        object.__setattr__(self, "delta", float(self.delta))
        if self.x.ndim != 1:
            raise ValueError("x must be a scalar or a 1-D array")

    @classmethod
    def from_array(cls, z) -> ConePoint:
        z = np.asarray(z, dtype=float)
        return cls(z[:-2], z[-2], z[-1])

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.x, [self.eta, self.delta]])

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.x))
                    and math.isfinite(self.eta) and math.isfinite(self.delta))

    def __repr__(self):
        xs = self.x[0] if self.x.size == 1 else self.x
        return f"ConePoint(x={xs!r}, eta={self.eta!r}, delta={self.delta!r})"


@dataclass(frozen=True)
class ProjectionResult:
    point: ConePoint
    mu: float
    nu: float | None
    case: str
    outer_residual: float
    outer_iterations: int
    inner_iterations_total: int
    elapsed_ns: int


TINY = 2.2250738585072014e-308


@njit
def _pow2_scale(x, eta, delta):
    s = max(abs(x), abs(eta), abs(delta))
    if s == 0.0:
        return 1.0
    return math.ldexp(1.0, math.frexp(s)[1])


@njit
def _outer_objective(mu, args):
    fn, x, eta, delta, xtol_inner, maxiter, counter = args
    out = persp_prox_core(fn, mu, x, eta, xtol_inner, maxiter)
    counter[0] += out[5]
    if out[6] != OK:
        counter[1] = 1
        return math.nan
    return mu + delta - out[2]


@njit
def _refine_relative(args, root, g_root, width, lo, hi, g_lo, g_hi, xtol, maxiter):
    """Resume Brent inside its final bracket until ``|mu - mu*| <= xtol mu / d``.

    ``d = ||p - P(p)|| >= mu``; by the error bound the point is then within
    about ``xtol`` of the projection, not merely ``mu`` within ``xtol``.
    """
    fn, xs, es, ds, xtol_inner, inner_max, counter = args
    xb, eb, _, _, _, _, st = persp_prox_core(fn, root, xs, es, xtol_inner, inner_max)
    if st != OK:
        return root, g_root, 1, width, OK
    d = math.sqrt((xs - xb) ** 2 + (es - eb) ** 2 + root * root)
    # below mu ~ xtol the point is within about xtol of P_dom anyway
    xtol_rel = xtol * min(1.0, max(root, xtol) / d) if d > 0.0 else xtol
    if not width > xtol_rel:
        return root, g_root, 1, width, OK
    if g_root < 0.0:
        a, fa = root, g_root
        b = min(root + width, hi)
        fb = g_hi if b == hi else _outer_objective(b, args)
    else:
        b, fb = root, g_root
        a = max(root - width, lo)
        fa = g_lo if a == lo else _outer_objective(a, args)
    if not (fa <= 0.0 < fb):
        return root, g_root, 2, width, OK
    r, g, it, w, status = brent_core(_outer_objective, args, a, b, fa, fb,
                                     xtol_rel, RTOL, maxiter)
    if status == NOT_CONVERGED:
        # still inside the original bracket, so no worse than the input
        status = OK
    return r, g, it + 2, w, status


@njit
def _polish_feasible(args, lo, g_lo, hi, gtol):
    """Shrink ``[lo, hi]`` (``phi(lo) < -gtol``, ``phi(hi) >= 0``) until the
    lower end violates membership by at most ``gtol``; else return ``hi``.

    Where ``phi`` is steep a root within ``xtol`` can still leave a residual
    far above the tolerance.
    """
    evals = 0
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        g = _outer_objective(mid, args)
        evals += 1
        if g != g:
            break
        if g >= 0.0:
            hi = mid
        else:
            lo, g_lo = mid, g
        if g_lo >= -gtol:
            return lo, evals
    return hi, evals


@njit(nogil=True)
def project_scalar_core(fn, x, eta, delta, tol_outer, tol_inner, growth,
                        max_expansions, maxiter, bisection, norm_bracket):
    """Returns ``(x, eta, delta, mu, nu, case, residual, outer_it, inner_it, status)``.

    ``nu`` is NaN when the prox lands on the recession branch.
    """
    scale = _pow2_scale(x, eta, delta)
    xs = x / scale
    es = eta / scale
    ds = delta / scale
    px, pe = fn.project_dom_persp(xs, es)
    v0 = fn.eval_persp(px, pe)
    if v0 <= ds:
        case = CASE_INTERIOR if (px == xs and pe == es) else CASE_DOMAIN_FACE
        return (px * scale, pe * scale, delta, 0.0, math.nan, case, 0.0,
                0, 0, OK)

    if scale <= TINY:
        # all entries subnormal: the projection is not representable, and the
        # origin lifted to delta >= 0 is feasible and within ||p|| of it
        db = max(delta, 0.0)
        case = CASE_PROX if db > delta else CASE_DOMAIN_FACE
        return (0.0, 0.0, db, db - delta, math.nan, case, 0.0, 0, 0, OK)

    xtol = min(tol_outer, tol_outer / scale)
    xtol_inner = min(tol_inner, tol_inner / scale)
    counter = np.zeros(2, dtype=np.int64)
    args = (fn, xs, es, ds, xtol_inner, maxiter, counter)
    nan = math.nan

    # bracket [lo, hi] with phi(lo) <= 0 < phi(hi)
    lo = 0.0
    evals = 0
    root = -1.0
    hi = v0 - ds
    if norm_bracket:
        # mu = deltabar - delta <= ||p - proj(p)|| <= ||p - 0||
        hi = min(hi, math.sqrt(xs * xs + es * es + ds * ds))
    if math.isfinite(hi):
        g_lo = ds - v0
        g_hi = _outer_objective(hi, args)
        evals += 1
        if g_hi <= 0.0:
            root = hi
    else:
        g_lo = -math.inf
        hi = growth
        for k in range(max_expansions + 1):
            if k == max_expansions:
                return (nan, nan, nan, hi * scale, nan, CASE_PROX, nan, evals,
                        counter[0], BRACKET_EXCEEDED)
            g_hi = _outer_objective(hi, args)
            evals += 1
            if g_hi != g_hi or g_hi > 0.0:
                break
            lo = hi
            g_lo = g_hi
            hi *= growth
    if g_hi != g_hi:
        return (nan, nan, nan, hi * scale, nan, CASE_PROX, nan, evals,
                counter[0], INNER_FAILED)

    status = OK
    if root < 0.0:
        if bisection:
            root, _, it, _, status = bisect_core(
                _outer_objective, args, lo, hi, g_lo, g_hi, xtol)
        else:
            root, g_root, it, width, status = brent_core(
                _outer_objective, args, lo, hi, g_lo, g_hi, xtol, RTOL, maxiter)
            if status == OK and g_root != 0.0 and counter[1] == 0:
                root, g_root, extra, width, status = _refine_relative(
                    args, root, g_root, width, lo, hi, g_lo, g_hi, xtol, maxiter)
                it += extra
            if status == OK and g_root * scale < -tol_outer and width > 0.0:
                root, extra = _polish_feasible(
                    args, root, g_root, min(root + width, hi), tol_outer / scale)
                evals += extra
        evals += it
    if counter[1] != 0 or status == NAN_OBJECTIVE:
        return (nan, nan, nan, root * scale, nan, CASE_PROX, nan, evals,
                counter[0], INNER_FAILED)

    root = max(root, MU_FLOOR)
    xb, eb, value, nu, branch, it, st = persp_prox_core(
        fn, root, xs, es, xtol_inner, maxiter)
    if st != OK:
        return (nan, nan, nan, root * scale, nan, CASE_PROX, nan, evals,
                counter[0], INNER_FAILED)
    if branch == 0:
        nu = nan
    residual = (root + ds - value) * scale
    return (xb * scale, eb * scale, delta + root * scale, root * scale,
            nu * scale, CASE_PROX, residual, evals, counter[0] + it, status)


def _check_finite(p: ConePoint):
    if not p.is_finite():
        raise NonFiniteInput(f"cannot project non-finite point {p!r}")


def _raise_for_status(status, mu, p):
    if status == OK:
        return
    if status == BRACKET_EXCEEDED:
        raise BracketExpansionExceeded(
            f"no upper bracket for mu up to {mu:g} at {p!r}")
    if status == INNER_FAILED:
        raise InnerSolveFailed(f"inner solve failed near mu={mu!r} at {p!r}")
    if status == NOT_CONVERGED:
        raise ConeProjectionError(f"outer solve did not converge at {p!r}")
    raise ConeProjectionError(f"projection failed with status {status}")


def _scalar_args(cfg: SolverConfig):
    return (cfg.tol_outer, cfg.tol_inner, cfg.bracket_growth,
            cfg.max_expansions, cfg.max_iterations, cfg.method == "bisection",
            cfg.norm_bracket)


def project_epi(fn, p: ConePoint, cfg: SolverConfig | None = None) -> ProjectionResult:
    """Project a scalar point onto the epigraph of ``fn``'s perspective.

    Parameters
    ----------
    fn : ScalarConvexFunction
        Builtin or user function object.
    p : ConePoint
        Point with ``p.x`` of length 1.
    cfg : SolverConfig, optional
        Tolerances and outer solver choice.

    Returns
    -------
    ProjectionResult

    Raises
    ------
    NonFiniteInput
        If a coordinate is NaN or infinite.
    BracketExpansionExceeded
        If no upper bound for ``mu`` was found.
    InnerSolveFailed
        If the function object is inconsistent.
    """
    cfg = cfg or SolverConfig()
    _check_finite(p)
    if p.x.size != 1:
        raise ValueError("project_epi takes scalar points; use project_epi_radial")
    t0 = time.perf_counter_ns()
    out = project_scalar_core(fn, float(p.x[0]), p.eta, p.delta,
                              *_scalar_args(cfg))
    elapsed = time.perf_counter_ns() - t0
    xb, eb, db, mu, nu, case, res, oit, iit, status = out
    _raise_for_status(status, mu, p)
    return ProjectionResult(ConePoint(xb, eb, db), mu,
                            None if math.isnan(nu) else nu, CASE_NAMES[case],
                            res, oit, iit, elapsed)


@njit
def project_radial_core(phi, r, eta, delta, tol_outer, tol_inner, growth,
                        max_expansions, maxiter, bisection, norm_bracket):
    """Radial projection in terms of ``r = ||x||``; same return layout as the
    scalar core, with the first entry the norm of the projected ``x``."""
    e0 = max(eta, 0.0)
    if phi.eval_persp(r, e0) <= delta:
        case = CASE_INTERIOR if eta >= 0.0 else CASE_DOMAIN_FACE
        return r, e0, delta, 0.0, math.nan, case, 0.0, 0, 0, OK
    if delta < 0.0 and eta - delta * phi.eval_fstar(r / -delta) <= 0.0:
        return 0.0, 0.0, 0.0, -delta, math.nan, CASE_PROX, 0.0, 0, 0, OK
    fs0 = phi.eval_fstar(0.0)
    if r == 0.0 and eta - delta * fs0 > 0.0:
        mu = (-eta * fs0 - delta) / (1.0 + fs0 * fs0)
        eb = eta + mu * fs0
        return 0.0, eb, delta + mu, mu, eb, CASE_PROX, 0.0, 0, 0, OK
    return project_scalar_core(phi, r, eta, delta, tol_outer, tol_inner,
                               growth, max_expansions, maxiter, bisection,
                               norm_bracket)


def project_epi_radial(phi, p: ConePoint,
                       cfg: SolverConfig | None = None) -> ProjectionResult:
    """Project onto the epigraph of the perspective of ``phi(||x||)``.

    ``phi`` must be even with full domain (``phi.radial`` is true). The
    result's ``x`` is collinear with ``p.x``.
    """
    cfg = cfg or SolverConfig()
    if not phi.radial:
        raise ValueError("project_epi_radial needs an even full-domain profile")
    _check_finite(p)
    t0 = time.perf_counter_ns()
    r = float(np.linalg.norm(p.x))
    out = project_radial_core(phi, r, p.eta, p.delta, *_scalar_args(cfg))
    rb, eb, db, mu, nu, case, res, oit, iit, status = out
    _raise_for_status(status, mu, p)
    xb = p.x * (rb / r) if r > 0 else np.zeros_like(p.x)
    elapsed = time.perf_counter_ns() - t0
    return ProjectionResult(ConePoint(xb, eb, db), mu,
                            None if math.isnan(nu) else nu, CASE_NAMES[case],
                            res, oit, iit, elapsed)


def project(fn, p: ConePoint, cfg: SolverConfig | None = None) -> ProjectionResult:
    """Dispatch to the scalar or radial projection by the size of ``p.x``."""
    if p.x.size == 1 and not getattr(fn, "radial", False):
        return project_epi(fn, p, cfg)
    if fn.radial:
        return project_epi_radial(fn, p, cfg)
    raise ValueError("vector points need a radial function")


def certify_error_bound(result: ProjectionResult, p: ConePoint, eps: float) -> float:
    """A-posteriori bound on the ``(x, eta)`` error of a bisection solve.

    If the outer root was located to within ``eps``, the exact ``(x*, eta*)``
    is within ``eps / mu * ||(x, eta) - (xbar, etabar)||`` of the computed one,
    where ``mu = deltabar - delta``.
    """
    if not result.mu > 0:
        raise ValueError("error bound needs a prox-branch result with mu > 0")
    if not eps >= 0:
        raise ValueError("eps must be nonnegative")
    dx = np.append(p.x - result.point.x, p.eta - result.point.eta)
    return eps / result.mu * float(np.linalg.norm(dx))


class PhiObjective:
    """The outer function ``phi`` for a fixed point, callable at ``mu >= 0``."""

    def __init__(self, fn, p: ConePoint, cfg: SolverConfig | None = None):
        self.fn = fn
        self.cfg = cfg or SolverConfig()
        if p.x.size == 1 and not fn.radial:
            self.x = float(p.x[0])
        else:
            self.x = float(np.linalg.norm(p.x))
        self.eta = p.eta
        self.delta = p.delta

    def __call__(self, mu: float) -> float:
        if mu < 0:
            raise ValueError("phi is defined for mu >= 0")
        if mu == 0:
            px, pe = self.fn.project_dom_persp(self.x, self.eta)
            return self.delta - self.fn.eval_persp(px, pe)
        return mu + self.delta - persp_prox(self.fn, mu, self.x, self.eta,
                                            self.cfg).value


@dataclass
class BatchResult:
    """Row-aligned outputs of :func:`project_batch`.

    Failed rows hold NaN and carry the exception text in ``errors``.
    """

    x: np.ndarray
    eta: np.ndarray
    delta: np.ndarray
    mu: np.ndarray
    nu: np.ndarray
    outer_iterations: np.ndarray
    residual: np.ndarray
    time_ns: np.ndarray
    errors: list


def project_batch(fn, X, eta, delta, cfg: SolverConfig | None = None,
                  warmup: int = 0) -> BatchResult:
    """Project rows ``(X[i], eta[i], delta[i])`` one by one, timing each.

    ``X`` has shape ``(n,)`` or ``(n, d)``. ``warmup`` projections of the first
    row are run before timing starts (they also trigger compilation).
    """
    cfg = cfg or SolverConfig()
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    eta = np.asarray(eta, dtype=float)
    delta = np.asarray(delta, dtype=float)
    n = X.shape[0]
    if eta.shape != (n,) or delta.shape != (n,):
        raise ValueError("X, eta and delta must have matching lengths")
    radial = bool(fn.radial)
    if X.shape[1] > 1 and not radial:
        raise ValueError("vector points need a radial function")
    out = BatchResult(
        x=np.full_like(X, np.nan), eta=np.full(n, np.nan),
        delta=np.full(n, np.nan), mu=np.full(n, np.nan), nu=np.full(n, np.nan),
        outer_iterations=np.zeros(n, dtype=np.int64),
        residual=np.full(n, np.nan), time_ns=np.zeros(n, dtype=np.int64),
        errors=[""] * n)
    args = _scalar_args(cfg)
    core = project_radial_core if radial else project_scalar_core
    norms = np.linalg.norm(X, axis=1) if radial else X[:, 0]
    for _ in range(warmup if n else 0):
        core(fn, float(norms[0]), float(eta[0]), float(delta[0]), *args)
    clock = time.perf_counter_ns
    for i in range(n):
        p = ConePoint(X[i], eta[i], delta[i])
        try:
            _check_finite(p)
            t0 = clock()
            xb, eb, db, mu, nu, _, res, oit, _, status = core(
                fn, float(norms[i]), float(eta[i]), float(delta[i]), *args)
            out.time_ns[i] = clock() - t0
            _raise_for_status(status, mu, p)
        except (ConeProjectionError, ValueError) as exc:
            out.errors[i] = f"{type(exc).__name__}: {exc}"
            continue
        if radial:
            r = norms[i]
            out.x[i] = X[i] * (xb / r) if r > 0 else 0.0
        else:
            out.x[i, 0] = xb
        out.eta[i], out.delta[i], out.mu[i], out.nu[i] = eb, db, mu, nu
        out.outer_iterations[i] = oit
        out.residual[i] = res
    return out

"""INTHOP: line search with an interval-Hessian-shifted model Hessian.

At a refresh point ``x_t`` a box of width ``delta`` is centred on the
iterate, the Hessian is enclosed over the box by interval arithmetic, and
a lower bound ``lam`` on its smallest eigenvalue gives the shift
``alpha = max(0, -lam/2)``.  The matrix ``L_t = H(x_t) + 2*alpha*I`` is
factorized once and reused for every iterate that stays inside the box;
only gradients are evaluated in between.  ``delta`` is fixed, or adapted at
each refresh from the last direction (A1) or from an actual/predicted
decrease ratio (A2).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .core import (
    AlphaMethod,
    Counters,
    IterationRecord,
    Objective,
    Problem,
    SolverConfig,
    SolverResult,
    Status,
    Strategy,
    quiet_overflow,
)
from .eigen import alpha_from_lambda, lambda_min_bound, sym_eigen
from .interval import IntervalMatrix, IntervalVector
from .linesearch import LineSearchError, armijo_backtrack

__all__ = [
    "SingularHessian",
    "HessianState",
    "make_box",
    "refresh_hessian",
    "search_direction",
    "update_delta_a1",
    "update_delta_a2",
    "run",
]

log = logging.getLogger(__name__)


class SingularHessian(LinAlgError):
    pass


@dataclass
class HessianState:
    t: int
    x_t: np.ndarray
    box: IntervalVector
    delta: float
    alpha: float
    lam: float
    hess_t: np.ndarray
    L_t: np.ndarray
    factor: tuple
    interval_hessian: Optional[IntervalMatrix] = None


def make_box(x, delta: float) -> IntervalVector:
    """Box ``[x - delta/2, x + delta/2]`` centred on ``x``."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta!r}")
    x = np.asarray(x, dtype=float)
    return IntervalVector(x - 0.5 * delta, x + 0.5 * delta)


def _factorize(L: np.ndarray, counters: Counters):
    counters.n3_ops += 1
    try:
        return cho_factor(L, lower=True, check_finite=True)
    except (LinAlgError, ValueError):
        return None


def refresh_hessian(
    obj: Objective,
    x_t,
    delta: float,
    method: AlphaMethod | str,
    *,
    t: int = 1,
    ridge_fallback: bool = False,
    em_full_e: bool = False,
    interval_hessian: IntervalMatrix | None = None,
) -> HessianState:
    """Build the shifted model Hessian for a new box around ``x_t``.

    ``interval_hessian`` overrides the computed enclosure (used to replay
    fixed matrices); the interval-Hessian counter is then left untouched.
    """
    x_t = np.asarray(x_t, dtype=float)
    if not np.all(np.isfinite(x_t)):
        raise ValueError("refresh point must be finite")
    counters = obj.counters
    box = make_box(x_t, delta)
    ih = obj.interval_hess(box) if interval_hessian is None else interval_hessian
    hess_t = obj.hess(x_t)
    lam = lambda_min_bound(ih, method, counters, full_e=em_full_e)
    # shift is max(0, -lam/2); a printed min() here would never shift
    alpha = alpha_from_lambda(lam)
    n = x_t.size
    L = hess_t + 2.0 * alpha * np.eye(n)
    factor = _factorize(L, counters)
    if factor is None and ridge_fallback:
        alpha += 1e-8 * (1.0 + float(np.max(np.abs(L))))
        L = hess_t + 2.0 * alpha * np.eye(n)
        factor = _factorize(L, counters)
    if factor is None:
        raise SingularHessian(f"shifted Hessian not positive definite (alpha={alpha:g}, lambda bound={lam:g})")
    return HessianState(t, x_t, box, delta, alpha, lam, hess_t, L, factor, ih)


def search_direction(state: HessianState, g) -> np.ndarray:
    """Solve ``L_t p = -g`` with the stored Cholesky factor."""
    return -cho_solve(state.factor, np.asarray(g, dtype=float))


def update_delta_a1(p_prev, delta_prev: float, cfg: SolverConfig) -> float:
    """Scale ``delta`` by ``eta = (r/sqrt(n)) |p|_1 / sqrt(|p|_2^2 + beta)``."""
    p = np.asarray(p_prev, dtype=float)
    eta = cfg.r / math.sqrt(p.size) * np.sum(np.abs(p)) / math.sqrt(float(p @ p) + cfg.beta)
    return float(min(max(delta_prev * eta, cfg.delta_min), cfg.delta_max))


def a2_ratio(f_t: float, f_next: float, g_t, s_t, L_t) -> float:
    """Actual over predicted decrease between consecutive refresh points.

    The predicted decrease is ``-(g's + s'Ls)``, with no 1/2 on the
    quadratic term.
    """
    s = np.asarray(s_t, dtype=float)
    denom = -(float(np.dot(g_t, s)) + float(s @ np.asarray(L_t) @ s))
    return (f_t - f_next) / denom if denom != 0.0 else math.nan


def update_delta_a2(f_t, f_next, g_t, s_t, L_t, delta_prev: float, cfg: SolverConfig) -> float:
    xi = a2_ratio(f_t, f_next, g_t, s_t, L_t)
    if not math.isfinite(xi):
        log.debug("degenerate model decrease; halving delta")
        return max(delta_prev / 2.0, cfg.delta_min)
    return _a2_rule(xi, delta_prev, cfg)


def _a2_rule(xi: float, delta_prev: float, cfg: SolverConfig) -> float:
    if xi < 0.25:
        return max(delta_prev / 2.0, cfg.delta_min)
    if xi > 0.75:
        return min(4.0 * delta_prev, cfg.delta_max)
    return delta_prev


def saddle_or_solved(obj: Objective, x, cfg: SolverConfig, charge: bool = True) -> Status:
    """Post-hoc second-order test at a first-order stationary point.

    The exact Hessian evaluated here is a verification step and is not added
    to ``h_evals``; its eigensolve costs one O(n^3) unit when ``charge``.
    """
    h = obj.problem.hessian(x)
    lam = sym_eigen(h, obj.counters if charge else None)[0]
    return Status.SADDLE_POINT if lam < -cfg.eps_H else Status.SOLVED


@quiet_overflow
def run(problem: Problem, cfg: SolverConfig = SolverConfig(), callback: Callable | None = None) -> SolverResult:
    """Minimize ``problem`` with INTHOP; ``cfg.strategy`` picks F, A1 or A2.

    ``callback(k, state, x, g, p)`` is invoked after each search direction
    is computed, which the diagnostics use to audit every iteration.
    """
    obj = Objective(problem)
    c = obj.counters
    x = problem.x0.copy()
    f = obj.f(x)
    if not math.isfinite(f):
        return SolverResult(x, f, math.nan, Status.INFINITE_START, c)
    g = obj.grad(x)
    trace: list[IterationRecord] = []
    state: HessianState | None = None
    delta = cfg.delta0
    p_prev = None
    t = 0
    status = None
    k = 0
    while True:
        gnorm = float(np.linalg.norm(g))
        if gnorm < cfg.eps_g:
            status = Status.SOLVED
            break
        if k > cfg.iter_max:
            status = Status.MAX_ITERATIONS
            break
        refreshed = state is None or not state.box.contains(x)
        if refreshed:
            if state is not None:
                if cfg.strategy is Strategy.A1:
                    delta = update_delta_a1(p_prev, delta, cfg)
                elif cfg.strategy is Strategy.A2:
                    delta = update_delta_a2(f_t, f, g_t, x - state.x_t, state.L_t, delta, cfg)
            t += 1
            try:
                state = refresh_hessian(
                    obj, x, delta, cfg.alpha_method, t=t,
                    ridge_fallback=cfg.ridge_fallback, em_full_e=cfg.em_full_e,
                )
            except SingularHessian:
                status = Status.SINGULAR_HESSIAN
                c.refreshes += 1
                break
            c.refreshes += 1
            f_t, g_t = f, g
        p = search_direction(state, g)
        if callback is not None:
            callback(k, state, x, g, p)
        rec = IterationRecord(k, t, f, gnorm, delta, refreshed, gtp=float(g @ p), pnorm=float(np.linalg.norm(p)))
        trace.append(rec)
        try:
            step = armijo_backtrack(obj.f, x, p, g, cfg.line_search, f0=f)
        except LineSearchError:
            status = Status.STEP_TOO_SMALL
            break
        rec.theta = step.theta
        x = x + step.theta * p
        f = step.f
        g = obj.grad(x)
        p_prev = p
        k += 1
        c.iterations = k
    gnorm = float(np.linalg.norm(g))
    result = SolverResult(x, f, gnorm, status, c, trace)
    if status is Status.SOLVED:
        result.status = saddle_or_solved(obj, x, cfg)
        result.saddle_checked = True
    trace.append(IterationRecord(k, t, f, gnorm, delta, False))
    return result

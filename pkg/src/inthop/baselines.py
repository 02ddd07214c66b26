"""Reference solvers run under the same counting and termination rules."""
from __future__ import annotations

import math

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .core import IterationRecord, Objective, Problem, SolverConfig, SolverResult, Status, quiet_overflow
from .linesearch import LineSearchError, armijo_backtrack, wolfe_search
from .solver import saddle_or_solved

__all__ = ["steepest_descent", "bfgs", "newton_cami", "cami_factor", "bfgs_inverse_update"]


def _finish(obj, x, f, g, status, trace, k, cfg, charge_saddle):
    gnorm = float(np.linalg.norm(g))
    result = SolverResult(x, f, gnorm, status, obj.counters, trace)
    if status is Status.SOLVED:
        result.status = saddle_or_solved(obj, x, cfg, charge=charge_saddle)
        result.saddle_checked = True
    trace.append(IterationRecord(k, 0, f, gnorm))
    return result


@quiet_overflow
def steepest_descent(problem: Problem, cfg: SolverConfig = SolverConfig()) -> SolverResult:
    """Gradient descent with Armijo backtracking."""
    obj = Objective(problem)
    x = problem.x0.copy()
    f = obj.f(x)
    if not math.isfinite(f):
        return SolverResult(x, f, math.nan, Status.INFINITE_START, obj.counters)
    g = obj.grad(x)
    trace = []
    k = 0
    while True:
        gnorm = float(np.linalg.norm(g))
        if gnorm < cfg.eps_g:
            status = Status.SOLVED
            break
        if k > cfg.iter_max:
            status = Status.MAX_ITERATIONS
            break
        p = -g
        rec = IterationRecord(k, 0, f, gnorm, gtp=float(g @ p), pnorm=gnorm)
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
        k += 1
        obj.counters.iterations = k
    return _finish(obj, x, f, g, status, trace, k, cfg, charge_saddle=False)


def bfgs_inverse_update(B: np.ndarray, s: np.ndarray, y: np.ndarray) -> np.ndarray:
    """BFGS update of the inverse-Hessian estimate.

    Skipped (``B`` returned unchanged) when ``s'y <= 1e-10 |s| |y|``.
    """
    sy = float(s @ y)
    if sy <= 1e-10 * np.linalg.norm(s) * np.linalg.norm(y):
        return B
    rho = 1.0 / sy
    By = B @ y
    # (I - rho s y') B (I - rho y s') + rho s s'
    B = B - rho * (np.outer(s, By) + np.outer(By, s)) + (rho * rho * float(y @ By) + rho) * np.outer(s, s)
    return 0.5 * (B + B.T)


@quiet_overflow
def bfgs(problem: Problem, cfg: SolverConfig = SolverConfig()) -> SolverResult:
    """Quasi-Newton BFGS on the inverse Hessian, ``B0 = I``, Wolfe steps."""
    obj = Objective(problem)
    x = problem.x0.copy()
    f = obj.f(x)
    if not math.isfinite(f):
        return SolverResult(x, f, math.nan, Status.INFINITE_START, obj.counters)
    g = obj.grad(x)
    B = np.eye(problem.n)
    trace = []
    k = 0
    while True:
        gnorm = float(np.linalg.norm(g))
        if gnorm < cfg.eps_g:
            status = Status.SOLVED
            break
        if k > cfg.iter_max:
            status = Status.MAX_ITERATIONS
            break
        p = -B @ g
        rec = IterationRecord(k, 0, f, gnorm, gtp=float(g @ p), pnorm=float(np.linalg.norm(p)))
        trace.append(rec)
        try:
            step = wolfe_search(obj.f, obj.grad, x, p, g, cfg.line_search, f0=f)
        except LineSearchError:
            status = Status.STEP_TOO_SMALL
            break
        rec.theta = step.theta
        s = step.theta * p
        x = x + s
        f = step.f
        g_new = step.g
        B = bfgs_inverse_update(B, s, g_new - g)
        g = g_new
        k += 1
        obj.counters.iterations = k
    result = _finish(obj, x, f, g, status, trace, k, cfg, charge_saddle=False)
    result.info["inverse_hessian"] = B
    return result


def cami_factor(H: np.ndarray, counters=None, max_attempts: int = 10**6):
    """Cholesky with added multiple of identity.

    Tries ``H + tau*I`` for ``tau = 0, 1, 2, ...`` until the factorization
    has strictly positive pivots.  Each attempt costs one O(n^3) unit.
    Returns ``(factor, tau, attempts)``; ``factor`` is None when the cap is
    reached.
    """
    n = H.shape[0]
    eye = np.eye(n)
    tau = 0.0
    for attempt in range(1, max_attempts + 1):
        if counters is not None:
            counters.n3_ops += 1
        try:
            return cho_factor(H + tau * eye, lower=True), tau, attempt
        except (LinAlgError, ValueError):
            tau += 1.0
    return None, tau, max_attempts


@quiet_overflow
def newton_cami(problem: Problem, cfg: SolverConfig = SolverConfig()) -> SolverResult:
    """Newton's method made positive definite by the CAMI loop.

    Per iteration: one Hessian evaluation, one O(n^3) unit per Cholesky
    attempt and one more for the solve, then an Armijo step.
    """
    obj = Objective(problem)
    c = obj.counters
    x = problem.x0.copy()
    f = obj.f(x)
    if not math.isfinite(f):
        return SolverResult(x, f, math.nan, Status.INFINITE_START, c)
    g = obj.grad(x)
    trace = []
    k = 0
    while True:
        gnorm = float(np.linalg.norm(g))
        if gnorm < cfg.eps_g:
            status = Status.SOLVED
            break
        if k > cfg.iter_max:
            status = Status.MAX_ITERATIONS
            break
        H = obj.hess(x)
        if not np.all(np.isfinite(H)):
            status = Status.SINGULAR_HESSIAN
            break
        factor, tau, attempts = cami_factor(H, c, cfg.cami_max_attempts)
        if factor is None:
            trace.append(IterationRecord(k, 0, f, gnorm, chol_attempts=attempts))
            status = Status.SINGULAR_HESSIAN
            break
        c.n3_ops += 1
        p = -cho_solve(factor, g)
        rec = IterationRecord(k, 0, f, gnorm, gtp=float(g @ p), pnorm=float(np.linalg.norm(p)), chol_attempts=attempts, tau=tau)
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
        k += 1
        c.iterations = k
    return _finish(obj, x, f, g, status, trace, k, cfg, charge_saddle=True)

"""Step-length selection: Armijo backtracking and a weak-Wolfe bisection."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import LineSearchConfig

__all__ = [
    "LineSearchError",
    "NotDescent",
    "StepTooSmall",
    "MaxTrialsExceeded",
    "StepResult",
    "armijo_backtrack",
    "wolfe_search",
]


class LineSearchError(RuntimeError):
    pass


class NotDescent(LineSearchError):
    pass


class StepTooSmall(LineSearchError):
    pass


class MaxTrialsExceeded(LineSearchError):
    pass


@dataclass
class StepResult:
    theta: float
    f: float
    trials: int
    g: np.ndarray | None = None


def _slope(g, p) -> float:
    gtp = float(np.dot(g, p))
    if not gtp < 0.0:
        raise NotDescent(f"g'p = {gtp!r} is not negative")
    return gtp


def armijo_backtrack(f, x, p, g, cfg: LineSearchConfig = LineSearchConfig(), f0: float | None = None) -> StepResult:
    """Shrink ``theta`` by ``cfg.rho`` until the sufficient-decrease test holds.

    ``f`` is called once per trial (pass a counting handle).  Non-finite
    trial values are rejected, and an accepted value must also be strictly
    below ``f0`` so that rounding cannot let a step through unchanged.
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    gtp = _slope(g, p)
    if f0 is None:
        f0 = f(x)
    theta = cfg.theta0
    trials = 0
    while True:
        if theta < cfg.theta_min:
            raise StepTooSmall(f"theta fell below {cfg.theta_min:g}")
        trials += 1
        ft = f(x + theta * p)
        if math.isfinite(ft) and ft <= f0 + cfg.c1 * theta * gtp and ft < f0:
            return StepResult(theta, ft, trials)
        theta *= cfg.rho


def wolfe_search(
    f, grad, x, p, g, cfg: LineSearchConfig = LineSearchConfig(), f0: float | None = None
) -> StepResult:
    """Bracketing bisection for the weak Wolfe conditions.

    Every trial evaluates ``f``; ``grad`` is evaluated only at trials that
    pass the sufficient-decrease test.  The gradient at the accepted point is
    returned in ``StepResult.g``.
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    gtp = _slope(g, p)
    if f0 is None:
        f0 = f(x)
    lo, hi = 0.0, math.inf
    theta = cfg.theta0
    for trial in range(1, cfg.max_trials + 1):
        if theta < cfg.theta_min:
            raise StepTooSmall(f"theta fell below {cfg.theta_min:g}")
        xt = x + theta * p
        ft = f(xt)
        if not (math.isfinite(ft) and ft <= f0 + cfg.c1 * theta * gtp and ft < f0):
            hi = theta
        else:
            gt = grad(xt)
            if float(np.dot(gt, p)) < cfg.c2 * gtp:
                lo = theta
            else:
                return StepResult(theta, ft, trial, gt)
        theta = 0.5 * (lo + hi) if math.isfinite(hi) else 2.0 * lo
    raise MaxTrialsExceeded(f"no Wolfe step after {cfg.max_trials} trials")

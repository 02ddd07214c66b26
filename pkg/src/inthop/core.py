"""Shared records: configuration, counters, statuses, results, problems."""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional

import numpy as np

from .expr import Expr, Gradient, HessianExprs, compile_scalar, differentiate
from .interval import IntervalMatrix, IntervalVector


def quiet_overflow(fn):
    """Run ``fn`` with numpy overflow/invalid warnings silenced.

    Diverging iterates produce inf/nan values that the solvers already turn
    into statuses; the warnings would only be noise.
    """

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        with np.errstate(over="ignore", invalid="ignore"):
            return fn(*args, **kwargs)

    return wrapper


class Status(str, enum.Enum):
    SOLVED = "Solved"
    MAX_ITERATIONS = "MaxIterations"
    STEP_TOO_SMALL = "StepTooSmall"
    SADDLE_POINT = "SaddlePoint"
    INFINITE_START = "InfiniteStart"
    SINGULAR_HESSIAN = "SingularHessian"

    def __str__(self) -> str:
        return self.value


class AlphaMethod(str, enum.Enum):
    GGN = "ggn"
    EM = "em"
    MK = "mk"


class Strategy(str, enum.Enum):
    FIXED = "fixed"
    A1 = "a1"
    A2 = "a2"


@dataclass(frozen=True)
class LineSearchConfig:
    theta0: float = 1.0
    rho: float = 0.5
    c1: float = 1e-3
    c2: float = 0.9
    theta_min: float = 1e-12
    max_trials: int = 50


@dataclass(frozen=True)
class SolverConfig:
    """Parameters shared by INTHOP and the baseline solvers.

    Defaults are the benchmark settings: ``eps_g = 1e-3``, ``iter_max =
    10000``, ``delta0 = 0.1``, ``r = 2``, ``beta = 1`` and interval sizes
    kept in ``[1e-3, 10]``.
    """

    eps_g: float = 1e-3
    eps_H: float = 1e-3
    iter_max: int = 10000
    delta0: float = 0.1
    r: float = 2.0
    beta: float = 1.0
    delta_min: float = 1e-3
    delta_max: float = 10.0
    alpha_method: AlphaMethod = AlphaMethod.MK
    strategy: Strategy = Strategy.FIXED
    line_search: LineSearchConfig = field(default_factory=LineSearchConfig)
    ridge_fallback: bool = False
    em_full_e: bool = False
    cami_max_attempts: int = 10**6

    def __post_init__(self):
        object.__setattr__(self, "alpha_method", AlphaMethod(self.alpha_method))
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if not 0 < self.delta_min <= self.delta0 <= self.delta_max:
            raise ValueError("need 0 < delta_min <= delta0 <= delta_max")
        if self.eps_g <= 0 or self.r <= 0 or self.beta <= 0:
            raise ValueError("eps_g, r and beta must be positive")

    def with_(self, **kw) -> "SolverConfig":
        return replace(self, **kw)


@dataclass
class Counters:
    f_evals: int = 0
    g_evals: int = 0
    h_evals: int = 0
    ih_evals: int = 0
    n3_ops: int = 0
    iterations: int = 0
    refreshes: int = 0

    def as_dict(self) -> dict:
        return dict(vars(self))


@dataclass
class IterationRecord:
    k: int
    t: int
    f: float
    gnorm: float
    delta: float = math.nan
    refreshed: bool = False
    theta: float = math.nan
    gtp: float = math.nan
    pnorm: float = math.nan
    chol_attempts: int = 0
    tau: float = math.nan


@dataclass
class SolverResult:
    x_final: np.ndarray
    f_final: float
    g_norm: float
    status: Status
    counters: Counters
    trace: list = field(default_factory=list)
    saddle_checked: bool = False
    info: dict = field(default_factory=dict)

    @property
    def solved(self) -> bool:
        return self.status is Status.SOLVED


@dataclass
class Problem:
    """A named unconstrained test problem."""

    name: str
    n: int
    objective: Expr
    x0: np.ndarray
    fstar: Optional[float] = None

    def __post_init__(self):
        self.x0 = np.asarray(self.x0, dtype=float)
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.x0.shape != (self.n,):
            raise ValueError(f"{self.name}: x0 has length {self.x0.size}, expected {self.n}")
        bad = [i for i in self.objective.variables if i > self.n]
        if bad:
            raise ValueError(f"{self.name}: objective uses x{max(bad)} but n = {self.n}")

    @cached_property
    def derivatives(self) -> tuple[Gradient, HessianExprs]:
        return differentiate(self.objective, self.n)

    @property
    def gradient(self) -> Gradient:
        return self.derivatives[0]

    @property
    def hessian(self) -> HessianExprs:
        return self.derivatives[1]

    @cached_property
    def f(self):
        return compile_scalar(self.objective)


class Objective:
    """Counting handle around a :class:`Problem` for one solver run."""

    def __init__(self, problem: Problem, counters: Counters | None = None):
        self.problem = problem
        self.counters = counters if counters is not None else Counters()

    @property
    def n(self) -> int:
        return self.problem.n

    def f(self, x) -> float:
        self.counters.f_evals += 1
        return self.problem.f(x)

    def grad(self, x) -> np.ndarray:
        self.counters.g_evals += 1
        return self.problem.gradient(x)

    def hess(self, x) -> np.ndarray:
        self.counters.h_evals += 1
        return self.problem.hessian(x)

    def interval_hess(self, box: IntervalVector) -> IntervalMatrix:
        self.counters.ih_evals += 1
        return self.problem.hessian.interval(box)

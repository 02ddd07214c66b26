"""Line-search optimization with interval-Hessian convexification.

The solver shifts the Hessian by a uniform multiple of the identity,
chosen from a lower bound on the smallest eigenvalue of an interval
Hessian enclosure over a box around the iterate, and only recomputes the
shift when the iterate leaves that box.
"""
from .core import (
    AlphaMethod,
    Counters,
    IterationRecord,
    LineSearchConfig,
    Problem,
    SolverConfig,
    SolverResult,
    Status,
    Strategy,
)
from .expr import ParseError, differentiate, parse_expr
from .interval import Interval, IntervalMatrix, IntervalVector
from .eigen import alpha_from_lambda, lambda_min_em, lambda_min_ggn, lambda_min_mk, sym_eigen
from .solver import make_box, refresh_hessian, run
from .baselines import bfgs, newton_cami, steepest_descent
from .problems import get_problem, load_corpus, parse_problem, read_problem
from .bench import SolverSpec, data_profile, load_problem_set, run_suite, solved_check

__version__ = "0.1.0"

__all__ = [
    "AlphaMethod", "Counters", "IterationRecord", "LineSearchConfig", "Problem", "SolverConfig",
    "SolverResult", "Status", "Strategy", "ParseError", "differentiate", "parse_expr", "Interval",
    "IntervalMatrix", "IntervalVector", "alpha_from_lambda", "lambda_min_em", "lambda_min_ggn",
    "lambda_min_mk", "sym_eigen", "make_box", "refresh_hessian", "run", "bfgs", "newton_cami",
    "steepest_descent", "get_problem", "load_corpus", "parse_problem", "read_problem", "SolverSpec",
    "data_profile", "load_problem_set", "run_suite", "solved_check",
]

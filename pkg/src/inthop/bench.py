"""Benchmark harness: corpus loading, suite runs, CSV files, data profiles."""
from __future__ import annotations

import csv
import math
import shlex
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .baselines import bfgs, newton_cami, steepest_descent
from .core import AlphaMethod, Counters, Problem, SolverConfig, SolverResult, Status, Strategy
from .eigen import sym_eigen
from .problems import read_problem
from . import solver as inthop

__all__ = [
    "DuplicateName",
    "EmptyProblemSet",
    "SolverSpec",
    "RunRecord",
    "DataProfile",
    "RECORD_FIELDS",
    "TRACE_FIELDS",
    "load_problem_set",
    "solved_check",
    "data_profile",
    "run_one",
    "run_suite",
    "read_records",
    "write_records",
    "write_trace",
    "write_profile",
]

RECORD_FIELDS = (
    "problem", "solver", "status", "f_evals", "g_evals", "h_evals", "ih_evals",
    "n3_ops", "iterations", "refreshes", "f_final", "g_norm", "wall_time_s",
)
TRACE_FIELDS = ("k", "t", "f", "gnorm", "delta", "refreshed", "theta")
METRICS = {"f": "f_evals", "g": "g_evals", "h": "h_evals", "n3": "n3_ops"}


class DuplicateName(ValueError):
    pass


class EmptyProblemSet(ValueError):
    pass


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# solvers


@dataclass(frozen=True)
class SolverSpec:
    """A named solver plus its configuration.

    ``kind`` is one of ``sd``, ``bfgs``, ``newton-cami`` or ``inthop``.
    """

    kind: str
    config: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.kind not in ("sd", "bfgs", "newton-cami", "inthop"):
            raise ValueError(f"unknown solver {self.kind!r}")

    @property
    def name(self) -> str:
        if self.kind != "inthop":
            return self.kind
        c = self.config
        name = f"inthop-{c.strategy.value}-{c.alpha_method.value}"
        return name + f"-d{c.delta0:g}" if c.strategy is Strategy.FIXED else name

    def solve(self, problem: Problem) -> SolverResult:
        fn: Callable = {
            "sd": steepest_descent,
            "bfgs": bfgs,
            "newton-cami": newton_cami,
            "inthop": inthop.run,
        }[self.kind]
        return fn(problem, self.config)

    @classmethod
    def from_args(cls, solver: str, strategy: str = "fixed", alpha: str = "mk", delta: float | None = None,
                  eps_g: float | None = None, iter_max: int | None = None) -> "SolverSpec":
        kw: dict = {"strategy": Strategy(strategy), "alpha_method": AlphaMethod(alpha)}
        if delta is not None:
            kw["delta0"] = delta
            kw["delta_min"] = min(SolverConfig.delta_min, delta)
            kw["delta_max"] = max(SolverConfig.delta_max, delta)
        if eps_g is not None:
            kw["eps_g"] = eps_g
        if iter_max is not None:
            kw["iter_max"] = iter_max
        return cls(solver, SolverConfig(**kw))


def parse_solver_line(line: str) -> SolverSpec:
    """Parse one config-file line such as ``--solver inthop --strategy a1``."""
    import argparse

    ap = argparse.ArgumentParser(add_help=False, exit_on_error=False)
    ap.add_argument("--solver", required=True, choices=["sd", "bfgs", "newton-cami", "inthop"])
    ap.add_argument("--strategy", default="fixed", choices=["fixed", "a1", "a2"])
    ap.add_argument("--alpha", default="mk", choices=["ggn", "em", "mk"])
    ap.add_argument("--delta", type=float)
    ap.add_argument("--eps-g", type=float)
    ap.add_argument("--iter-max", type=int)
    try:
        ns = ap.parse_args(shlex.split(line))
    except (argparse.ArgumentError, SystemExit) as exc:
        raise ValueError(f"bad solver line {line!r}: {exc}") from None
    return SolverSpec.from_args(ns.solver, ns.strategy, ns.alpha, ns.delta, ns.eps_g, ns.iter_max)


def read_solver_config(path) -> list[SolverSpec]:
    specs = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            specs.append(parse_solver_line(line))
    return specs


# ---------------------------------------------------------------------------
# records


@dataclass
class RunRecord:
    problem: str
    solver: str
    status: str
    counters: Counters
    f_final: float
    g_norm: float
    wall_time: float = 0.0
    result: SolverResult | None = field(default=None, repr=False, compare=False)

    @property
    def solved(self) -> bool:
        return self.status == Status.SOLVED.value

    def metric(self, metric: str) -> float:
        """Cost of this run in ``metric``; infinite if the run did not solve."""
        if not self.solved:
            return math.inf
        return float(getattr(self.counters, METRICS.get(metric, metric)))

    def row(self) -> list[str]:
        c = self.counters
        return [
            self.problem, self.solver, self.status,
            *(_fmt(getattr(c, k)) for k in ("f_evals", "g_evals", "h_evals", "ih_evals", "n3_ops", "iterations", "refreshes")),
            _fmt(self.f_final), _fmt(self.g_norm), _fmt(self.wall_time),
        ]


def write_records(records: Iterable[RunRecord], path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_FIELDS)
        for r in records:
            w.writerow(r.row())


def read_records(path) -> list[RunRecord]:
    out = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            c = Counters(**{k: int(row[k]) for k in vars(Counters())})
            out.append(RunRecord(
                row["problem"], row["solver"], row["status"], c,
                float(row["f_final"]), float(row["g_norm"]), float(row["wall_time_s"]),
            ))
    return out


def write_trace(result: SolverResult, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_FIELDS)
        for r in result.trace:
            w.writerow([r.k, r.t, _fmt(r.f), _fmt(r.gnorm), _fmt(r.delta), int(r.refreshed), _fmt(r.theta)])


# ---------------------------------------------------------------------------
# corpus and runs


def load_problem_set(directory) -> list[Problem]:
    """Parse every ``*.txt`` problem file in ``directory``, sorted by name."""
    directory = Path(directory)
    if not directory.is_dir():
        raise NotADirectoryError(str(directory))
    problems: dict[str, Problem] = {}
    for path in sorted(directory.glob("*.txt")):
        p = read_problem(path)
        if p.name in problems:
            raise DuplicateName(f"{path}: problem name {p.name!r} already defined")
        problems[p.name] = p
    return [problems[k] for k in sorted(problems)]


def solved_check(result: SolverResult, problem: Problem, eps_g: float = 1e-3, eps_H: float = 1e-3) -> bool:
    """Second-order solved test: ``|g| < eps_g`` and ``lambda_min(H) > -eps_H``."""
    x = np.asarray(result.x_final, dtype=float)
    if not np.all(np.isfinite(x)):
        return False
    g = problem.gradient(x)
    if not float(np.linalg.norm(g)) < eps_g:
        return False
    h = problem.hessian(x)
    if not np.all(np.isfinite(h)):
        return False
    return bool(sym_eigen(h)[0] > -eps_H)


def run_one(problem: Problem, spec: SolverSpec) -> RunRecord:
    t0 = time.perf_counter()
    res = spec.solve(problem)
    wall = time.perf_counter() - t0
    return RunRecord(problem.name, spec.name, res.status.value, res.counters, res.f_final, res.g_norm, wall, res)


def run_suite(problems: Sequence[Problem], specs: Sequence[SolverSpec], out=None, traces: bool = True) -> list[RunRecord]:
    """Run every (problem, solver) pair; optionally write CSVs under ``out``.

    Writes ``records.csv`` and, if ``traces``, ``traces/<problem>__<solver>.csv``.
    """
    records = [run_one(p, s) for p in problems for s in specs]
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        write_records(records, out / "records.csv")
        if traces:
            tdir = out / "traces"
            tdir.mkdir(exist_ok=True)
            for r in records:
                write_trace(r.result, tdir / f"{r.problem}__{r.solver}.csv")
    return records


# ---------------------------------------------------------------------------
# data profiles


@dataclass
class DataProfile:
    metric: str
    points: list  # (budget, fraction) pairs, budgets ascending

    def __call__(self, budget: float) -> float:
        frac = 0.0
        for b, d in self.points:
            if b <= budget:
                frac = d
        return frac


def data_profile(records: Sequence[RunRecord] | Sequence[float], metric: str, budgets: Iterable[float]) -> DataProfile:
    """Fraction of problems solved within each budget.

    ``records`` holds one entry per problem for a single solver: either
    :class:`RunRecord` objects or raw metric values with ``inf`` for
    failures.
    """
    costs = [r.metric(metric) if isinstance(r, RunRecord) else float(r) for r in records]
    if not costs:
        raise EmptyProblemSet("data profile needs at least one problem")
    costs_arr = np.sort(np.asarray(costs, dtype=float))
    size = costs_arr.size
    pts = []
    for b in sorted(float(b) for b in budgets):
        solved = int(np.searchsorted(costs_arr, b, side="right"))
        solved -= int(np.count_nonzero(np.isinf(costs_arr[:solved])))
        pts.append((b, solved / size))
    return DataProfile(metric, pts)


def profiles_by_solver(records: Sequence[RunRecord], metric: str, budgets: Sequence[float]) -> dict[str, DataProfile]:
    by: dict[str, list] = {}
    for r in records:
        by.setdefault(r.solver, []).append(r)
    return {name: data_profile(rs, metric, budgets) for name, rs in by.items()}


def write_profile(profiles: dict[str, DataProfile], path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("solver", "metric", "budget", "fraction"))
        for name in sorted(profiles):
            prof = profiles[name]
            for b, d in prof.points:
                w.writerow((name, prof.metric, _fmt(b), _fmt(d)))

"""Command-line driver: ``python -m inthop <command> ...``.

Exit codes: 0 on success, 1 when a run fails or a check finds a
violation, 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bench, diagnostics
from .expr import ParseError
from .problems import corpus_path, read_problem

OK, FAILURE, USAGE = 0, 1, 2


def _add_solver_flags(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--solver", required=True, choices=["sd", "bfgs", "newton-cami", "inthop"])
    ap.add_argument("--strategy", default="fixed", choices=["fixed", "a1", "a2"])
    ap.add_argument("--alpha", default="mk", choices=["ggn", "em", "mk"])
    ap.add_argument("--delta", type=float)
    ap.add_argument("--eps-g", type=float)
    ap.add_argument("--iter-max", type=int)


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="inthop", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="summarize a directory of problem files")
    p.add_argument("dir", nargs="?", type=Path, help="defaults to the shipped corpus")

    p = sub.add_parser("run", help="solve one problem")
    p.add_argument("--problem", required=True, help="corpus name or path to a problem file")
    p.add_argument("--problems", type=Path, help="directory to look the name up in")
    _add_solver_flags(p)
    p.add_argument("--trace", type=Path, help="write the iteration trace CSV here")

    p = sub.add_parser("suite", help="run every problem against every configured solver")
    p.add_argument("--problems", required=True, type=Path)
    p.add_argument("--config", required=True, type=Path, help="one solver flag line per solver")
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("profile", help="data profiles from a records CSV")
    p.add_argument("--records", required=True, type=Path)
    p.add_argument("--metric", required=True, choices=sorted(bench.METRICS))
    p.add_argument("--budgets", required=True, help="comma-separated budgets")
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("check", help="run the diagnostic suite; nonzero exit on any violation")
    p.add_argument("--problems", type=Path, help="defaults to the shipped corpus")
    p.add_argument("--seed", type=int, default=0)
    return ap


def _find_problem(name: str, directory: Path | None):
    path = Path(name)
    if path.suffix == ".txt" and path.is_file():
        return read_problem(path)
    for p in bench.load_problem_set(directory or corpus_path()):
        if p.name == name:
            return p
    raise KeyError(f"no problem named {name!r}")


def cmd_list(args) -> int:
    problems = bench.load_problem_set(args.dir or corpus_path())
    width = max((len(p.name) for p in problems), default=4)
    print(f"{'name':<{width}}  {'n':>4}  fstar")
    for p in problems:
        fstar = "-" if p.fstar is None else format(p.fstar, ".6g")
        print(f"{p.name:<{width}}  {p.n:>4}  {fstar}")
    print(f"{len(problems)} problem(s)")
    return OK


def cmd_run(args) -> int:
    problem = _find_problem(args.problem, args.problems)
    spec = bench.SolverSpec.from_args(args.solver, args.strategy, args.alpha, args.delta, args.eps_g, args.iter_max)
    rec = bench.run_one(problem, spec)
    if args.trace:
        bench.write_trace(rec.result, args.trace)
    print(f"{rec.problem} {rec.solver}: {rec.status}")
    print(f"  f = {rec.f_final:.10g}   |g| = {rec.g_norm:.3e}")
    print("  " + "  ".join(f"{k}={v}" for k, v in rec.counters.as_dict().items()))
    return OK if rec.solved else FAILURE


def cmd_suite(args) -> int:
    problems = bench.load_problem_set(args.problems)
    specs = bench.read_solver_config(args.config)
    records = bench.run_suite(problems, specs, args.out)
    solved = sum(r.solved for r in records)
    print(f"{len(records)} run(s), {solved} solved; records in {args.out / 'records.csv'}")
    return OK


def cmd_profile(args) -> int:
    try:
        budgets = [float(b) for b in args.budgets.split(",") if b.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad budget list {args.budgets!r}") from None
    records = bench.read_records(args.records)
    profiles = bench.profiles_by_solver(records, args.metric, budgets)
    bench.write_profile(profiles, args.out)
    for name in sorted(profiles):
        print(name, " ".join(f"{b:g}:{d:.3f}" for b, d in profiles[name].points))
    return OK


def cmd_check(args) -> int:
    problems = bench.load_problem_set(args.problems or corpus_path())
    reports = diagnostics.run_all(problems, seed=args.seed)
    for rep in reports:
        print(("PASS " if rep.ok else "FAIL ") + rep.summary())
        for v in rep.violations[:5]:
            print("     ", v)
        for k, v in rep.notes.items():
            print(f"      note {k}: {v}")
    return OK if all(r.ok for r in reports) else FAILURE


COMMANDS = {"list": cmd_list, "run": cmd_run, "suite": cmd_suite, "profile": cmd_profile, "check": cmd_check}


def main(argv=None) -> int:
    ap = _parser()
    args = ap.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ParseError, ValueError, KeyError, OSError, argparse.ArgumentTypeError) as exc:
        print(f"inthop {args.command}: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())

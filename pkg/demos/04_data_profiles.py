"""Data profiles over the shipped corpus.

A data profile d(z) is the fraction of problems a solver solves with cost at
most z, where cost is a counter such as gradient evaluations.  Failures
count as infinite cost.  Records and traces are written to ./profile_out.

Run with ``python3 demos/04_data_profiles.py`` (a few seconds).
"""
from pathlib import Path

import numpy as np

from inthop import AlphaMethod, SolverConfig, Strategy, load_corpus
from inthop.bench import SolverSpec, profiles_by_solver, run_suite, write_profile

# the 100-variable Rosenbrock dominates the run time; leave it out here
problems = [p for p in load_corpus() if p.name != "rosenbrock_100"]
specs = [
    SolverSpec("sd"),
    SolverSpec("bfgs"),
    SolverSpec("newton-cami"),
    SolverSpec("inthop", SolverConfig(strategy=Strategy.A1, alpha_method=AlphaMethod.EM)),
    SolverSpec("inthop", SolverConfig(strategy=Strategy.A1, alpha_method=AlphaMethod.MK)),
    SolverSpec("inthop", SolverConfig(strategy=Strategy.A2, alpha_method=AlphaMethod.MK)),
]

out = Path("profile_out")
records = run_suite(problems, specs, out)
budgets = np.logspace(0, 5, 11)

for metric in ("g", "h", "n3"):
    profiles = profiles_by_solver(records, metric, budgets)
    write_profile(profiles, out / f"profile_{metric}.csv")
    print(f"\nfraction solved within a budget of {metric}-evaluations")
    print(f"{'solver':22s}" + "".join(f"{b:>8.0f}" for b in budgets[::2]))
    for name, prof in profiles.items():
        print(f"{name:22s}" + "".join(f"{prof(b):8.2f}" for b in budgets[::2]))

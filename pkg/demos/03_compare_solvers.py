"""INTHOP variants against steepest descent, BFGS and Newton-CAMI.

The interesting columns are the Hessian evaluations and O(n^3) operations:
INTHOP only recomputes its model Hessian when an iterate leaves the current
box, so those counts can be far below the iteration count.

Run with ``python3 demos/03_compare_solvers.py``.
"""
from inthop import AlphaMethod, SolverConfig, Strategy, get_problem
from inthop.bench import SolverSpec, run_one

problems = ["rosenbrock_2", "beale", "wood_4", "dixon_price_10", "100_s299"]
specs = [
    SolverSpec("sd"),
    SolverSpec("bfgs"),
    SolverSpec("newton-cami"),
    SolverSpec("inthop", SolverConfig(strategy=Strategy.FIXED, alpha_method=AlphaMethod.MK)),
    SolverSpec("inthop", SolverConfig(strategy=Strategy.A1, alpha_method=AlphaMethod.MK)),
    SolverSpec("inthop", SolverConfig(strategy=Strategy.A2, alpha_method=AlphaMethod.GGN)),
]

header = f"{'problem':15s} {'solver':22s} {'status':14s} {'iters':>6s} {'g':>6s} {'H':>6s} {'n3':>6s} {'f':>11s}"
print(header)
print("-" * len(header))
for name in problems:
    p = get_problem(name)
    for spec in specs:
        r = run_one(p, spec)
        c = r.counters
        print(
            f"{name:15s} {r.solver:22s} {r.status:14s} {c.iterations:6d} {c.g_evals:6d} "
            f"{c.h_evals:6d} {c.n3_ops:6d} {r.f_final:11.3e}"
        )
    print()

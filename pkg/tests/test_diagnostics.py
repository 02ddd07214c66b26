import copy

import numpy as np
import pytest

from inthop.core import AlphaMethod, SolverConfig, Strategy
from inthop.diagnostics import (
    check_descent,
    check_eigen_bounds,
    check_enclosure,
    check_ledger,
    check_lemma1,
    check_theorem1,
    inthop_n3_expected,
    trajectory_boxes,
)
from inthop.solver import make_box, run


def test_eigen_bounds_small_run():
    rep = check_eigen_bounds(count=40, seed=3)
    assert rep.ok and rep.checked > 40 * 3


def test_enclosure_on_trajectory(corpus_by_name):
    p = corpus_by_name["beale"]
    boxes = [make_box(x, d) for x, d in trajectory_boxes(p, count=4)]
    rep = check_enclosure(p, boxes, samples=50)
    assert rep.ok and rep.checked == 200


def test_theorem1_convex_problem_passes(corpus_by_name):
    p = corpus_by_name["rosenbrock_2"]
    rep = check_theorem1(p, [(np.array([1.0, 1.0]), 0.1)])
    assert rep.ok
    assert rep.checked == 60


def test_theorem1_hessian_bound_fails_on_concave_box(corpus_by_name):
    # f'' = 12x^2 - 18x - 3 < 0 around x = 1; the 2*alpha shift has norm |lambda|
    p = corpus_by_name["quartic_1"]
    rep = check_theorem1(p, [(np.array([1.0]), 0.1)])
    kinds = {v["bound"] for v in rep.violations}
    assert kinds == {"H"}
    assert rep.notes["hessian_bound_with_full_shift"]["violations"] == 0


def test_lemma1(corpus_by_name):
    rep = check_lemma1(corpus_by_name["wood_4"], SolverConfig(strategy=Strategy.A2, alpha_method=AlphaMethod.EM))
    assert rep.ok and rep.checked > 10


def test_descent_audit_detects_increase(corpus_by_name):
    res = run(corpus_by_name["beale"], SolverConfig())
    assert check_descent(res).ok
    bad = copy.deepcopy(res)
    bad.trace[1].f = bad.trace[0].f + 1.0
    assert not check_descent(bad).ok


@pytest.mark.parametrize("method, per", [(AlphaMethod.GGN, 1), (AlphaMethod.EM, 2), (AlphaMethod.MK, 2)])
def test_ledger_formula(method, per, corpus_by_name):
    res = run(corpus_by_name["himmelblau"], SolverConfig(alpha_method=method))
    assert res.saddle_checked
    assert inthop_n3_expected(res, method) == per * res.counters.refreshes + 1
    assert check_ledger(res, "inthop", method).ok
    res.counters.n3_ops += 1
    assert not check_ledger(res, "inthop", method).ok


def test_ledger_unknown_kind(corpus_by_name):
    with pytest.raises(ValueError):
        check_ledger(run(corpus_by_name["booth"]), "bfgs")

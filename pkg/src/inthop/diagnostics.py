"""Runtime checks of the guarantees INTHOP relies on.

Each check returns a :class:`CheckReport` counting the sampled cases and
listing the violations found.  The checks are deliberately empirical:
Lipschitz constants and minimum eigenvalues are estimated from samples, so
a report certifies only the sampled cases.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .core import AlphaMethod, Problem, SolverConfig, SolverResult, Strategy
from .eigen import alpha_from_lambda, lambda_min_em, lambda_min_ggn, lambda_min_mk, sym_eigen
from .interval import IntervalMatrix, IntervalVector
from . import solver as inthop

__all__ = [
    "CheckReport",
    "random_interval_matrix",
    "sample_point_matrices",
    "vertex_lambda_min",
    "check_eigen_bounds",
    "check_enclosure",
    "check_theorem1",
    "check_lemma1",
    "check_descent",
    "check_ledger",
    "trajectory_boxes",
    "run_all",
]

ALL_VARIANTS = tuple(SolverConfig(strategy=s, alpha_method=m) for s in Strategy for m in AlphaMethod)


@dataclass
class CheckReport:
    name: str
    checked: int = 0
    violations: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def merge(self, other: "CheckReport") -> "CheckReport":
        self.checked += other.checked
        self.violations.extend(other.violations)
        for k, v in other.notes.items():
            self.notes.setdefault(k, v)
        return self

    def summary(self) -> str:
        verdict = "ok" if self.ok else f"{len(self.violations)} violation(s)"
        return f"{self.name}: {self.checked} checked, {verdict}"


# ---------------------------------------------------------------------------
# eigenvalue bounds


def random_interval_matrix(rng: np.random.Generator, n: int, scale: float = 10.0) -> IntervalMatrix:
    """Symmetric interval matrix with random centres and radii."""
    c = rng.uniform(-scale, scale, (n, n))
    r = rng.uniform(0.0, scale / 2, (n, n)) * (rng.random((n, n)) < 0.8)
    c = np.triu(c) + np.triu(c, 1).T
    r = np.triu(r) + np.triu(r, 1).T
    return IntervalMatrix(c - r, c + r)


def sample_point_matrices(a: IntervalMatrix, rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` symmetric point matrices drawn uniformly from ``a``."""
    n = a.n
    u = rng.random((count, n, n))
    u = np.triu(u) + np.transpose(np.triu(u, 1), (0, 2, 1))
    return a.lo + u * (a.hi - a.lo)


def vertex_lambda_min(a: IntervalMatrix) -> float:
    """Smallest eigenvalue over all symmetric endpoint matrices.

    Enumerates ``2^(n(n+1)/2)`` vertices, so only meant for small ``n``.
    """
    n = a.n
    iu = np.triu_indices(n)
    lo, hi = a.lo[iu], a.hi[iu]
    best = math.inf
    for pick in product((False, True), repeat=lo.size):
        m = np.zeros((n, n))
        m[iu] = np.where(pick, hi, lo)
        m = m + np.triu(m, 1).T
        best = min(best, float(sym_eigen(m)[0]))
    return best


def check_eigen_bounds(
    count: int = 500,
    max_n: int = 5,
    samples: int = 200,
    vertex_max_n: int = 3,
    seed: int = 0,
) -> CheckReport:
    """All three bounds sit below every sampled eigenvalue and the vertex minimum."""
    rng = np.random.default_rng(seed)
    rep = CheckReport("eigen-bound soundness")
    for i in range(count):
        n = int(rng.integers(1, max_n + 1))
        a = random_interval_matrix(rng, n)
        bounds = {"ggn": lambda_min_ggn(a), "em": lambda_min_em(a), "mk": lambda_min_mk(a)}
        pts = sample_point_matrices(a, rng, samples)
        sampled = float(np.min(np.linalg.eigvalsh(pts)[:, 0]))
        truth = {"sampled": sampled}
        if n <= vertex_max_n:
            truth["vertex"] = vertex_lambda_min(a)
        for name, b in bounds.items():
            for kind, ref in truth.items():
                rep.checked += 1
                if not b <= ref + 1e-9 * (1.0 + abs(ref)):
                    rep.violations.append({"matrix": i, "n": n, "bound": name, "value": b, kind: ref})
    return rep


# ---------------------------------------------------------------------------
# interval Hessian enclosure


def _box_samples(box: IntervalVector, rng: np.random.Generator, count: int) -> np.ndarray:
    return box.lo + rng.random((count, box.lo.size)) * (box.hi - box.lo)


def check_enclosure(problem: Problem, boxes: Iterable[IntervalVector], samples: int = 200, seed: int = 0) -> CheckReport:
    """Point Hessians sampled in each box lie inside its interval Hessian."""
    rng = np.random.default_rng(seed)
    rep = CheckReport(f"enclosure[{problem.name}]")
    for b, box in enumerate(boxes):
        ih = problem.hessian.interval(box)
        for x in _box_samples(box, rng, samples):
            h = problem.hessian(x)
            if not np.all(np.isfinite(h)):
                continue
            rep.checked += 1
            if not ih.contains(h):
                rep.violations.append({"problem": problem.name, "box": b, "x": x.tolist()})
    return rep


# ---------------------------------------------------------------------------
# approximation bounds between the shifted model and the objective


def trajectory_boxes(problem: Problem, count: int = 10, cfg: SolverConfig | None = None) -> list[tuple[np.ndarray, float]]:
    """``count`` (centre, width) pairs spread along an INTHOP trajectory.

    The solver is run with A1 + MK by default; centres are iterates picked
    at evenly spaced trace positions and widths are the recorded ``delta``.
    """
    cfg = cfg or SolverConfig(strategy=Strategy.A1, alpha_method=AlphaMethod.MK)
    xs: list[tuple[np.ndarray, float]] = []

    def grab(k, state, x, g, p):
        xs.append((x.copy(), state.delta))

    inthop.run(problem, cfg, callback=grab)
    if not xs:
        return [(problem.x0.copy(), cfg.delta0)]
    idx = np.unique(np.linspace(0, len(xs) - 1, min(count, len(xs))).round().astype(int))
    return [xs[i] for i in idx]


def _underestimator(problem: Problem, lo, hi, alpha: float):
    """Value, gradient and Hessian of ``f(x) + alpha * sum (lo - x)(hi - x)``."""

    def value(x):
        return problem.f(x) + alpha * float(np.sum((lo - x) * (hi - x)))

    def grad(x):
        return problem.gradient(x) + alpha * (2.0 * x - (lo + hi))

    def hess(x):
        return problem.hessian(x) + 2.0 * alpha * np.eye(x.size)

    return value, grad, hess


def check_theorem1(
    problem: Problem,
    boxes: Sequence[tuple[np.ndarray, float]],
    pairs: int = 20,
    samples: int = 200,
    seed: int = 0,
) -> CheckReport:
    """Sampled check of the model/objective approximation bounds.

    For each box ``[x_t - delta/2, x_t + delta/2]`` the minimum Hessian
    eigenvalue and the Lipschitz constants of ``f``, ``g`` and ``H`` are
    estimated from ``samples`` points, the shift is
    ``alpha = max(0, -lambda/2)``, and for ``pairs`` random ``x_k`` in the
    box the three bounds are tested with ``x_t`` the box centre::

        |L(x_t) - f(x_k)|      <= L_f/2 sqrt(n) delta + |lambda|/8 n delta^2
        |dL(x_t) - g(x_k)|     <= L_g/2 sqrt(n) delta + |lambda|/2 sqrt(n) delta
        |d2L(x_t) - H(x_k)|_2  <= L_H/2 sqrt(n) delta + |lambda|/2 sqrt(n)

    The model Hessian carries ``2*alpha*I``, which has norm ``|lambda|``,
    so the last bound cannot hold when ``lambda < 0`` and ``n < 4`` and the
    Hessian barely varies.  Each case also records the value of the
    Hessian bound with ``|lambda|`` in place of ``|lambda|/2 sqrt(n)``
    under ``notes['hessian_bound_with_full_shift']``.
    """
    rng = np.random.default_rng(seed)
    rep = CheckReport(f"approximation bounds[{problem.name}]")
    n = problem.n
    rootn = math.sqrt(n)
    full_shift_fail = 0
    for b, (xt, delta) in enumerate(boxes):
        lo, hi = xt - delta / 2, xt + delta / 2
        box = IntervalVector(lo, hi)
        xk_all = _box_samples(box, rng, pairs)
        pts = np.vstack([xt[None, :], _box_samples(box, rng, samples), xk_all])
        fv = np.array([problem.f(x) for x in pts])
        gv = np.array([problem.gradient(x) for x in pts])
        hv = np.array([problem.hessian(x) for x in pts])
        if not (np.all(np.isfinite(fv)) and np.all(np.isfinite(gv)) and np.all(np.isfinite(hv))):
            rep.notes.setdefault("skipped_boxes", []).append(b)
            continue
        lam = float(np.min(np.linalg.eigvalsh(hv)[:, 0]))
        # Lipschitz estimates: consecutive sample pairs plus every pair with the centre
        i = np.concatenate([np.arange(len(pts) - 1), np.zeros(len(pts) - 1, dtype=int)])
        j = np.concatenate([np.arange(1, len(pts)), np.arange(1, len(pts))])
        dx = np.linalg.norm(pts[i] - pts[j], axis=1)
        keep = dx > 0
        i, j, dx = i[keep], j[keep], dx[keep]
        L_f = float(np.max(np.abs(fv[i] - fv[j]) / dx))
        L_g = float(np.max(np.linalg.norm(gv[i] - gv[j], axis=1) / dx))
        L_H = float(np.max(np.linalg.norm(hv[i] - hv[j], ord=2, axis=(1, 2)) / dx))

        alpha = alpha_from_lambda(lam)
        value, grad, hess = _underestimator(problem, lo, hi, alpha)
        Lt, dLt, d2Lt = value(xt), grad(xt), hess(xt)
        bound_f = L_f / 2 * rootn * delta + abs(lam) / 8 * n * delta**2
        bound_g = L_g / 2 * rootn * delta + abs(lam) / 2 * rootn * delta
        bound_h = L_H / 2 * rootn * delta + abs(lam) / 2 * rootn
        bound_h_full = L_H / 2 * rootn * delta + abs(lam)
        base = len(pts) - pairs
        for q in range(pairs):
            xk = pts[base + q]
            gaps = {
                "f": (abs(Lt - fv[base + q]), bound_f),
                "g": (float(np.linalg.norm(dLt - gv[base + q])), bound_g),
                "H": (float(np.linalg.norm(d2Lt - hv[base + q], ord=2)), bound_h),
            }
            for kind, (lhs, rhs) in gaps.items():
                rep.checked += 1
                if not lhs <= rhs * (1 + 1e-12) + 1e-12:
                    rep.violations.append({
                        "problem": problem.name, "box": b, "bound": kind, "lhs": lhs, "rhs": rhs,
                        "lambda": lam, "n": n, "x_k": xk.tolist(),
                    })
            if not gaps["H"][0] <= bound_h_full * (1 + 1e-12) + 1e-12:
                full_shift_fail += 1
    rep.notes["hessian_bound_with_full_shift"] = {"violations": full_shift_fail}
    return rep


def check_lemma1(problem: Problem, cfg: SolverConfig, rel_tol: float = 1e-8) -> CheckReport:
    """``|p_k| <= |g_k| / (lambda_min(H(x_t)) + 2 alpha)`` at every iteration.

    Iterations whose denominator is not positive are skipped.
    """
    rep = CheckReport(f"step-length bound[{problem.name}/{cfg.strategy.value}-{cfg.alpha_method.value}]")
    denom_cache: dict[int, float] = {}

    def audit(k, state, x, g, p):
        key = id(state)
        if key not in denom_cache:
            denom_cache.clear()
            denom_cache[key] = float(sym_eigen(state.hess_t)[0]) + 2.0 * state.alpha
        denom = denom_cache[key]
        if not denom > 0:
            return
        rep.checked += 1
        bound = float(np.linalg.norm(g)) / denom
        pn = float(np.linalg.norm(p))
        if not pn <= bound * (1 + rel_tol):
            rep.violations.append({"problem": problem.name, "k": k, "p_norm": pn, "bound": bound})

    inthop.run(problem, cfg, callback=audit)
    return rep


# ---------------------------------------------------------------------------
# run audits


def check_descent(result: SolverResult, label: str = "") -> CheckReport:
    """Every accepted step has ``g'p < 0`` and strictly decreases ``f``."""
    rep = CheckReport(f"descent[{label}]")
    tr = result.trace
    for a, b in zip(tr, tr[1:]):
        if math.isnan(a.theta):
            continue
        rep.checked += 1
        if not a.gtp < 0:
            rep.violations.append({"run": label, "k": a.k, "gtp": a.gtp})
        if not b.f < a.f:
            rep.violations.append({"run": label, "k": a.k, "f": a.f, "f_next": b.f})
    return rep


def inthop_n3_expected(result: SolverResult, method: AlphaMethod | str) -> int:
    """``refreshes * (2 for EM/MK, 1 for GGN) + saddle check``."""
    per = 1 if AlphaMethod(method) is AlphaMethod.GGN else 2
    return result.counters.refreshes * per + int(result.saddle_checked)


def cami_n3_expected(result: SolverResult) -> int:
    """Sum of ``attempts + 1`` over completed iterations + saddle check."""
    total = 0
    for rec in result.trace:
        if rec.chol_attempts:
            total += rec.chol_attempts + (0 if math.isnan(rec.tau) else 1)
    return total + int(result.saddle_checked)


def check_ledger(result: SolverResult, kind: str, method: AlphaMethod | str = AlphaMethod.MK, label: str = "") -> CheckReport:
    """Counter identities for INTHOP (``inthop``) or Newton-CAMI (``newton-cami``) runs."""
    rep = CheckReport(f"ledger[{label}]")
    c = result.counters
    if kind == "inthop":
        checks = {
            "h_evals == refreshes": (c.h_evals, c.refreshes),
            "ih_evals == refreshes": (c.ih_evals, c.refreshes),
            "n3_ops": (c.n3_ops, inthop_n3_expected(result, method)),
        }
    elif kind == "newton-cami":
        checks = {
            "h_evals == iterations": (c.h_evals, sum(1 for r in result.trace if r.chol_attempts)),
            "n3_ops": (c.n3_ops, cami_n3_expected(result)),
        }
    else:
        raise ValueError(f"no ledger identity for {kind!r}")
    for what, (got, want) in checks.items():
        rep.checked += 1
        if got != want:
            rep.violations.append({"run": label, "check": what, "got": got, "expected": want})
    return rep


# ---------------------------------------------------------------------------


def run_all(problems: Sequence[Problem], variants: Sequence[SolverConfig] = ALL_VARIANTS, seed: int = 0) -> list[CheckReport]:
    """Every diagnostic over ``problems``; used by the ``check`` command."""
    desc = CheckReport("descent and monotonicity")
    ledger = CheckReport("lazy-Hessian ledger")
    lemma = CheckReport("step-length bound")
    enc = CheckReport("interval Hessian enclosure")
    thm = CheckReport("approximation bounds")
    full_shift = 0
    for p in problems:
        for cfg in variants:
            label = f"{p.name}/{cfg.strategy.value}-{cfg.alpha_method.value}"
            res = inthop.run(p, cfg)
            desc.merge(check_descent(res, label))
            ledger.merge(check_ledger(res, "inthop", cfg.alpha_method, label))
        lemma.merge(check_lemma1(p, SolverConfig(strategy=Strategy.A1, alpha_method=AlphaMethod.MK)))
        boxes = trajectory_boxes(p)
        enc.merge(check_enclosure(p, (inthop.make_box(x, d) for x, d in boxes), seed=seed))
        t = check_theorem1(p, boxes, seed=seed)
        full_shift += t.notes["hessian_bound_with_full_shift"]["violations"]
        t.notes.clear()
        thm.merge(t)
    thm.notes["hessian_bound_with_full_shift"] = {"violations": full_shift}
    return [enc, thm, lemma, check_eigen_bounds(seed=seed), desc, ledger]

"""Expression trees with symbolic derivatives and interval extensions.

Expressions are immutable ``Expr`` nodes built through the smart
constructors below (:func:`add`, :func:`mul`, ...).  The constructors do a
small, deterministic amount of simplification: constant folding, dropping
additive zeros and multiplicative ones, pulling signs out of products and
collecting repeated factors into integer powers.  Nothing is factored or
rearranged beyond that, so the natural interval extension of a derivative
is fully determined by the objective's written form.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .interval import DomainViolation, Interval, IntervalMatrix, IntervalVector

__all__ = [
    "Expr",
    "ParseError",
    "UnknownVariable",
    "const",
    "var",
    "add",
    "sub",
    "mul",
    "div",
    "neg",
    "powi",
    "power",
    "apply",
    "parse_expr",
    "diff",
    "differentiate",
    "Gradient",
    "HessianExprs",
    "eval_scalar",
    "eval_gradient",
    "eval_hessian",
    "eval_interval",
    "interval_hessian",
]

FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt")


@dataclass(frozen=True, eq=False)
class Expr:
    """A node of an expression tree.

    ``kind`` is one of ``const``, ``var``, ``add``, ``mul``, ``div``,
    ``powi``, ``pow``, ``neg``, ``exp``, ``log``, ``sin``, ``cos`` and
    ``sqrt``.  ``value`` carries the constant, the 1-based variable index or
    the integer exponent.  Subtraction is stored as addition of a negation.
    """

    kind: str
    args: tuple = ()
    value: float | int | None = None
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        h = hash((self.kind, self.value, tuple(a._hash for a in self.args)))
        object.__setattr__(self, "_hash", h)

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Expr)
            and self._hash == other._hash
            and self.kind == other.kind
            and self.value == other.value
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    @cached_property
    def variables(self) -> frozenset:
        if self.kind == "var":
            return frozenset((self.value,))
        out = frozenset()
        for a in self.args:
            out |= a.variables
        return out

    @property
    def is_const(self) -> bool:
        return self.kind == "const"

    def __str__(self) -> str:
        return to_infix(self)

    # operator sugar, handy in tests and corpus builders
    def __add__(self, o):
        return add(self, _wrap(o))

    def __radd__(self, o):
        return add(_wrap(o), self)

    def __sub__(self, o):
        return sub(self, _wrap(o))

    def __rsub__(self, o):
        return sub(_wrap(o), self)

    def __mul__(self, o):
        return mul(self, _wrap(o))

    def __rmul__(self, o):
        return mul(_wrap(o), self)

    def __truediv__(self, o):
        return div(self, _wrap(o))

    def __rtruediv__(self, o):
        return div(_wrap(o), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, k):
        if isinstance(k, Expr):
            return power(self, k)
        if float(k).is_integer() and k >= 0:
            return powi(self, int(k))
        return power(self, const(k))


def _wrap(x) -> Expr:
    return x if isinstance(x, Expr) else const(x)


ZERO = Expr("const", value=0.0)
ONE = Expr("const", value=1.0)


def const(c: float) -> Expr:
    c = float(c)
    if c == 0.0:
        return ZERO
    if c == 1.0:
        return ONE
    return Expr("const", value=c)


def var(i: int) -> Expr:
    if i < 1:
        raise ValueError("variable indices start at 1")
    return Expr("var", value=int(i))


def add(*terms: Expr) -> Expr:
    flat: list[Expr] = []
    c = 0.0
    for t in terms:
        for u in t.args if t.kind == "add" else (t,):
            if u.is_const:
                c += u.value
            else:
                flat.append(u)
    if c != 0.0:
        flat.append(const(c))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Expr("add", tuple(flat))


def sub(a: Expr, b: Expr) -> Expr:
    return add(a, neg(b))


def neg(a: Expr) -> Expr:
    if a.is_const:
        return const(-a.value)
    if a.kind == "neg":
        return a.args[0]
    if a.kind == "mul" and a.args[0].is_const:
        return mul(const(-a.args[0].value), *a.args[1:])
    return Expr("neg", (a,))


def mul(*factors: Expr) -> Expr:
    coeff = 1.0
    flat: list[Expr] = []
    for f in factors:
        stack = [f]
        while stack:
            u = stack.pop()
            if u.kind == "mul":
                stack.extend(reversed(u.args))
            elif u.kind == "neg":
                coeff = -coeff
                stack.append(u.args[0])
            elif u.is_const:
                coeff *= u.value
            else:
                flat.append(u)
    if coeff == 0.0:
        return ZERO
    # collect repeated factors into integer powers, first-appearance order
    order: list[Expr] = []
    exps: dict[Expr, int] = {}
    for u in flat:
        base, k = (u.args[0], u.value) if u.kind == "powi" else (u, 1)
        if base not in exps:
            order.append(base)
            exps[base] = 0
        exps[base] += k
    body = [_powi_raw(b, exps[b]) for b in order]
    body = [b for b in body if not (b.is_const and b.value == 1.0)]
    if not body:
        return const(coeff)
    prod = body[0] if len(body) == 1 else Expr("mul", tuple(body))
    if coeff == 1.0:
        return prod
    if coeff == -1.0:
        return Expr("neg", (prod,))
    return Expr("mul", (const(coeff),) + (prod.args if prod.kind == "mul" else (prod,)))


def _powi_raw(base: Expr, k: int) -> Expr:
    if k == 0:
        return ONE
    if k == 1:
        return base
    return Expr("powi", (base,), k)


def div(a: Expr, b: Expr) -> Expr:
    if b.is_const:
        if b.value == 0.0:
            return Expr("div", (a, b))
        return mul(const(1.0 / b.value), a) if b.value != 1.0 else a
    if a.is_const and a.value == 0.0:
        return ZERO
    if a == b:
        return ONE
    if a.kind == "neg":
        return neg(div(a.args[0], b))
    if b.kind == "neg":
        return neg(div(a, b.args[0]))
    return Expr("div", (a, b))


def powi(a: Expr, k: int) -> Expr:
    k = int(k)
    if k < 0:
        return div(ONE, powi(a, -k))
    if a.is_const:
        return const(a.value**k)
    if k == 0:
        return ONE
    if k == 1:
        return a
    if a.kind == "neg":
        inner = powi(a.args[0], k)
        return inner if k % 2 == 0 else neg(inner)
    if a.kind == "powi":
        return _powi_raw(a.args[0], a.value * k)
    return _powi_raw(a, k)


def power(a: Expr, b: Expr) -> Expr:
    """General power ``a ** b``; integer constant exponents become ``powi``."""
    if b.is_const and float(b.value).is_integer():
        return powi(a, int(b.value))
    if a.is_const and b.is_const:
        return const(a.value**b.value)
    return Expr("pow", (a, b))


def apply(fn: str, a: Expr) -> Expr:
    if fn not in FUNCTIONS:
        raise ValueError(f"unknown function {fn!r}")
    if a.is_const:
        try:
            return const(getattr(math, fn)(a.value))
        except (ValueError, OverflowError):
            pass
    return Expr(fn, (a,))


# ---------------------------------------------------------------------------
# parsing


class ParseError(ValueError):
    """Malformed expression text; ``pos`` is the 0-based character offset."""

    def __init__(self, msg: str, pos: int | None = None):
        self.pos = pos
        super().__init__(msg if pos is None else f"{msg} at position {pos}")


class UnknownVariable(ParseError):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^()]))"
)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        tok = m.group(m.lastgroup)
        if tok == "**":
            tok = "^"
        out.append((m.lastgroup, tok, start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, n: int):
        self.toks = _tokenize(text)
        self.i = 0
        self.n = n

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, op):
        kind, tok, pos = self.take()
        if tok != op:
            raise ParseError(f"expected {op!r}, found {tok or 'end of input'!r}", pos)

    def parse(self) -> Expr:
        e = self.expr()
        kind, tok, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {tok!r}", pos)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            e = add(e, rhs) if op == "+" else sub(e, rhs)
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            e = mul(e, rhs) if op == "*" else div(e, rhs)
        return e

    def unary(self) -> Expr:
        tok = self.peek()[1]
        if tok == "-":
            self.take()
            return neg(self.unary())
        if tok == "+":
            self.take()
            return self.unary()
        return self.pow_()

    def pow_(self) -> Expr:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            return power(base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, tok, pos = self.take()
        if kind == "num":
            return const(float(tok))
        if kind == "name":
            if tok in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return apply(tok, arg)
            m = re.fullmatch(r"x(\d+)", tok)
            if m is None:
                raise ParseError(f"unknown name {tok!r}", pos)
            idx = int(m.group(1))
            if not 1 <= idx <= self.n:
                raise UnknownVariable(f"variable {tok} outside x1..x{self.n}", pos)
            return var(idx)
        if tok == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ParseError(f"unexpected {tok or 'end of input'!r}", pos)


def parse_expr(text: str, n: int) -> Expr:
    """Parse infix text over ``x1..xn``.

    Precedence from tight to loose is ``^``, unary minus, ``* /``, ``+ -``;
    ``^`` associates to the right and ``x^-2`` is accepted.
    """
    return _Parser(text, n).parse()


def to_infix(e: Expr) -> str:
    k = e.kind
    if k == "const":
        return repr(e.value) if e.value >= 0 else f"({e.value!r})"
    if k == "var":
        return f"x{e.value}"
    if k == "add":
        return "(" + " + ".join(to_infix(a) for a in e.args) + ")"
    if k == "mul":
        return "(" + " * ".join(to_infix(a) for a in e.args) + ")"
    if k == "div":
        return f"({to_infix(e.args[0])} / {to_infix(e.args[1])})"
    if k == "neg":
        return f"(-{to_infix(e.args[0])})"
    if k == "powi":
        return f"({to_infix(e.args[0])})^{e.value}"
    if k == "pow":
        return f"({to_infix(e.args[0])})^({to_infix(e.args[1])})"
    return f"{k}({to_infix(e.args[0])})"


# ---------------------------------------------------------------------------
# symbolic differentiation


def diff(e: Expr, i: int, _memo: dict | None = None) -> Expr:
    """Partial derivative of ``e`` with respect to ``x_i``."""
    memo = {} if _memo is None else _memo
    key = (e, i)
    if key in memo:
        return memo[key]
    if i not in e.variables:
        out = ZERO
    else:
        out = _diff(e, i, memo)
    memo[key] = out
    return out


def _diff(e: Expr, i: int, memo) -> Expr:
    k, a = e.kind, e.args
    if k == "var":
        return ONE
    if k == "add":
        return add(*(diff(t, i, memo) for t in a))
    if k == "mul":
        terms = []
        for j, f in enumerate(a):
            df = diff(f, i, memo)
            if df.is_const and df.value == 0.0:
                continue
            terms.append(mul(*a[:j], df, *a[j + 1 :]))
        return add(*terms)
    if k == "neg":
        return neg(diff(a[0], i, memo))
    if k == "div":
        u, v = a
        du, dv = diff(u, i, memo), diff(v, i, memo)
        return sub(div(du, v), div(mul(u, dv), powi(v, 2)))
    if k == "powi":
        u, p = a[0], e.value
        return mul(const(p), powi(u, p - 1), diff(u, i, memo))
    if k == "pow":
        u, v = a
        du, dv = diff(u, i, memo), diff(v, i, memo)
        if dv.is_const and dv.value == 0.0:
            return mul(v, power(u, sub(v, ONE)), du)
        return mul(e, add(mul(dv, apply("log", u)), div(mul(v, du), u)))
    u = a[0]
    du = diff(u, i, memo)
    if k == "exp":
        return mul(e, du)
    if k == "log":
        return div(du, u)
    if k == "sin":
        return mul(apply("cos", u), du)
    if k == "cos":
        return neg(mul(apply("sin", u), du))
    if k == "sqrt":
        return div(du, mul(const(2.0), e))
    raise ValueError(f"cannot differentiate node {k!r}")


class Gradient:
    """Symbolic gradient with a compiled numeric evaluator."""

    def __init__(self, entries: Sequence[Expr]):
        self.entries = tuple(entries)
        self.n = len(self.entries)

    def __getitem__(self, i: int) -> Expr:
        return self.entries[i]

    @cached_property
    def _fn(self) -> Callable:
        return _compile_vector(self.entries)

    def __call__(self, x) -> np.ndarray:
        with np.errstate(all="ignore"):
            return self._fn(np.asarray(x, dtype=float))


class HessianExprs:
    """Symbolic Hessian.

    Only the upper triangle is differentiated; entry ``(j, i)`` is the very
    same object as ``(i, j)``.
    """

    def __init__(self, rows: Sequence[Sequence[Expr]]):
        self.rows = tuple(tuple(r) for r in rows)
        self.n = len(self.rows)

    def __getitem__(self, ij) -> Expr:
        i, j = ij
        return self.rows[i][j]

    @cached_property
    def _nonconstant(self) -> list:
        return [
            (i, j, self.rows[i][j])
            for i in range(self.n)
            for j in range(i, self.n)
            if not self.rows[i][j].is_const
        ]

    @cached_property
    def _constant_part(self) -> np.ndarray:
        c = np.zeros((self.n, self.n))
        for i in range(self.n):
            for j in range(self.n):
                e = self.rows[i][j]
                if e.is_const:
                    c[i, j] = e.value
        return c

    @cached_property
    def _fn(self) -> Callable:
        entries = [e for _, _, e in self._nonconstant]
        vec = _compile_vector(entries)
        idx = np.array([(i, j) for i, j, _ in self._nonconstant], dtype=int).reshape(-1, 2)
        base = self._constant_part

        def hess(x):
            h = base.copy()
            if len(idx):
                vals = vec(x)
                h[idx[:, 0], idx[:, 1]] = vals
                h[idx[:, 1], idx[:, 0]] = vals
            return h

        return hess

    def __call__(self, x) -> np.ndarray:
        with np.errstate(all="ignore"):
            return self._fn(np.asarray(x, dtype=float))

    def interval(self, box: IntervalVector) -> IntervalMatrix:
        lo = self._constant_part.copy()
        hi = self._constant_part.copy()
        env = list(box)
        cache: dict = {}
        for i, j, e in self._nonconstant:
            iv = eval_interval(e, env, cache)
            lo[i, j] = lo[j, i] = iv.lo
            hi[i, j] = hi[j, i] = iv.hi
        return IntervalMatrix(lo, hi)


def differentiate(e: Expr, n: int) -> tuple[Gradient, HessianExprs]:
    """Symbolic gradient and Hessian of ``e`` over ``x1..xn``."""
    memo: dict = {}
    grad = [diff(e, i + 1, memo) for i in range(n)]
    rows: list[list] = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            h = diff(grad[i], j + 1, memo)
            rows[i][j] = h
            rows[j][i] = h
    return Gradient(grad), HessianExprs(rows)


# ---------------------------------------------------------------------------
# numeric evaluation via generated numpy source

_NP_FN = {"exp": "_np.exp", "log": "_np.log", "sin": "_np.sin", "cos": "_np.cos", "sqrt": "_np.sqrt"}


def _src(e: Expr) -> str:
    k = e.kind
    if k == "const":
        return repr(e.value)
    if k == "var":
        return f"x[{e.value - 1}]"
    if k == "add":
        return "(" + " + ".join(_src(a) for a in e.args) + ")"
    if k == "mul":
        return "(" + " * ".join(_src(a) for a in e.args) + ")"
    if k == "div":
        return f"({_src(e.args[0])} / {_src(e.args[1])})"
    if k == "neg":
        return f"(-{_src(e.args[0])})"
    if k == "powi":
        return f"({_src(e.args[0])} ** {e.value})"
    if k == "pow":
        return f"({_src(e.args[0])} ** {_src(e.args[1])})"
    return f"{_NP_FN[k]}({_src(e.args[0])})"


def _compile(body: str) -> Callable:
    ns = {"_np": np}
    code = f"def _f(x):\n    x = _np.asarray(x, dtype=_np.float64)\n    return {body}\n"
    exec(compile(code, "<inthop-expr>", "exec"), ns)
    return ns["_f"]


def compile_scalar(e: Expr) -> Callable:
    f = _compile(f"_np.float64({_src(e)})")

    def fn(x):
        with np.errstate(all="ignore"):
            return float(f(x))

    return fn


def _compile_vector(entries: Sequence[Expr]) -> Callable:
    if not entries:
        return lambda x: np.zeros(0)
    items = ", ".join(_src(e) for e in entries)
    return _compile(f"_np.array([{items}], dtype=_np.float64)")


def eval_scalar(e: Expr, x) -> float:
    """IEEE evaluation of ``e`` at ``x``; non-finite results come back as-is."""
    x = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        return float(_eval_point(e, x))


def _eval_point(e: Expr, x):
    k = e.kind
    if k == "const":
        return np.float64(e.value)
    if k == "var":
        return x[e.value - 1]
    vals = [_eval_point(a, x) for a in e.args]
    if k == "add":
        return sum(vals[1:], vals[0])
    if k == "mul":
        out = vals[0]
        for v in vals[1:]:
            out = out * v
        return out
    if k == "div":
        return vals[0] / vals[1]
    if k == "neg":
        return -vals[0]
    if k == "powi":
        return vals[0] ** e.value
    if k == "pow":
        return vals[0] ** vals[1]
    return getattr(np, k)(vals[0])


def eval_gradient(g: Gradient, x) -> np.ndarray:
    return g(x)


def eval_hessian(h: HessianExprs, x) -> np.ndarray:
    return h(x)


# ---------------------------------------------------------------------------
# natural interval extension


def eval_interval(e: Expr, env: Sequence[Interval], cache: dict | None = None) -> Interval:
    """Natural interval extension of ``e`` over the box ``env`` (0-based)."""
    if cache is None:
        cache = {}
    hit = cache.get(e)
    if hit is not None:
        return hit
    k = e.kind
    if k == "const":
        out = Interval(e.value, e.value)
    elif k == "var":
        out = env[e.value - 1]
    else:
        vals = [eval_interval(a, env, cache) for a in e.args]
        if k == "add":
            out = vals[0]
            for v in vals[1:]:
                out = out + v
        elif k == "mul":
            out = vals[0]
            for v in vals[1:]:
                out = out * v
        elif k == "div":
            out = vals[0] / vals[1]
        elif k == "neg":
            out = -vals[0]
        elif k == "powi":
            out = vals[0].powi(e.value)
        elif k == "pow":
            base, ex = vals
            if base.lo <= 0.0:
                raise DomainViolation(f"non-integer power of {base}")
            out = (ex * base.log()).exp()
        else:
            out = getattr(vals[0], k)()
    cache[e] = out
    return out


def interval_hessian(h: HessianExprs, box: IntervalVector) -> IntervalMatrix:
    """Entrywise natural interval extension of ``h`` over ``box``."""
    if len(box) != h.n:
        raise ValueError(f"box has {len(box)} coordinates, Hessian needs {h.n}")
    return h.interval(box)

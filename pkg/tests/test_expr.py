import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from inthop.expr import (
    ParseError,
    UnknownVariable,
    add,
    const,
    differentiate,
    eval_gradient,
    eval_hessian,
    eval_interval,
    eval_scalar,
    interval_hessian,
    mul,
    parse_expr,
    powi,
    to_infix,
    var,
)
from inthop.interval import Interval, IntervalVector
from inthop.solver import make_box

BEALE_FACTORED = "(1.5 - x1*(1 - x2))^2 + (2.25 - x1*(1 - x2^2))^2 + (2.625 - x1*(1 - x2^3))^2"
ROSENBROCK = "100*(x2 - x1^2)^2 + (1 - x1)^2"


class TestParse:
    @pytest.mark.parametrize(
        "text, n, x, expected",
        [
            ("x1^2 + 1", 1, [2.0], 5.0),
            (ROSENBROCK, 2, [1.0, 1.0], 0.0),
            ("2^3^2", 1, [0.0], 512.0),
            ("-x1^2", 1, [3.0], -9.0),
            ("-2^2", 1, [0.0], -4.0),
            ("8 / 2 / 2", 1, [0.0], 2.0),
            ("1 - 2 - 3", 1, [0.0], -4.0),
            ("2*x1**2", 1, [3.0], 18.0),
            ("1.5e2 + 2.5E-1", 1, [0.0], 150.25),
            ("exp(0) + log(1) + sin(0) + cos(0) + sqrt(4)", 1, [0.0], 4.0),
            ("x1^0.5", 1, [9.0], 3.0),
            ("(x1 + x2) * (x1 - x2)", 2, [3.0, 2.0], 5.0),
        ],
    )
    def test_evaluates(self, text, n, x, expected):
        assert eval_scalar(parse_expr(text, n), x) == pytest.approx(expected, rel=1e-14, abs=1e-14)

    def test_unknown_variable(self):
        with pytest.raises(UnknownVariable):
            parse_expr("x3", 2)

    @pytest.mark.parametrize("text", ["x1 +", "(x1", "x1 x2", "foo(x1)", "x0", "3 $ 4", ""])
    def test_malformed(self, text):
        with pytest.raises(ParseError):
            parse_expr(text, 2)

    def test_error_carries_position(self):
        with pytest.raises(ParseError) as err:
            parse_expr("x1 + * 2", 1)
        assert err.value.pos is not None

    def test_integer_exponent_is_powi(self):
        assert parse_expr("x1^3", 1).kind == "powi"
        assert parse_expr("x1^2.5", 1).kind == "pow"

    def test_infix_round_trip(self, rng):
        e = parse_expr(BEALE_FACTORED + " + exp(-x1) / (1 + x2^2)", 2)
        back = parse_expr(to_infix(e), 2)
        for x in rng.uniform(-2, 2, (20, 2)):
            assert eval_scalar(back, x) == pytest.approx(eval_scalar(e, x), rel=1e-13)


class TestEvaluate:
    def test_beale_factored_at_ones(self):
        assert eval_scalar(parse_expr(BEALE_FACTORED, 2), [1.0, 1.0]) == 14.203125

    def test_s299_at_ones(self, corpus_by_name):
        p = corpus_by_name["100_s299"]
        assert p.n == 100
        assert p.f(np.ones(100)) == 0.0

    def test_log_zero_is_minus_inf(self):
        assert eval_scalar(parse_expr("log(x1)", 1), [0.0]) == -math.inf

    def test_nan_is_returned(self):
        assert math.isnan(eval_scalar(parse_expr("sqrt(x1)", 1), [-1.0]))

    def test_compiled_matches_tree_walk(self, corpus, rng):
        for p in corpus:
            for x in p.x0 + rng.uniform(-1, 1, (5, p.n)):
                assert p.f(x) == pytest.approx(eval_scalar(p.objective, x), rel=1e-12, abs=1e-12)


class TestSimplify:
    def test_constant_folding(self):
        e = add(const(2.0), mul(const(3.0), const(4.0)))
        assert e.is_const and e.value == 14.0

    def test_identities(self):
        x = var(1)
        assert add(x, const(0.0)) == x
        assert mul(x, const(1.0)) == x
        assert mul(x, const(0.0)).is_const

    def test_repeated_factor_becomes_power(self):
        x = var(1)
        assert mul(x, x) == powi(x, 2)


class TestDifferentiate:
    def test_square(self):
        g, h = differentiate(parse_expr("x1^2", 1), 1)
        np.testing.assert_allclose(eval_gradient(g, [3.0]), [6.0])
        np.testing.assert_allclose(eval_hessian(h, [3.0]), [[2.0]])

    def test_sin_second_derivative(self):
        _, h = differentiate(parse_expr("sin(x1)", 1), 1)
        assert eval_hessian(h, [0.0])[0, 0] == 0.0

    def test_rosenbrock_gradient_at_minimum(self):
        g, _ = differentiate(parse_expr(ROSENBROCK, 2), 2)
        np.testing.assert_array_equal(g([1.0, 1.0]), [0.0, 0.0])

    def test_sphere_hessian(self):
        _, h = differentiate(parse_expr("x1^2 + x2^2", 2), 2)
        np.testing.assert_array_equal(h([0.3, -7.0]), 2 * np.eye(2))

    def test_beale_factored_hessian_at_origin(self):
        _, h = differentiate(parse_expr(BEALE_FACTORED, 2), 2)
        np.testing.assert_allclose(h([0.0, 0.0]), [[6.0, 3.0], [3.0, 0.0]], atol=1e-14)

    def test_beale_factored_h11_matches_printed_form(self, rng):
        # d2f/dx1^2 = 2(1-x2)^2 + 2(1-x2^2)^2 + 2(1-x2^3)^2, independent of x1
        _, h = differentiate(parse_expr(BEALE_FACTORED, 2), 2)
        for x1, x2 in rng.uniform(-2, 2, (50, 2)):
            ref = 2 * (1 - x2) ** 2 + 2 * (1 - x2**2) ** 2 + 2 * (1 - x2**3) ** 2
            assert h([x1, x2])[0, 0] == pytest.approx(ref, rel=1e-12, abs=1e-12)

    def test_hessian_mirror_is_same_object(self, corpus):
        for p in corpus[:6]:
            h = p.hessian
            for i in range(p.n):
                for j in range(p.n):
                    assert h[i, j] is h[j, i]


def _fd_gradient(f, x, h=1e-6):
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def _fd_hessian(grad, x, h=1e-5):
    n = x.size
    H = np.empty((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        H[:, i] = (grad(x + e) - grad(x - e)) / (2 * h)
    return 0.5 * (H + H.T)


class TestFiniteDifferenceOracle:
    def test_gradients(self, corpus, rng):
        for p in corpus:
            for x in p.x0 + rng.uniform(-1, 1, (100, p.n)):
                g = p.gradient(x)
                fd = _fd_gradient(p.f, x)
                assert np.linalg.norm(g - fd) <= 1e-4 * max(1.0, np.linalg.norm(g)), p.name

    def test_hessians(self, corpus, rng):
        for p in corpus:
            for x in p.x0 + rng.uniform(-1, 1, (20, p.n)):
                H = p.hessian(x)
                fd = _fd_hessian(p.gradient, x)
                assert np.linalg.norm(H - fd) <= 1e-3 * max(1.0, np.linalg.norm(H)), p.name


class TestIntervalHessian:
    def test_beale_factored_box(self):
        _, h = differentiate(parse_expr(BEALE_FACTORED, 2), 2)
        ih = interval_hessian(h, IntervalVector([0.0, 0.0], [2.0, 2.0]))
        exact = {(0, 0): (0, 118), (0, 1): (-5, 860), (1, 1): (0, 2152)}
        for (i, j), (lo, hi) in exact.items():
            assert ih.lo[i, j] <= lo and ih.hi[i, j] >= hi
        assert abs(ih.lo[0, 0]) <= 1e-9 * 118
        assert ih.hi[0, 0] == pytest.approx(118, rel=1e-9)
        assert ih.is_symmetric()

    def test_constant_hessian_is_degenerate(self):
        _, h = differentiate(parse_expr("3*x1^2 + x1*x2 + 2*x2^2", 2), 2)
        ih = interval_hessian(h, IntervalVector([-5.0, 1.0], [3.0, 9.0]))
        np.testing.assert_array_equal(ih.lo, [[6, 1], [1, 4]])
        np.testing.assert_array_equal(ih.hi, [[6, 1], [1, 4]])

    def test_wrong_box_length(self):
        _, h = differentiate(parse_expr("x1^2", 1), 1)
        with pytest.raises(ValueError):
            interval_hessian(h, IntervalVector([0.0, 0.0], [1.0, 1.0]))

    def test_enclosure_on_corpus(self, corpus, rng):
        for p in corpus:
            for _ in range(50):
                c = p.x0 + rng.uniform(-2, 2, p.n)
                box = make_box(c, float(rng.uniform(1e-3, 1.0)))
                ih = p.hessian.interval(box)
                xs = box.lo + rng.random((200, p.n)) * (box.hi - box.lo)
                for x in xs:
                    assert ih.contains(p.hessian(x)), p.name


@st.composite
def polynomials(draw):
    # random sums of products of low powers of x1, x2
    terms = []
    for _ in range(draw(st.integers(1, 4))):
        c = draw(st.floats(-5, 5, allow_nan=False))
        k1 = draw(st.integers(0, 4))
        k2 = draw(st.integers(0, 4))
        terms.append(f"({c!r})*x1^{k1}*x2^{k2}")
    fn = draw(st.sampled_from(["", "sin", "exp", "cos"]))
    body = " + ".join(terms)
    return f"{fn}({body})" if fn else body


class TestEnclosureProperty:
    @settings(max_examples=60, deadline=None)
    @given(polynomials(), st.floats(-1, 1), st.floats(-1, 1), st.floats(0.01, 1))
    def test_value_and_hessian_enclosed(self, text, c1, c2, width):
        e = parse_expr(text, 2)
        _, h = differentiate(e, 2)
        box = make_box([c1, c2], width)
        fi = eval_interval(e, list(box))
        ih = h.interval(box)
        for x in np.random.default_rng(0).uniform(box.lo, box.hi, (50, 2)):
            assert fi.contains(eval_scalar(e, x))
            assert ih.contains(h(x))

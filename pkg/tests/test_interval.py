import math
import sys

import numpy as np
import pytest
from hypothesis import example, given, settings, strategies as st

from inthop.interval import (
    DivisionByIntervalContainingZero,
    DomainViolation,
    Interval,
    IntervalMatrix,
    IntervalVector,
    interval_binary,
    interval_hull_width,
    interval_unary,
)

ULP = 2.0**-52


def ival(lo, hi):
    return Interval(lo, hi)


def close_to(got, lo, hi, rel=1e-12):
    slack = rel * max(1.0, abs(lo), abs(hi))
    return got.lo <= lo and got.hi >= hi and lo - got.lo <= slack and got.hi - hi <= slack


class TestConstruction:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            Interval(2.0, 1.0)

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            Interval(math.nan, 1.0)

    def test_point(self):
        a = Interval.point(3.0)
        assert a.lo == a.hi == 3.0
        assert a.width == 0.0


class TestBinary:
    def test_mul_nonnegative(self):
        assert close_to(interval_binary("mul", ival(0, 2), ival(0, 2)), 0, 4)

    def test_mul_mixed_signs(self):
        assert close_to(interval_binary("mul", ival(-1, 2), ival(-3, 1)), -6, 3)

    def test_div_by_zero_containing(self):
        with pytest.raises(DivisionByIntervalContainingZero):
            interval_binary("div", ival(1, 2), ival(-1, 1))

    def test_div_by_zero_endpoint(self):
        with pytest.raises(DivisionByIntervalContainingZero):
            interval_binary("div", ival(1, 2), ival(0, 1))

    def test_div(self):
        assert close_to(interval_binary("div", ival(1, 2), ival(2, 4)), 0.25, 1.0)

    def test_sub(self):
        assert close_to(interval_binary("sub", ival(0, 1), ival(2, 5)), -5, -1)

    def test_unknown_op(self):
        with pytest.raises(ValueError):
            interval_binary("pow", ival(0, 1), ival(0, 1))

    def test_scalar_coercion(self):
        assert close_to(ival(1, 2) * 3, 3, 6)
        assert close_to(1 - ival(0, 1), 0, 1)


class TestUnary:
    def test_even_power_straddling_zero(self):
        r = interval_unary("powi", ival(-1, 1), 2)
        assert r.lo == 0.0
        assert close_to(r, 0, 1)

    def test_even_power_tighter_than_self_product(self):
        a = ival(-1, 2)
        assert a.powi(2).lo == 0.0
        assert (a * a).lo < 0

    def test_even_power_negative_side(self):
        assert close_to(ival(-3, -2).powi(2), 4, 9)

    def test_odd_power(self):
        assert close_to(ival(-2, 1).powi(3), -8, 1)

    def test_power_zero(self):
        assert ival(-5, 5).powi(0) == Interval(1.0, 1.0)

    def test_exp(self):
        assert close_to(interval_unary("exp", ival(0, 1)), 1.0, math.e)

    def test_sin_interior_max(self):
        # oracle: dense sampling of sin over [0, 3.2]
        xs = np.linspace(0.0, 3.2, 200001)
        r = interval_unary("sin", ival(0, 3.2))
        assert r.hi == 1.0
        assert r.lo <= np.sin(xs).min()
        assert r.lo == pytest.approx(-0.0583741434275801, abs=1e-12)

    def test_cos_interior_min(self):
        r = ival(3.0, 3.5).cos()
        assert r.lo == -1.0
        assert r.hi == pytest.approx(max(math.cos(3.0), math.cos(3.5)), rel=1e-12)

    def test_wide_periodic(self):
        assert ival(-10, 10).sin() == Interval(-1.0, 1.0)

    def test_log_domain(self):
        with pytest.raises(DomainViolation):
            interval_unary("log", ival(0, 1))

    def test_sqrt_domain(self):
        with pytest.raises(DomainViolation):
            interval_unary("sqrt", ival(-1e-3, 1))

    def test_sqrt_at_zero(self):
        assert close_to(ival(0, 4).sqrt(), 0, 2)

    def test_neg(self):
        assert interval_unary("neg", ival(1, 2)) == Interval(-2.0, -1.0)

    def test_powi_needs_exponent(self):
        with pytest.raises(ValueError):
            interval_unary("powi", ival(0, 1))


class TestHullWidth:
    @pytest.mark.parametrize(
        "entries, expected",
        [
            ([(0, 1), (0, 0.5)], 1.0),
            ([(2, 2)], 0.0),
            ([(-1, 1), (0, 3)], 3.0),
        ],
    )
    def test_examples(self, entries, expected):
        v = IntervalVector.from_intervals(Interval(*e) for e in entries)
        assert interval_hull_width(v) == expected


class TestMatrix:
    def test_from_pairs(self):
        m = IntervalMatrix.from_entries([[(0, 1), (-1, 1)], [(-1, 1), (2, 3)]])
        assert m.is_symmetric()
        assert m[0, 1] == Interval(-1.0, 1.0)
        np.testing.assert_array_equal(m.mid, [[0.5, 0], [0, 2.5]])
        np.testing.assert_array_equal(m.rad, [[0.5, 1], [1, 0.5]])

    def test_contains(self):
        m = IntervalMatrix.from_entries([[(0, 1), (-1, 1)], [(-1, 1), (2, 3)]])
        assert m.contains(np.array([[0.5, 0.0], [0.0, 2.0]]))
        assert not m.contains(np.array([[1.5, 0.0], [0.0, 2.0]]))


# --- enclosure properties ---------------------------------------------------

BINARY = {
    "add": np.add,
    "sub": np.subtract,
    "mul": np.multiply,
    "div": np.divide,
}
UNARY = {
    "exp": np.exp,
    "sin": np.sin,
    "cos": np.cos,
    "neg": np.negative,
}


def _random_interval(rng, scale=10.0, positive=False):
    a, b = np.sort(rng.uniform(-scale, scale, 2))
    if positive:
        a, b = abs(a) + 1e-3, abs(a) + 1e-3 + (b - a)
    return Interval(a, b)


class TestEnclosure:
    @pytest.mark.parametrize("op", sorted(BINARY))
    def test_binary_sampled(self, op, rng):
        fn = BINARY[op]
        for _ in range(1000):
            a = _random_interval(rng)
            b = _random_interval(rng, positive=(op == "div"))
            r = interval_binary(op, a, b)
            xs = rng.uniform(a.lo, a.hi, 100)
            ys = rng.uniform(b.lo, b.hi, 100)
            vals = fn(xs, ys)
            assert np.all((r.lo <= vals) & (vals <= r.hi)), (op, a, b)

    @pytest.mark.parametrize("op", sorted(UNARY))
    def test_unary_sampled(self, op, rng):
        fn = UNARY[op]
        for _ in range(1000):
            a = _random_interval(rng, scale=5.0)
            r = interval_unary(op, a)
            vals = fn(np.linspace(a.lo, a.hi, 100))
            assert np.all((r.lo <= vals) & (vals <= r.hi)), (op, a)

    @pytest.mark.parametrize("op", ["log", "sqrt"])
    def test_positive_domain_sampled(self, op, rng):
        fn = getattr(np, op)
        for _ in range(1000):
            a = _random_interval(rng, positive=True)
            r = interval_unary(op, a)
            vals = fn(np.linspace(a.lo, a.hi, 100))
            assert np.all((r.lo <= vals) & (vals <= r.hi))

    @pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
    def test_powers_sampled(self, k, rng):
        for _ in range(1000):
            a = _random_interval(rng, scale=3.0)
            r = a.powi(k)
            vals = np.linspace(a.lo, a.hi, 100) ** k
            assert np.all((r.lo <= vals) & (vals <= r.hi))


finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


class TestProperties:
    @given(finite, finite)
    @example(1.0, 5e-324)
    def test_degenerate_reproduces_point_arithmetic(self, x, y):
        for op, fn in BINARY.items():
            if op == "div" and y == 0:
                continue
            r = interval_binary(op, Interval.point(x), Interval.point(y))
            with np.errstate(over="ignore"):
                exact = fn(x, y)
            assert r.lo <= exact <= r.hi
            if not np.isfinite(exact):
                # overflow: the true value is finite and above the largest float
                assert abs(r.lo if exact > 0 else r.hi) == sys.float_info.max
                continue
            assert r.width <= 4 * ULP * abs(exact) + 4 * 5e-324

    @settings(max_examples=200)
    @given(
        st.lists(finite, min_size=4, max_size=4),
        st.lists(st.floats(0, 100), min_size=4, max_size=4),
        st.sampled_from(["add", "sub", "mul"]),
    )
    def test_monotone_widening(self, ends, grow, op):
        a = Interval(*sorted(ends[:2]))
        b = Interval(*sorted(ends[2:]))
        a2 = Interval(a.lo - grow[0], a.hi + grow[1])
        b2 = Interval(b.lo - grow[2], b.hi + grow[3])
        assert interval_binary(op, a2, b2).contains(interval_binary(op, a, b))

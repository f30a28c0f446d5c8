"""Exact extended-rational arithmetic: absorption, order, exactness."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wsq.numerics import BOT, ExtRational, arith, compare, rational, sum_all

defined = st.fractions(min_value=-(10**6), max_value=10**6, max_denominator=10**4).map(
    ExtRational
)
extended = st.one_of(st.just(BOT), defined)
ops = st.sampled_from("+-*/")


class TestArith:
    def test_division_by_zero_is_undefined(self):
        assert arith("/", rational(1), rational(0)) is BOT

    def test_bot_absorbs_addition(self):
        assert arith("+", BOT, rational(5)) is BOT

    def test_exact_cancellation(self):
        assert arith("*", rational(2, 3), rational(3, 4)) == rational(1, 2)

    def test_zero_over_zero(self):
        assert arith("/", rational(0), rational(0)) is BOT

    def test_unknown_operator_rejected(self):
        with pytest.raises(ValueError):
            arith("%", rational(1), rational(1))

    @given(op=ops, x=extended)
    def test_bot_is_absorbing_both_sides(self, op, x):
        assert arith(op, BOT, x) is BOT
        assert arith(op, x, BOT) is BOT

    @given(a=defined, b=defined, op=st.sampled_from("+*"))
    def test_commutative(self, a, b, op):
        assert arith(op, a, b) == arith(op, b, a)

    @given(a=defined, b=defined, c=defined, op=st.sampled_from("+*"))
    def test_associative(self, a, b, c, op):
        assert arith(op, arith(op, a, b), c) == arith(op, a, arith(op, b, c))

    @given(a=defined)
    def test_self_subtraction(self, a):
        assert arith("-", a, a) == rational(0)

    @given(a=defined, b=defined)
    def test_division_inverts_multiplication(self, b, a):
        if b != rational(0):
            assert arith("*", arith("/", a, b), b) == a


class TestCompare:
    def test_bot_below_negative(self):
        assert compare(BOT, rational(-1000)) == -1

    def test_bot_equals_bot(self):
        assert compare(BOT, BOT) == 0

    def test_canonical_equality(self):
        assert compare(rational(1, 3), rational(2, 6)) == 0

    @given(a=extended, b=extended)
    def test_antisymmetric_total(self, a, b):
        assert compare(a, b) == -compare(b, a)

    @given(a=extended, b=extended, c=extended)
    def test_transitive(self, a, b, c):
        if compare(a, b) <= 0 and compare(b, c) <= 0:
            assert compare(a, c) <= 0

    @given(a=defined, b=defined)
    def test_agrees_with_rational_order(self, a, b):
        assert (compare(a, b) < 0) == (a.frac < b.frac)

    def test_rich_comparison_operators(self):
        assert BOT < rational(0) <= rational(0) < rational(1, 10**9)
        assert BOT <= BOT and not BOT < BOT


class TestSumAll:
    def test_empty_sum_is_zero(self):
        assert sum_all([]) == rational(0)

    def test_any_bot_poisons(self):
        assert sum_all([rational(1, 2), BOT, rational(7)]) is BOT

    def test_exact_addition(self):
        assert sum_all([rational(1, 3), rational(1, 6)]) == rational(1, 2)

    @given(items=st.lists(extended, max_size=12))
    def test_permutation_invariant(self, items):
        shuffled = list(reversed(items))
        assert sum_all(items) == sum_all(shuffled)


class TestText:
    @pytest.mark.parametrize(
        "text,value",
        [
            ("3/4", rational(3, 4)),
            ("0.25", rational(1, 4)),
            ("-7", rational(-7)),
            ("+7", rational(7)),
            ("bot", BOT),
            ("-0.5", rational(-1, 2)),
        ],
    )
    def test_parse(self, text, value):
        assert ExtRational.parse(text) == value

    @pytest.mark.parametrize("bad", ["1/0", "x", "1.2.3", "", "1/-2", "--3"])
    def test_parse_rejects(self, bad):
        with pytest.raises(ValueError):
            ExtRational.parse(bad)

    @given(x=extended)
    def test_round_trip(self, x):
        assert ExtRational.parse(str(x)) == x

    def test_canonical_rendering(self):
        assert str(rational(4, 2)) == "2"
        assert str(rational(-3, 6)) == "-1/2"
        assert str(BOT) == "bot"

    def test_huge_values_round_trip(self):
        # iterated squaring produces values of bit length 2**d
        x = rational(2)
        for _ in range(10):
            x = x * x
        assert x.frac == Fraction(2) ** 1024
        assert ExtRational.parse(str(x)) == x

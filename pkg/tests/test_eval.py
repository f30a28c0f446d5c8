"""Semantics engine: quantifiers, summation, fixed points, defaults, guards."""

import random
from fractions import Fraction
from itertools import product

import pytest

from randgen import build_fnn, path_net, random_expression, random_structure
from ref_eval import normalize, ref_evaluate
from wsq.errors import ResourceError, UsageError
from wsq.evaluator import EvalLimits, evaluate, ifp_iterate
from wsq.fnn import forward, with_input
from wsq.numerics import BOT, rational
from wsq.queries import make_basic, make_eval, make_eval_node, make_squaring
from wsq.structures import WeightedStructure
from wsq.syntax import desugar, parse


@pytest.fixture
def two_triangle_graph():
    """Four vertices, a directed 3-cycle of weight 6 and one of weight 9."""
    return WeightedStructure.build(
        ["a", "b", "c", "d"],
        weights={
            "wt": (
                2,
                {
                    ("a", "b"): 1,
                    ("b", "c"): 2,
                    ("c", "a"): 3,
                    ("b", "d"): 3,
                    ("d", "a"): 5,
                },
            )
        },
    )


def two_node_net():
    return build_fnn(["u", "v"], {("u", "v"): Fraction(3)}, {"v": Fraction(1)})


def clamp_net():
    return build_fnn(
        ["u", "h1", "h2", "o"],
        {
            ("u", "h1"): Fraction(1),
            ("u", "h2"): Fraction(1),
            ("h1", "o"): Fraction(1),
            ("h2", "o"): Fraction(-1),
        },
        {"h1": Fraction(0), "h2": Fraction(-1), "o": Fraction(0)},
    )


class TestFormulaSemantics:
    def test_min_weight_triangle_matches_brute_force(self, two_triangle_graph):
        s = two_triangle_graph
        query = make_basic("min_wt_triangle")

        def wt(a, b):
            return s.weights["wt"].get((a, b))

        def is_triangle(a, b, c):
            return all(w is not None for w in (wt(a, b), wt(b, c), wt(c, a)))

        triangles = {
            (a, b, c): wt(a, b).frac + wt(b, c).frac + wt(c, a).frac
            for a, b, c in product(s.universe, repeat=3)
            if is_triangle(a, b, c)
        }
        least = min(triangles.values())
        hits = set()
        for a, b, c in product(s.universe, repeat=3):
            if evaluate(query, s, {"x": a, "y": b, "z": c}):
                hits.add((a, b, c))
        assert hits == {t for t, w in triangles.items() if w == least}
        assert hits == {("a", "b", "c"), ("b", "c", "a"), ("c", "a", "b")}

    def test_quantifiers(self, two_triangle_graph):
        s = two_triangle_graph
        assert evaluate(parse("forall x exists y wt(x, y) != bot"), s) is True
        assert evaluate(parse("forall x wt(x, x) != bot"), s) is False
        assert evaluate(parse("exists x wt(x, x) != bot"), s) is False

    def test_comparison_total_on_bot(self, two_triangle_graph):
        s = two_triangle_graph
        assert evaluate(parse("wt(x, x) <= wt(x, x)"), s, {"x": "a"}) is True
        assert evaluate(parse("wt(x, x) = bot"), s, {"x": "a"}) is True
        assert evaluate(parse("bot <= 0 - 1000000"), s) is True


class TestTermSemantics:
    def test_weights_count_on_small_net(self):
        net = build_fnn(
            ["u", "h", "o"],
            {("u", "h"): Fraction(2), ("h", "o"): Fraction(5)},
            {"h": Fraction(1), "o": Fraction(0)},
        )
        assert evaluate(make_basic("weights_count"), net.structure) == rational(4)

    def test_missing_symbol_defaults(self, two_triangle_graph):
        s = two_triangle_graph
        assert evaluate(parse("price(x, y)"), s, {"x": "a", "y": "b"}) is BOT
        assert evaluate(parse("exists x price(x, x) <= 0"), s) is False

    def test_division_by_zero_value(self, two_triangle_graph):
        assert evaluate(parse("1/0"), two_triangle_graph) is BOT

    def test_sum_with_bot_summand(self, two_triangle_graph):
        # wt is partial, so summing it over all pairs hits undefined entries
        term = parse("sum {x, y : x = x} wt(x, y)")
        assert evaluate(term, two_triangle_graph) is BOT

    def test_empty_sum(self, two_triangle_graph):
        assert evaluate(parse("sum {x : not x = x} 1"), two_triangle_graph) == rational(0)


class TestEvalTemplates:
    def test_eval_matches_forward_on_clamp(self):
        net = clamp_net()
        s = with_input(net, [Fraction(1, 2)])
        value = evaluate(make_eval(2), s, {"x": "o"})
        assert value == rational(1, 2)
        assert [value] == forward(net, [Fraction(1, 2)])

    def test_eval_bot_beyond_depth(self):
        net = clamp_net()
        s = with_input(net, [Fraction(1, 2)])
        assert evaluate(make_eval(1), s, {"x": "o"}) is BOT
        assert evaluate(make_eval(0), s, {"x": "h1"}) is BOT

    def test_eval_base_case_is_input_lookup(self):
        net = two_node_net()
        s = with_input(net, [5])
        assert evaluate(make_eval(0), s, {"x": "u"}) == rational(5)

    def test_closed_eval_out_of_range_index(self):
        net = two_node_net()
        s = with_input(net, [2])
        assert evaluate(make_eval(1, 1), s) == rational(7)
        assert evaluate(make_eval(1, 2), s) is BOT


class TestIfp:
    def test_eval_node_table_and_rounds(self):
        net = two_node_net()
        s = with_input(net, [2])
        body = make_eval_node(closed=False).body
        table = ifp_iterate("F", ("x",), body, s)
        assert table.entries == {("u",): rational(2), ("v",): rational(7)}
        assert table.rounds == 2

    def test_never_defined_body_stabilizes_immediately(self, two_triangle_graph):
        table = ifp_iterate("F", ("x",), parse("1/0"), two_triangle_graph)
        assert table.entries == {}
        assert table.rounds == 0

    def test_squaring_path(self):
        net = path_net(3)
        assert evaluate(make_squaring(), net.structure, {"x": "n3"}) == rational(2**8)

    def test_squaring_single_node(self):
        net = path_net(0)
        assert evaluate(make_squaring(), net.structure, {"x": "n0"}) == rational(2)

    def test_rounds_bounded_by_table_size(self):
        # a path forces one new entry per round: the bound is tight
        net = path_net(5)
        s = with_input(net, [1])
        body = make_eval_node(closed=False).body
        table = ifp_iterate("F", ("x",), body, s)
        assert table.rounds == 6 == len(net.structure.universe)

    def test_shadowing_inner_binder_wins(self, two_triangle_graph):
        # outer F maps everything to 1; inner F recomputes from 10
        inner = "ifp (F(y) <- 10) (x)"
        outer = f"ifp (F(x) <- 1 + 0 * {inner}) (x)"
        plain = evaluate(parse(outer), two_triangle_graph, {"x": "a"})
        assert plain == rational(1)
        # the inner table is consulted, not the outer one being built
        nested = parse("ifp (F(x) <- ifp (F(y) <- 7) (x)) (x)")
        assert evaluate(nested, two_triangle_graph, {"x": "a"}) == rational(7)

    def test_extensional_symbol_shadowed_by_binder(self):
        s = WeightedStructure.build(["a"], weights={"F": (1, {("a",): 100})})
        assert evaluate(parse("F(x)"), s, {"x": "a"}) == rational(100)
        assert evaluate(parse("ifp (F(x) <- 3) (x)"), s, {"x": "a"}) == rational(3)

    def test_zero_arity_fixed_point(self, two_triangle_graph):
        assert evaluate(parse("ifp (F() <- 5) ()"), two_triangle_graph) == rational(5)

    def test_binary_fixed_point_shortest_path(self):
        s = WeightedStructure.build(
            ["a", "b", "c"], weights={"w": (2, {("a", "b"): 2, ("b", "c"): 5})}
        )
        q = parse(
            "ifp (F(x, y) <- if w(x, y) != bot then w(x, y) "
            "else min {z : F(x, z) != bot and F(z, y) != bot} (F(x, z) + F(z, y))) (x, y)"
        )
        assert evaluate(q, s, {"x": "a", "y": "c"}) == rational(7)
        assert evaluate(q, s, {"x": "c", "y": "a"}) is BOT
        assert normalize(evaluate(q, s, {"x": "a", "y": "c"})) == normalize(
            ref_evaluate(q, s, {"x": "a", "y": "c"})
        )

    def test_repeated_applied_variables(self):
        s = WeightedStructure.build(["a", "b"], weights={"w": (2, {("a", "b"): 2})})
        q = parse("ifp (F(x, y) <- w(x, y)) (x, x)")
        assert evaluate(q, s, {"x": "a"}) is BOT

    def test_nested_binders_shadowing_one_variable(self):
        s = WeightedStructure.build(["a", "b"], weights={"f": (1, {("a",): 1, ("b",): 10})})
        q = parse("sum {x : x = x} (f(x) + sum {x : x = x} f(x))")
        # inner sum is 11 under either outer binding: (1+11) + (10+11)
        assert evaluate(q, s) == rational(33)
        assert normalize(ref_evaluate(q, s)) == ("term", rational(33).frac)


class TestUsageErrors:
    def test_unbound_variable(self, two_triangle_graph):
        with pytest.raises(UsageError, match="unbound"):
            evaluate(parse("wt(x, y)"), two_triangle_graph, {"x": "a"})

    def test_assignment_outside_universe(self, two_triangle_graph):
        with pytest.raises(UsageError, match="universe"):
            evaluate(parse("wt(x, y)"), two_triangle_graph, {"x": "a", "y": "zz"})

    def test_inconsistent_arities(self, two_triangle_graph):
        with pytest.raises(UsageError, match="arities"):
            evaluate(parse("wt(x, x) + sum {y : y = y} wt(y, y, y)"), two_triangle_graph, {"x": "a"})


class TestResourceGuards:
    def test_summand_budget(self, two_triangle_graph):
        limits = EvalLimits(max_summands=3)
        with pytest.raises(ResourceError, match="summands"):
            evaluate(parse("sum {x, y : x = x} 1"), two_triangle_graph, limits=limits)

    def test_fixpoint_cell_budget(self, two_triangle_graph):
        limits = EvalLimits(max_fixpoint_cells=2)
        with pytest.raises(ResourceError, match="cells"):
            evaluate(parse("ifp (F(x, y) <- 1) (x, x)"), two_triangle_graph, {"x": "a"}, limits)


class TestInvariants:
    def test_sum_order_invariance(self):
        rng = random.Random(21)
        for _ in range(60):
            s = random_structure(rng)
            e = random_expression(rng, rng.randint(1, 4), "term", ("x", "y"))
            env = {"x": rng.choice(s.universe), "y": rng.choice(s.universe)}
            assert evaluate(e, s, env) == evaluate(e, s.reversed_universe(), env)

    def test_agrees_with_reference_evaluator(self):
        rng = random.Random(22)
        for _ in range(150):
            s = random_structure(rng)
            kind = "formula" if rng.random() < 0.5 else "term"
            e = random_expression(rng, rng.randint(0, 4), kind, ("x", "y"))
            env = {"x": rng.choice(s.universe), "y": rng.choice(s.universe)}
            assert normalize(evaluate(e, s, env)) == normalize(ref_evaluate(e, s, env))

    def test_desugar_soundness_random(self):
        rng = random.Random(23)
        for _ in range(120):
            s = random_structure(rng)
            kind = "formula" if rng.random() < 0.5 else "term"
            e = random_expression(rng, rng.randint(0, 4), kind, ("x", "y"))
            env = {"x": rng.choice(s.universe), "y": rng.choice(s.universe)}
            assert evaluate(desugar(e), s, env) == evaluate(e, s, env)

    def test_padding_vs_locality(self):
        from wsq.fnn import pad

        net = clamp_net()
        padded = pad(net, ("u", "h1"), 3)
        r = [Fraction(1, 2)]
        assert forward(padded, r) == forward(net, r)
        closed = make_eval(net.depth, 1)
        assert evaluate(closed, with_input(net, r)) == forward(net, r)[0]
        assert evaluate(closed, with_input(padded, r)) is BOT
        assert evaluate(make_eval_node(), with_input(padded, r)) == forward(net, r)[0]

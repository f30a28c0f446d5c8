"""Expansion of sugar forms into the core grammar.

The sugar comparisons reduce to ``<=`` and negation under the total
order; rational literals expand to ``{0, 1, +, -, *, /}`` combinations;
``count``/``avg`` reduce to summation, and ``min``/``max`` reduce to an
average over the tuples achieving the extremum, guarded by a universally
quantified comparison with a renamed copy of the scope.

Conditionals are core, but ``expand_cond=True`` additionally rewrites
them into the count-ratio form ``n*t + (1-n)*e`` where ``n`` is 1 or 0
depending on the test.  That form agrees with the conditional whenever
the branch not taken is defined; an undefined untaken branch poisons the
product, so the flag is off by default.
"""

from __future__ import annotations

from fractions import Fraction

from .nodes import (
    Aggregate,
    And,
    Arith,
    BotConst,
    Compare,
    Cond,
    ElemEq,
    Exists,
    Forall,
    Ifp,
    Implies,
    Leq,
    Literal,
    Node,
    Not,
    One,
    Or,
    Sum,
    Zero,
    all_var_names,
    fresh_var,
    substitute,
)

__all__ = ["desugar", "literal_term"]


def _nat_term(n: int) -> Node:
    """1 + 1 + ... + 1 (n times), left associated; n must be positive."""
    term: Node = One()
    for _ in range(n - 1):
        term = Arith("+", term, One())
    return term


def literal_term(value: Fraction) -> Node:
    """A core term with empty vocabulary denoting the given rational."""
    n, d = value.numerator, value.denominator
    if n == 0:
        num: Node = Zero()
    elif n > 0:
        num = _nat_term(n)
    else:
        num = Arith("-", Zero(), _nat_term(-n))
    if d == 1:
        return num
    return Arith("/", num, _nat_term(d))


def desugar(node: Node, *, expand_cond: bool = False) -> Node:
    """Rewrite an expression into the core grammar.

    Generic atoms are left in place (their kind is a property of the
    target structure, not of the syntax).  Fresh variables introduced for
    the min/max guards avoid every name in the input.
    """
    used = all_var_names(node)

    def go(n: Node) -> Node:
        if isinstance(n, Compare):
            left, right = go(n.left), go(n.right)
            if n.op == ">=":
                return Leq(right, left)
            if n.op == "<":
                return Not(Leq(right, left))
            if n.op == ">":
                return Not(Leq(left, right))
            eq = And(Leq(left, right), Leq(right, left))
            return eq if n.op == "=" else Not(eq)

        if isinstance(n, BotConst):
            return Arith("/", One(), Zero())
        if isinstance(n, Literal):
            return literal_term(n.value)

        if isinstance(n, Aggregate):
            guard = go(n.guard)
            if n.kind == "count":
                return Sum(n.vars, guard, One())
            body = go(n.body)
            if n.kind == "avg":
                return _avg(n.vars, guard, body)
            renames = {v: fresh_var(v, used) for v in n.vars}
            guard_copy = substitute(guard, renames)
            body_copy = substitute(body, renames)
            if n.kind == "max":
                cmp = Leq(body_copy, body)
            else:
                cmp = Leq(body, body_copy)
            selector = Implies(guard_copy, cmp)
            for v in reversed([renames[v] for v in n.vars]):
                selector = Forall(v, selector)
            return _avg(n.vars, And(guard, selector), body)

        if isinstance(n, Cond):
            test, then, other = go(n.test), go(n.then), go(n.otherwise)
            if not expand_cond:
                return Cond(test, then, other)
            v = fresh_var("c", used)
            picked = Arith(
                "/",
                Sum((v,), test, One()),
                Sum((v,), ElemEq(v, v), One()),
            )
            return Arith(
                "+",
                Arith("*", picked, then),
                Arith("*", Arith("-", One(), picked), other),
            )

        # core and leaves: rebuild with desugared children
        if isinstance(n, Leq):
            return Leq(go(n.left), go(n.right))
        if isinstance(n, Not):
            return Not(go(n.body))
        if isinstance(n, (And, Or, Implies)):
            return type(n)(go(n.left), go(n.right))
        if isinstance(n, (Exists, Forall)):
            return type(n)(n.var, go(n.body))
        if isinstance(n, Arith):
            return Arith(n.op, go(n.left), go(n.right))
        if isinstance(n, Sum):
            return Sum(n.vars, go(n.guard), go(n.body))
        if isinstance(n, Ifp):
            return Ifp(n.name, n.vars, go(n.body), n.applied)
        return n  # ElemEq, RelAtom, WeightAtom, Atom, Zero, One

    def _avg(vars_, guard, body):
        return Arith("/", Sum(vars_, guard, body), Sum(vars_, guard, One()))

    return go(node)

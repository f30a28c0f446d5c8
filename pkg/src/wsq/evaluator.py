"""Evaluation of expressions on weighted structures.

The semantics is total on well-formed inputs: formulas evaluate to a
Boolean, terms to an exact rational or ``bot``.  If the structure does
not interpret every extensional symbol an expression uses (same name,
kind, and arity), the expression defaults to false for formulas and
``bot`` for terms rather than erroring.  Genuine misuse (unbound free
variables, assignments outside the universe, a symbol used at two
arities) raises :class:`UsageError` instead.

The fixed-point operator iterates synchronously from the all-undefined
table: each round recomputes every still-undefined entry against the
previous round's table, and an entry, once defined, never changes.  That
makes the iteration inflationary and forces stabilization within
``|A|**k`` rounds; both properties are checked on every run, not only
under test.  Resource budgets (fixed-point table cells, summands per
summation node) convert runaway evaluations into :class:`ResourceError`
rather than wrong answers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from .errors import ResourceError, UsageError
from .numerics import BOT, ExtRational, rational
from .numerics import compare as num_compare
from .structures import WeightedStructure
from .syntax.analysis import covered_by, free_vars, vocabulary_of
from .syntax.nodes import (
    Aggregate,
    And,
    Arith,
    Atom,
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
    RelAtom,
    Sum,
    WeightAtom,
    Zero,
    syntactic_kind,
)

__all__ = ["Value", "EvalLimits", "FixpointTable", "evaluate", "ifp_iterate"]

Value = Union[bool, ExtRational]

_MISSING = object()
_ZERO = rational(0)
_ONE = rational(1)


@dataclass
class EvalLimits:
    """Budgets that turn oversized evaluations into resource errors."""

    max_fixpoint_cells: int = 10**6
    max_summands: int = 10**6


@dataclass
class FixpointTable:
    """Result of a fixed-point run: defined entries and the stabilization index.

    ``rounds`` is the least i with F(i) = F(i+1); undefined tuples are
    absent from ``entries``.
    """

    entries: dict[tuple, ExtRational]
    rounds: int


class _Evaluator:
    def __init__(self, structure: WeightedStructure, limits: EvalLimits):
        self.limits = limits
        self.universe = structure.universe

    def eval(self, n: Node, s: WeightedStructure, env: dict) -> Value:
        return _HANDLERS[type(n)](self, n, s, env)

    # -- formulas -----------------------------------------------------

    def _elem_eq(self, n: ElemEq, s, env):
        return env[n.left] == env[n.right]

    def _rel_atom(self, n: RelAtom, s, env):
        table = s.relations.get(n.name)
        if table is None:
            return False
        return tuple(env[a] for a in n.args) in table

    def _leq(self, n: Leq, s, env):
        return num_compare(self.eval(n.left, s, env), self.eval(n.right, s, env)) <= 0

    def _compare(self, n: Compare, s, env):
        c = num_compare(self.eval(n.left, s, env), self.eval(n.right, s, env))
        if n.op == "<":
            return c < 0
        if n.op == ">":
            return c > 0
        if n.op == ">=":
            return c >= 0
        if n.op == "=":
            return c == 0
        return c != 0

    def _not(self, n: Not, s, env):
        return not self.eval(n.body, s, env)

    def _and(self, n: And, s, env):
        return self.eval(n.left, s, env) and self.eval(n.right, s, env)

    def _or(self, n: Or, s, env):
        return self.eval(n.left, s, env) or self.eval(n.right, s, env)

    def _implies(self, n: Implies, s, env):
        return (not self.eval(n.left, s, env)) or self.eval(n.right, s, env)

    def _quantify(self, n, s, env, want):
        saved = env.get(n.var, _MISSING)
        try:
            for elem in self.universe:
                env[n.var] = elem
                if self.eval(n.body, s, env) is want:
                    return want
            return not want
        finally:
            if saved is _MISSING:
                env.pop(n.var, None)
            else:
                env[n.var] = saved

    def _exists(self, n: Exists, s, env):
        return self._quantify(n, s, env, True)

    def _forall(self, n: Forall, s, env):
        return self._quantify(n, s, env, False)

    # -- terms ----------------------------------------------------------

    def _zero(self, n, s, env):
        return _ZERO

    def _one(self, n, s, env):
        return _ONE

    def _literal(self, n: Literal, s, env):
        return ExtRational(n.value)

    def _bot(self, n, s, env):
        return BOT

    def _weight_atom(self, n: WeightAtom, s, env):
        table = s.weights.get(n.name)
        if table is None:
            return BOT
        return table.get(tuple(env[a] for a in n.args), BOT)

    def _atom(self, n: Atom, s, env):
        if n.name in s.vocabulary.relations:
            return tuple(env[a] for a in n.args) in s.relations[n.name]
        table = s.weights.get(n.name)
        if table is None:
            return BOT
        return table.get(tuple(env[a] for a in n.args), BOT)

    def _arith(self, n: Arith, s, env):
        left = self.eval(n.left, s, env)
        right = self.eval(n.right, s, env)
        if n.op == "+":
            return left + right
        if n.op == "-":
            return left - right
        if n.op == "*":
            return left * right
        return left / right

    def _cond(self, n: Cond, s, env):
        branch = n.then if self.eval(n.test, s, env) else n.otherwise
        return self.eval(branch, s, env)

    def _bindings(self, vars_: tuple, env: dict):
        return itertools.product(self.universe, repeat=len(vars_))

    def _sum(self, n: Sum, s, env):
        saved = [env.get(v, _MISSING) for v in n.vars]
        total = Fraction(0)
        count = 0
        result = None
        try:
            for combo in self._bindings(n.vars, env):
                for v, elem in zip(n.vars, combo):
                    env[v] = elem
                if self.eval(n.guard, s, env):
                    count += 1
                    if count > self.limits.max_summands:
                        raise ResourceError(
                            f"summation exceeds {self.limits.max_summands} summands"
                        )
                    value = self.eval(n.body, s, env)
                    if value.frac is None:
                        result = BOT
                        break
                    total += value.frac
        finally:
            self._restore(n.vars, saved, env)
        return result if result is not None else ExtRational(total)

    def _aggregate(self, n: Aggregate, s, env):
        saved = [env.get(v, _MISSING) for v in n.vars]
        count = 0
        total = Fraction(0)
        saw_bot = False
        best: Optional[ExtRational] = None
        kind = n.kind
        try:
            for combo in self._bindings(n.vars, env):
                for v, elem in zip(n.vars, combo):
                    env[v] = elem
                if not self.eval(n.guard, s, env):
                    continue
                count += 1
                if count > self.limits.max_summands:
                    raise ResourceError(f"aggregate exceeds {self.limits.max_summands} summands")
                if kind == "count":
                    continue
                value = self.eval(n.body, s, env)
                if kind == "avg":
                    if value.frac is None:
                        saw_bot = True
                        break
                    total += value.frac
                elif kind == "max":
                    if best is None or num_compare(value, best) > 0:
                        best = value
                else:  # min
                    if best is None or num_compare(value, best) < 0:
                        best = value
        finally:
            self._restore(n.vars, saved, env)
        if kind == "count":
            return rational(count)
        if kind == "avg":
            if count == 0 or saw_bot:
                return BOT
            return ExtRational(total / count)
        return best if best is not None else BOT

    def _ifp(self, n: Ifp, s, env):
        table = self._ifp_run(n.name, n.vars, n.body, s, env)
        key = tuple(env[a] for a in n.applied)
        return table.entries.get(key, BOT)

    def _ifp_run(self, name: str, vars_: tuple, body: Node, s, env) -> FixpointTable:
        k = len(vars_)
        cells = len(self.universe) ** k
        if cells > self.limits.max_fixpoint_cells:
            raise ResourceError(
                f"fixed-point table needs {cells} cells, budget is {self.limits.max_fixpoint_cells}"
            )
        table: dict[tuple, ExtRational] = {}
        shadowed = s._with_weight_override(name, k, table)
        keys = list(itertools.product(self.universe, repeat=k))
        saved = [env.get(v, _MISSING) for v in vars_]
        rounds = 0
        try:
            while True:
                additions: dict[tuple, ExtRational] = {}
                for key in keys:
                    if key in table:
                        continue
                    for v, elem in zip(vars_, key):
                        env[v] = elem
                    value = self.eval(body, shadowed, env)
                    if value.frac is not None:
                        additions[key] = value
                if not additions:
                    break
                # always-on discipline checks: entries are write-once and the
                # iteration stabilizes within |A|**k rounds
                for key in additions:
                    if key in table:
                        raise AssertionError("inflationary invariant violated: entry redefined")
                table.update(additions)
                rounds += 1
                if rounds > cells:
                    raise AssertionError("fixed point failed to stabilize within |A|**k rounds")
        finally:
            self._restore(vars_, saved, env)
        return FixpointTable(table, rounds)

    @staticmethod
    def _restore(vars_: tuple, saved: list, env: dict) -> None:
        for v, old in zip(vars_, saved):
            if old is _MISSING:
                env.pop(v, None)
            else:
                env[v] = old


_HANDLERS = {
    ElemEq: _Evaluator._elem_eq,
    RelAtom: _Evaluator._rel_atom,
    Leq: _Evaluator._leq,
    Compare: _Evaluator._compare,
    Not: _Evaluator._not,
    And: _Evaluator._and,
    Or: _Evaluator._or,
    Implies: _Evaluator._implies,
    Exists: _Evaluator._exists,
    Forall: _Evaluator._forall,
    Zero: _Evaluator._zero,
    One: _Evaluator._one,
    Literal: _Evaluator._literal,
    BotConst: _Evaluator._bot,
    WeightAtom: _Evaluator._weight_atom,
    Atom: _Evaluator._atom,
    Arith: _Evaluator._arith,
    Cond: _Evaluator._cond,
    Sum: _Evaluator._sum,
    Aggregate: _Evaluator._aggregate,
    Ifp: _Evaluator._ifp,
}


def _checked_env(e: Node, structure: WeightedStructure, env, *, bound: tuple = ()) -> dict:
    env = dict(env or {})
    missing = free_vars(e) - set(bound) - env.keys()
    if missing:
        raise UsageError(f"unbound variables: {sorted(missing)}")
    universe = set(structure.universe)
    for var, val in env.items():
        if val not in universe:
            raise UsageError(f"assignment {var}={val!r} is not a universe element")
    return env


def evaluate(
    e: Node,
    structure: WeightedStructure,
    env: Optional[Mapping[str, str]] = None,
    limits: Optional[EvalLimits] = None,
) -> Value:
    """Value of an expression on a structure under a variable assignment.

    Returns a Boolean for formulas and an :class:`ExtRational` for
    terms.  A generic root atom resolves against the structure's
    vocabulary; if it resolves to neither kind the term default ``bot``
    applies.
    """
    env = _checked_env(e, structure, env)
    info = vocabulary_of(e)
    if not covered_by(info, structure):
        return False if syntactic_kind(e) == "formula" else BOT
    return _Evaluator(structure, limits or EvalLimits()).eval(e, structure, env)


def ifp_iterate(
    name: str,
    vars_: Sequence[str],
    body: Node,
    structure: WeightedStructure,
    env: Optional[Mapping[str, str]] = None,
    limits: Optional[EvalLimits] = None,
) -> FixpointTable:
    """Run one fixed-point iteration to stabilization and return its table.

    ``body`` may use ``name`` as a weight symbol of arity ``len(vars_)``;
    every other symbol must be interpreted by the structure.
    """
    vars_ = tuple(vars_)
    env = _checked_env(body, structure, env, bound=vars_)
    info = vocabulary_of(Ifp(name, vars_, body, vars_))
    if not covered_by(info, structure):
        raise UsageError("fixed-point body uses symbols the structure does not interpret")
    return _Evaluator(structure, limits or EvalLimits())._ifp_run(
        name, vars_, body, structure, env
    )

"""Binding and vocabulary analysis of expressions.

``free_vars`` follows the binding structure: summation and aggregates
bind their variable tuple over guard and body, quantifiers bind their
variable, and a fixed-point term contributes the free variables of its
body minus the bound tuple plus the applied tuple.

``vocabulary_of`` collects the relation and weight symbols an expression
uses, with occurrences of a symbol bound by an enclosing fixed point
reported separately as *intensional*.  Generic atoms (kind unresolved
until evaluation) are reported in their own bucket.

``check_scalar_fragment`` enforces the scalar restriction: no
multiplication where both factors contain an intensional occurrence and
no division by a subterm containing one.  A symbol occurrence counts as
intensional iff some enclosing fixed point binds that name (innermost
binding wins for resolution, but any ifp binder makes the occurrence
intensional).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..errors import UsageError
from ..structures import Vocabulary, WeightedStructure
from .nodes import (
    Aggregate,
    Arith,
    Atom,
    Cond,
    ElemEq,
    Exists,
    Forall,
    Ifp,
    Node,
    RelAtom,
    Span,
    Sum,
    WeightAtom,
    children,
)

__all__ = [
    "free_vars",
    "ExprVocabulary",
    "vocabulary_of",
    "covered_by",
    "Violation",
    "check_scalar_fragment",
]


def free_vars(node: Node) -> frozenset:
    """The exact set of free variables of an expression."""

    def go(n: Node) -> frozenset:
        if isinstance(n, ElemEq):
            return frozenset((n.left, n.right))
        if isinstance(n, (RelAtom, WeightAtom, Atom)):
            return frozenset(n.args)
        if isinstance(n, (Exists, Forall)):
            return go(n.body) - {n.var}
        if isinstance(n, Sum):
            return (go(n.guard) | go(n.body)) - set(n.vars)
        if isinstance(n, Aggregate):
            scope = go(n.guard) | (go(n.body) if n.body is not None else frozenset())
            return scope - set(n.vars)
        if isinstance(n, Ifp):
            return (go(n.body) - set(n.vars)) | set(n.applied)
        out: frozenset = frozenset()
        for child in children(n):
            out |= go(child)
        return out

    return go(node)


@dataclass
class ExprVocabulary:
    """Symbols used by an expression, by kind, each with its arity.

    ``generic`` holds atoms whose relation-vs-weight kind is undecided;
    ``intensional`` holds fixed-point-bound weight symbols (excluded from
    the extensional buckets).
    """

    relations: dict[str, int] = field(default_factory=dict)
    weights: dict[str, int] = field(default_factory=dict)
    generic: dict[str, int] = field(default_factory=dict)
    intensional: dict[str, int] = field(default_factory=dict)


def vocabulary_of(node: Node) -> ExprVocabulary:
    """Collect the symbols of an expression; errors on inconsistent use.

    A name used with two arities, or as both a relation and a weight
    function, cannot be interpreted by any single structure and raises
    :class:`UsageError`.
    """
    out = ExprVocabulary()

    def record(bucket: str, name: str, arity: int) -> None:
        rel = out.relations.get(name)
        wt = out.weights.get(name)
        gen = out.generic.get(name)
        for known in (rel, wt, gen):
            if known is not None and known != arity:
                raise UsageError(f"symbol {name!r} used with arities {known} and {arity}")
        if bucket == "generic":
            # a generic occurrence is compatible with either known kind
            if rel is None and wt is None and gen is None:
                out.generic[name] = arity
            return
        if bucket == "relation":
            if wt is not None:
                raise UsageError(f"symbol {name!r} used as both relation and weight function")
            out.relations[name] = arity
        else:
            if rel is not None:
                raise UsageError(f"symbol {name!r} used as both relation and weight function")
            out.weights[name] = arity
        out.generic.pop(name, None)

    def go(n: Node, binders: dict[str, int]) -> None:
        if isinstance(n, RelAtom):
            if n.name in binders:
                raise UsageError(
                    f"symbol {n.name!r} is bound as a weight function here but used as a relation"
                )
            record("relation", n.name, len(n.args))
            return
        if isinstance(n, (WeightAtom, Atom)):
            if n.name in binders:
                if len(n.args) != binders[n.name]:
                    raise UsageError(
                        f"symbol {n.name!r} bound with arity {binders[n.name]} "
                        f"but used with arity {len(n.args)}"
                    )
                out.intensional[n.name] = binders[n.name]
                return
            record("weight" if isinstance(n, WeightAtom) else "generic", n.name, len(n.args))
            return
        if isinstance(n, Ifp):
            arity = len(n.vars)
            prev = out.intensional.get(n.name)
            if prev is not None and prev != arity:
                raise UsageError(
                    f"intensional symbol {n.name!r} bound with arities {prev} and {arity}"
                )
            out.intensional[n.name] = arity
            go(n.body, {**binders, n.name: arity})
            return
        for child in children(n):
            go(child, binders)

    go(node, {})
    return out


def covered_by(info: ExprVocabulary, structure: WeightedStructure) -> bool:
    """Whether a structure interprets every extensional symbol as used.

    Name, kind, and arity must all match; a generic symbol is covered by
    either kind at the right arity.  Intensional symbols are supplied by
    the fixed-point operator itself and are not required.
    """
    voc: Vocabulary = structure.vocabulary
    for name, arity in info.relations.items():
        if voc.relations.get(name) != arity:
            return False
    for name, arity in info.weights.items():
        if voc.weights.get(name) != arity:
            return False
    for name, arity in info.generic.items():
        if voc.relations.get(name) != arity and voc.weights.get(name) != arity:
            return False
    return True


@dataclass(frozen=True)
class Violation:
    """One scalar-fragment breach: which operator, where in the tree."""

    op: str  # '*' or '/'
    path: tuple[int, ...]
    span: Optional[Span]

    def describe(self) -> str:
        where = f"line {self.span[0]}, column {self.span[1]}" if self.span else f"path {list(self.path)}"
        if self.op == "*":
            return f"multiplication of two intensional subterms at {where}"
        return f"division by an intensional subterm at {where}"


def _contains_intensional(node: Node, binders: frozenset) -> bool:
    """Intensional occurrence in *term position* within ``node``.

    Occurrences inside formula contexts (summation guards, conditional
    tests, comparison operands) only select values; they never feed a
    magnitude into the enclosing product or divisor, so they do not make
    the term intensional-carrying.  This keeps fragment membership
    stable under aggregate desugaring, whose introduced divisors are
    counts.
    """
    if isinstance(n := node, (WeightAtom, Atom)):
        return n.name in binders
    if isinstance(node, Ifp):
        return _contains_intensional(node.body, binders | {node.name})
    if isinstance(node, Arith):
        return _contains_intensional(node.left, binders) or _contains_intensional(
            node.right, binders
        )
    if isinstance(node, Cond):
        return _contains_intensional(node.then, binders) or _contains_intensional(
            node.otherwise, binders
        )
    if isinstance(node, Sum):
        return _contains_intensional(node.body, binders)
    if isinstance(node, Aggregate):
        return node.body is not None and _contains_intensional(node.body, binders)
    return False


def check_scalar_fragment(node: Node) -> list[Violation]:
    """All scalar-restriction breaches; an empty list means the term qualifies."""
    violations: list[Violation] = []

    def go(n: Node, binders: frozenset, path: tuple[int, ...]) -> None:
        if isinstance(n, Arith) and n.op == "*":
            if _contains_intensional(n.left, binders) and _contains_intensional(n.right, binders):
                violations.append(Violation("*", path, n.span))
        elif isinstance(n, Arith) and n.op == "/":
            if _contains_intensional(n.right, binders):
                violations.append(Violation("/", path, n.span))
        if isinstance(n, Ifp):
            binders = binders | {n.name}
        for i, child in enumerate(children(n)):
            go(child, binders, path + (i,))

    go(node, frozenset(), ())
    return violations

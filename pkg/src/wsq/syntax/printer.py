"""Render ASTs back to concrete syntax.

Parenthesization is precedence-driven so that reparsing the output
reproduces a structurally equal tree.
"""

from __future__ import annotations

from .nodes import (
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
)

__all__ = ["to_text"]

# precedence levels mirror the parser: implies 1, or 2, and 3, prefix 4,
# comparisons 5, additive 6, multiplicative 7, unary 8, primaries 9;
# conditionals sit below additive so they are bracketed inside arithmetic

_ADD = {"+", "-"}


def _call(name: str, args: tuple[str, ...]) -> str:
    return f"{name}({', '.join(args)})"


def _braces(vars_: tuple[str, ...], guard: Node) -> str:
    return "{" + ", ".join(vars_) + " : " + _fmt(guard, 0) + "}"


def _fmt(node: Node, ctx: int) -> str:
    text, prec = _render(node)
    if prec < ctx:
        return f"({text})"
    return text


def _render(node: Node) -> tuple[str, int]:
    if isinstance(node, Implies):
        return f"{_fmt(node.left, 2)} implies {_fmt(node.right, 1)}", 1
    if isinstance(node, Or):
        return f"{_fmt(node.left, 2)} or {_fmt(node.right, 3)}", 2
    if isinstance(node, And):
        return f"{_fmt(node.left, 3)} and {_fmt(node.right, 4)}", 3
    if isinstance(node, Not):
        return f"not {_fmt(node.body, 4)}", 4
    if isinstance(node, (Exists, Forall)):
        word = "exists" if isinstance(node, Exists) else "forall"
        return f"{word} {node.var} {_fmt(node.body, 4)}", 4
    if isinstance(node, ElemEq):
        return f"{node.left} = {node.right}", 5
    if isinstance(node, Leq):
        return f"{_fmt(node.left, 6)} <= {_fmt(node.right, 6)}", 5
    if isinstance(node, Compare):
        return f"{_fmt(node.left, 6)} {node.op} {_fmt(node.right, 6)}", 5
    if isinstance(node, RelAtom):
        return _call(node.name, node.args), 9

    if isinstance(node, Zero):
        return "0", 9
    if isinstance(node, One):
        return "1", 9
    if isinstance(node, Literal):
        return str(node.value), 9
    if isinstance(node, BotConst):
        return "bot", 9
    if isinstance(node, (WeightAtom, Atom)):
        return _call(node.name, node.args), 9
    if isinstance(node, Arith):
        if node.op == "-" and node.left == Zero():
            return f"-{_fmt(node.right, 8)}", 8
        if node.op in _ADD:
            return f"{_fmt(node.left, 6)} {node.op} {_fmt(node.right, 7)}", 6
        return f"{_fmt(node.left, 7)} {node.op} {_fmt(node.right, 8)}", 7
    if isinstance(node, Cond):
        text = (
            f"if {_fmt(node.test, 0)} then {_fmt(node.then, 6)} "
            f"else {_fmt(node.otherwise, 6)}"
        )
        return text, 5
    if isinstance(node, Sum):
        return f"sum {_braces(node.vars, node.guard)} {_fmt(node.body, 8)}", 9
    if isinstance(node, Aggregate):
        head = f"{node.kind} {_braces(node.vars, node.guard)}"
        if node.body is None:
            return head, 9
        return f"{head} {_fmt(node.body, 8)}", 9
    if isinstance(node, Ifp):
        head = _call(node.name, node.vars)
        return f"ifp ({head} <- {_fmt(node.body, 0)}) ({', '.join(node.applied)})", 9
    raise TypeError(f"cannot print node of type {type(node).__name__}")


def to_text(node: Node) -> str:
    """Concrete syntax for an AST; ``parse(to_text(e)) == e``."""
    return _fmt(node, 0)

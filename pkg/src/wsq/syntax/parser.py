"""Concrete syntax for queries: lexer and recursive-descent parser.

The grammar (binding weakest to tightest)::

    expr     := expr "implies" expr            right associative
              | expr "or" expr | expr "and" expr
              | "not" expr | ("exists"|"forall") VAR expr
              | operand CMP operand            CMP: <= < >= > = !=
              | operand
    operand  := operand ("+"|"-") operand | operand ("*"|"/") operand
              | "-" operand
              | "sum" "{" vars ":" expr "}" operand
              | ("avg"|"min"|"max") "{" vars ":" expr "}" operand
              | "count" "{" vars ":" expr "}"
              | "if" expr "then" term "else" term
              | "ifp" "(" IDENT "(" vars? ")" "<-" term ")" "(" vars? ")"
              | NUMBER | "bot" | IDENT "(" vars? ")" | IDENT | "(" expr ")"

A bare identifier is an element variable; ``ident(...)`` atoms take only
variables as arguments.  Each operator forces its operands to be
formulas or terms and the parser resolves as it reduces: ``=``/``!=``
between two bare variables is element equality, between terms it is
sugar for a two-sided ``<=``.  An atom in a spot where neither kind is
forced (the query root) stays generic and is resolved against the
structure's vocabulary at evaluation time.  Summation and aggregate
bodies bind tighter than arithmetic (``sum {x : p(x)} f(x) + 1`` is a
sum plus one); ``else`` extends over a full term.  Numbers are exact
rational literals: ``7``, ``0.25``, ``3/4`` (a zero denominator such as
``1/0`` is division, which evaluates to ``bot``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..errors import ParseError
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
    Expr,
    Forall,
    Formula,
    Ifp,
    Implies,
    Leq,
    Literal,
    Not,
    One,
    Or,
    RelAtom,
    Sum,
    Term,
    WeightAtom,
    Zero,
)

__all__ = ["parse", "tokenize", "KEYWORDS"]

KEYWORDS = frozenset(
    "not and or implies exists forall sum count avg min max if then else ifp bot".split()
)

_TOKEN_RE = re.compile(
    r"""
      (?P<NUMBER>\d+(?:\.\d+|/0*[1-9]\d*)?)
    | (?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<OP><=|<-|!=|>=|[<>=+\-*/(){}:,])
    """,
    re.VERBOSE,
)

_CMP_OPS = ("<=", "<", ">=", ">", "=", "!=")


@dataclass(frozen=True)
class Token:
    type: str  # 'number', 'ident', a keyword, an operator symbol, or 'eof'
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch in " \t\r":
            pos += 1
            continue
        if ch == "\n":
            pos += 1
            line += 1
            line_start = pos
            continue
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise ParseError(f"unexpected character {ch!r}", line, col)
        raw = m.group()
        if m.lastgroup == "NUMBER":
            tokens.append(Token("number", raw, line, col))
        elif m.lastgroup == "IDENT":
            kind = raw if raw in KEYWORDS else "ident"
            tokens.append(Token(kind, raw, line, col))
        else:
            tokens.append(Token(raw, raw, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, n - line_start + 1))
    return tokens


@dataclass(frozen=True)
class _Var:
    """A bare identifier; becomes ElemEq material or a parse error."""

    name: str
    span: tuple[int, int]


def _as_formula(node) -> Formula:
    if isinstance(node, Formula):
        return node
    if isinstance(node, Atom):
        return RelAtom(node.name, node.args, span=node.span)
    if isinstance(node, _Var):
        raise ParseError(f"variable {node.name!r} used where a formula is required", *node.span)
    raise ParseError("term used where a formula is required", *_span_of(node))


def _as_term(node) -> Term:
    if isinstance(node, Term):
        return node
    if isinstance(node, Atom):
        return WeightAtom(node.name, node.args, span=node.span)
    if isinstance(node, _Var):
        raise ParseError(f"variable {node.name!r} used where a term is required", *node.span)
    raise ParseError("formula used where a term is required", *_span_of(node))


def _span_of(node) -> tuple[Optional[int], Optional[int]]:
    span = getattr(node, "span", None)
    return span if span else (None, None)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, ttype: str, what: str) -> Token:
        tok = self.peek()
        if tok.type != ttype:
            found = "end of input" if tok.type == "eof" else repr(tok.text)
            raise ParseError(f"expected {what}, found {found}", tok.line, tok.column)
        return self.advance()

    def error(self, message: str):
        tok = self.peek()
        if tok.type == "eof":
            raise ParseError(f"{message} at end of input", tok.line, tok.column)
        raise ParseError(f"{message}, found {tok.text!r}", tok.line, tok.column)

    # -- precedence layers -------------------------------------------------

    def parse_expr(self):
        left = self.parse_or()
        if self.peek().type == "implies":
            tok = self.advance()
            right = self.parse_expr()
            return Implies(_as_formula(left), _as_formula(right), span=(tok.line, tok.column))
        return left

    def parse_or(self):
        left = self.parse_and()
        while self.peek().type == "or":
            tok = self.advance()
            right = self.parse_and()
            left = Or(_as_formula(left), _as_formula(right), span=(tok.line, tok.column))
        return left

    def parse_and(self):
        left = self.parse_prefix()
        while self.peek().type == "and":
            tok = self.advance()
            right = self.parse_prefix()
            left = And(_as_formula(left), _as_formula(right), span=(tok.line, tok.column))
        return left

    def parse_prefix(self):
        tok = self.peek()
        if tok.type == "not":
            self.advance()
            return Not(_as_formula(self.parse_prefix()), span=(tok.line, tok.column))
        if tok.type in ("exists", "forall"):
            self.advance()
            var = self.expect("ident", "a variable name")
            body = _as_formula(self.parse_prefix())
            cls = Exists if tok.type == "exists" else Forall
            return cls(var.text, body, span=(tok.line, tok.column))
        return self.parse_cmp()

    def parse_cmp(self):
        left = self.parse_add()
        tok = self.peek()
        if tok.type not in _CMP_OPS:
            return left
        self.advance()
        right = self.parse_add()
        span = (tok.line, tok.column)
        if tok.type in ("=", "!="):
            lv, rv = isinstance(left, _Var), isinstance(right, _Var)
            if lv and rv:
                eq = ElemEq(left.name, right.name, span=span)
                return eq if tok.type == "=" else Not(eq, span=span)
            if lv or rv:
                raise ParseError("cannot compare an element variable with a term", *span)
        lt, rt = _as_term(left), _as_term(right)
        if tok.type == "<=":
            return Leq(lt, rt, span=span)
        return Compare(tok.type, lt, rt, span=span)

    def parse_add(self):
        left = self.parse_mul()
        while self.peek().type in ("+", "-"):
            tok = self.advance()
            right = self.parse_mul()
            left = Arith(tok.type, _as_term(left), _as_term(right), span=(tok.line, tok.column))
        return left

    def parse_mul(self):
        left = self.parse_unary()
        while self.peek().type in ("*", "/"):
            tok = self.advance()
            right = self.parse_unary()
            left = Arith(tok.type, _as_term(left), _as_term(right), span=(tok.line, tok.column))
        return left

    def parse_unary(self):
        tok = self.peek()
        if tok.type == "-":
            self.advance()
            span = (tok.line, tok.column)
            return Arith("-", Zero(span=span), _as_term(self.parse_unary()), span=span)
        return self.parse_primary()

    # -- primaries -----------------------------------------------------------

    def parse_varlist(self, *, allow_empty: bool, allow_duplicates: bool = False) -> tuple[str, ...]:
        names: list[str] = []
        if self.peek().type != "ident":
            if allow_empty:
                return ()
            self.error("expected a variable name")
        while True:
            tok = self.expect("ident", "a variable name")
            if not allow_duplicates and tok.text in names:
                raise ParseError(f"duplicate variable {tok.text!r} in binder", tok.line, tok.column)
            names.append(tok.text)
            if self.peek().type != ",":
                return tuple(names)
            self.advance()

    def parse_binder_braces(self) -> tuple[tuple[str, ...], Formula]:
        self.expect("{", "'{'")
        names = self.parse_varlist(allow_empty=False)
        self.expect(":", "':'")
        guard = _as_formula(self.parse_expr())
        self.expect("}", "'}'")
        return names, guard

    def parse_primary(self):
        tok = self.peek()
        span = (tok.line, tok.column)

        if tok.type == "number":
            self.advance()
            value = Fraction(tok.text)
            if value == 0:
                return Zero(span=span)
            if value == 1:
                return One(span=span)
            return Literal(value, span=span)

        if tok.type == "bot":
            self.advance()
            return BotConst(span=span)

        if tok.type == "ident":
            self.advance()
            if self.peek().type == "(":
                self.advance()
                args = self.parse_varlist(allow_empty=True, allow_duplicates=True)
                self.expect(")", "')'")
                return Atom(tok.text, args, span=span)
            return _Var(tok.text, span)

        if tok.type == "sum":
            self.advance()
            names, guard = self.parse_binder_braces()
            body = _as_term(self.parse_unary())
            return Sum(names, guard, body, span=span)

        if tok.type in ("count", "avg", "min", "max"):
            self.advance()
            names, guard = self.parse_binder_braces()
            body = None if tok.type == "count" else _as_term(self.parse_unary())
            return Aggregate(tok.type, names, guard, body, span=span)

        if tok.type == "if":
            self.advance()
            test = _as_formula(self.parse_expr())
            self.expect("then", "'then'")
            then = _as_term(self.parse_add())
            self.expect("else", "'else'")
            otherwise = _as_term(self.parse_add())
            return Cond(test, then, otherwise, span=span)

        if tok.type == "ifp":
            self.advance()
            self.expect("(", "'('")
            name = self.expect("ident", "a weight symbol name")
            self.expect("(", "'('")
            bound = self.parse_varlist(allow_empty=True)
            self.expect(")", "')'")
            self.expect("<-", "'<-'")
            body = _as_term(self.parse_expr())
            self.expect(")", "')'")
            self.expect("(", "'('")
            applied = self.parse_varlist(allow_empty=True, allow_duplicates=True)
            self.expect(")", "')'")
            if len(applied) != len(bound):
                raise ParseError(
                    f"fixed point binds {len(bound)} variables but is applied to {len(applied)}",
                    *span,
                )
            return Ifp(name.text, bound, body, applied, span=span)

        if tok.type == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect(")", "')'")
            return inner

        self.error("expected an expression")


def parse(text: str) -> Expr:
    """Parse query text into an AST; raises :class:`ParseError` with a position.

    The result is a formula, a term, or (only when the root is a bare
    ``ident(...)`` atom) a generic atom resolved at evaluation time.
    """
    parser = _Parser(tokenize(text))
    node = parser.parse_expr()
    tok = parser.peek()
    if tok.type != "eof":
        raise ParseError(f"unexpected {tok.text!r} after the expression", tok.line, tok.column)
    if isinstance(node, _Var):
        raise ParseError(f"a bare variable ({node.name!r}) is not a query", *node.span)
    return node

"""Query syntax: AST, parser, printer, binding analysis, and desugaring."""

from .analysis import (
    ExprVocabulary,
    Violation,
    check_scalar_fragment,
    covered_by,
    free_vars,
    vocabulary_of,
)
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
    Node,
    Not,
    One,
    Or,
    RelAtom,
    Sum,
    Term,
    WeightAtom,
    Zero,
    all_var_names,
    children,
    fresh_var,
    substitute,
    syntactic_kind,
    walk,
)
from .parser import parse, tokenize
from .printer import to_text
from .sugar import desugar, literal_term

__all__ = [
    "parse",
    "tokenize",
    "to_text",
    "desugar",
    "literal_term",
    "free_vars",
    "vocabulary_of",
    "covered_by",
    "check_scalar_fragment",
    "ExprVocabulary",
    "Violation",
    "Expr",
    "Node",
    "Formula",
    "Term",
    "ElemEq",
    "RelAtom",
    "Leq",
    "Compare",
    "Not",
    "And",
    "Or",
    "Implies",
    "Exists",
    "Forall",
    "Zero",
    "One",
    "Literal",
    "BotConst",
    "WeightAtom",
    "Atom",
    "Arith",
    "Cond",
    "Sum",
    "Aggregate",
    "Ifp",
    "children",
    "walk",
    "syntactic_kind",
    "all_var_names",
    "substitute",
    "fresh_var",
]

"""Exception hierarchy shared across the package.

Semantic undefinedness is a *value* (``wsq.numerics.BOT``), never an
exception.  Exceptions are reserved for misuse of the API, malformed input
files, and exceeded resource budgets.
"""

from __future__ import annotations


class WsqError(Exception):
    """Base class for all package-specific errors."""


class UsageError(WsqError):
    """A caller violated an operation's precondition.

    Examples: unknown symbol, arity mismatch in a direct lookup, unbound
    free variables at evaluation time, expanding a structure with a
    clashing symbol name.
    """


class ParseError(WsqError):
    """Lexical or syntactic error in query text.

    Carries a 1-based (line, column) position when known.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class LoadError(WsqError):
    """A structure or network file violates its file-format contract."""


class ResourceError(WsqError):
    """A configured resource budget was exceeded.

    Raised instead of returning a wrong or truncated answer.
    """

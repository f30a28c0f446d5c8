"""Exact arithmetic on rationals extended with an undefined element.

The value domain is Q ∪ {bot} where ``bot`` marks undefined results
(missing weights, division by zero).  All arithmetic is arbitrary
precision via :class:`fractions.Fraction`; no floating point is involved
anywhere.  ``bot`` is absorbing for +, -, *, / and division by zero
yields ``bot``.  The order is total: ``bot`` sits strictly below every
rational and compares equal to itself.

>>> rational(2, 3) * rational(3, 4)
ExtRational('1/2')
>>> rational(1) / rational(0)
ExtRational('bot')
>>> BOT < rational(-1000)
True
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

__all__ = ["ExtRational", "BOT", "ZERO", "ONE", "rational", "arith", "compare", "sum_all"]

_NUMBER_RE = re.compile(r"^[+-]?(\d+(\.\d+)?|\d+/0*[1-9]\d*)$")

RationalLike = Union[int, Fraction, "ExtRational"]


@dataclass(frozen=True, slots=True)
class ExtRational:
    """A rational number in canonical form, or the undefined element.

    The payload is a :class:`Fraction` (which keeps gcd-reduced form with
    a positive denominator) or ``None`` for ``bot``.  Instances are
    immutable and hashable; use :func:`rational`, :data:`BOT` or
    :meth:`parse` rather than the raw constructor.
    """

    _frac: Optional[Fraction]

    # -- construction -------------------------------------------------

    @classmethod
    def parse(cls, text: str) -> "ExtRational":
        """Parse ``"p/q"``, ``"d.ddd"``, an optionally signed integer, or ``"bot"``.

        Decimal input converts exactly (``"0.25"`` -> 1/4).  Raises
        ``ValueError`` on anything else, including zero denominators.
        """
        text = text.strip()
        if text == "bot":
            return BOT
        if not _NUMBER_RE.match(text):
            raise ValueError(f"not a rational literal: {text!r}")
        return cls(Fraction(text))

    # -- accessors -----------------------------------------------------

    @property
    def is_bot(self) -> bool:
        return self._frac is None

    @property
    def frac(self) -> Optional[Fraction]:
        """Underlying :class:`Fraction`, or ``None`` for ``bot``."""
        return self._frac

    # -- arithmetic ----------------------------------------------------

    @staticmethod
    def _coerce(other: RationalLike) -> "ExtRational":
        if isinstance(other, ExtRational):
            return other
        if isinstance(other, (int, Fraction)):
            return ExtRational(Fraction(other))
        return NotImplemented  # type: ignore[return-value]

    def _binop(self, other: RationalLike, op: str) -> "ExtRational":
        rhs = self._coerce(other)
        if rhs is NotImplemented:
            return NotImplemented  # type: ignore[return-value]
        a, b = self._frac, rhs._frac
        if a is None or b is None:
            return BOT
        if op == "+":
            return ExtRational(a + b)
        if op == "-":
            return ExtRational(a - b)
        if op == "*":
            return ExtRational(a * b)
        if b == 0:
            return BOT
        return ExtRational(a / b)

    def __add__(self, other: RationalLike) -> "ExtRational":
        return self._binop(other, "+")

    __radd__ = __add__

    def __sub__(self, other: RationalLike) -> "ExtRational":
        return self._binop(other, "-")

    def __rsub__(self, other: RationalLike) -> "ExtRational":
        return self._coerce(other)._binop(self, "-")

    def __mul__(self, other: RationalLike) -> "ExtRational":
        return self._binop(other, "*")

    __rmul__ = __mul__

    def __truediv__(self, other: RationalLike) -> "ExtRational":
        return self._binop(other, "/")

    def __rtruediv__(self, other: RationalLike) -> "ExtRational":
        return self._coerce(other)._binop(self, "/")

    def __neg__(self) -> "ExtRational":
        return BOT if self._frac is None else ExtRational(-self._frac)

    # -- total order (bot below everything, bot == bot) -----------------

    def _cmp(self, other: RationalLike) -> int:
        rhs = self._coerce(other)
        if rhs is NotImplemented:
            raise TypeError(f"cannot compare ExtRational with {type(other).__name__}")
        a, b = self._frac, rhs._frac
        if a is None:
            return 0 if b is None else -1
        if b is None:
            return 1
        return (a > b) - (a < b)

    def __lt__(self, other: RationalLike) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: RationalLike) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: RationalLike) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: RationalLike) -> bool:
        return self._cmp(other) >= 0

    # -- rendering -------------------------------------------------------

    def __str__(self) -> str:
        if self._frac is None:
            return "bot"
        if self._frac.denominator == 1:
            return str(self._frac.numerator)
        return f"{self._frac.numerator}/{self._frac.denominator}"

    def __repr__(self) -> str:
        return f"ExtRational('{self}')"


BOT = ExtRational(None)
ZERO = ExtRational(Fraction(0))
ONE = ExtRational(Fraction(1))


def rational(numerator: int | Fraction, denominator: int = 1) -> ExtRational:
    """Build a defined value in canonical form; q must be nonzero."""
    return ExtRational(Fraction(numerator, denominator))


def arith(op: str, a: ExtRational, b: ExtRational) -> ExtRational:
    """Apply one of ``+ - * /`` under the extended rules.

    Total: ``bot`` operands and division by zero produce ``bot``.
    """
    if op not in "+-*/" or len(op) != 1:
        raise ValueError(f"unknown operator: {op!r}")
    return a._binop(b, op)


def compare(a: ExtRational, b: ExtRational) -> int:
    """Three-way comparison: -1 (less), 0 (equal), or 1 (greater).

    ``bot`` is strictly below every rational and equal to itself, making
    the order total on the whole domain.
    """
    return a._cmp(b)


def sum_all(items: Iterable[ExtRational]) -> ExtRational:
    """Exact sum of a finite sequence; 0 when empty, ``bot`` if any item is."""
    total = Fraction(0)
    for item in items:
        if item._frac is None:
            return BOT
        total += item._frac
    return ExtRational(total)

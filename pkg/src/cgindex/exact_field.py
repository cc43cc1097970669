"""Exact arithmetic in a real quadratic field Q(sqrt(D)).

Every angle, mean index and fractional-part argument handled by the package
is an :class:`ExactScalar` ``a + b*sqrt(D)`` with rational ``a`` and ``b``.
Order, sign, floor and ceiling are decided with integer arithmetic only, so
``floor(24 * sqrt(2)/2) == 16`` is a theorem here, not a float accident.

>>> x = ExactScalar.parse("17/2√2")
>>> x.floor()
12
>>> ExactScalar.parse("1/2√2").frac_of_multiple(24)
ExactScalar('-16+12√2')
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import total_ordering
from typing import Optional, Union

__all__ = [
    "ExactScalar",
    "RadicandMismatch",
    "ScalarParseError",
    "is_squarefree",
    "floor_of",
    "ceil_of",
    "frac_of",
    "phi_of",
    "as_scalar",
]

Number = Union[int, Fraction, "ExactScalar"]

_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")


class RadicandMismatch(ValueError):
    """Two irrational scalars from different quadratic fields were combined."""


class ScalarParseError(ValueError):
    pass


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def _parse_rational(text: str, whole: str) -> Fraction:
    if not _RATIONAL_RE.match(text):
        raise ScalarParseError(f"not an exact rational: {text!r} in {whole!r}")
    num, _, den = text.partition("/")
    if den and int(den) == 0:
        raise ScalarParseError(f"zero denominator in {whole!r}")
    return Fraction(int(num), int(den) if den else 1)


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@total_ordering
class ExactScalar:
    """An element ``a + b*sqrt(radicand)`` of a real quadratic field.

    ``radicand`` is ``None`` for rationals (``b == 0``); rationals combine
    freely with any field, irrational scalars only with their own field.
    """

    __slots__ = ("a", "b", "radicand", "_ints", "_hash")

    def __init__(self, a: Union[int, Fraction] = 0, b: Union[int, Fraction] = 0,
                 radicand: Optional[int] = None) -> None:
        a = Fraction(a)
        b = Fraction(b)
        if b == 0:
            radicand = None
        else:
            if radicand is None:
                raise ValueError("irrational part given without a radicand")
            if radicand < 2 or not is_squarefree(radicand):
                raise ValueError(f"radicand must be a square-free integer >= 2, got {radicand}")
        self.a = a
        self.b = b
        self.radicand = radicand
        self._ints: Optional[tuple[int, int, int]] = None
        self._hash: Optional[int] = None

    # -- construction -------------------------------------------------
    @classmethod
    def sqrt(cls, radicand: int) -> ExactScalar:
        return cls(0, 1, radicand)

    @classmethod
    def parse(cls, text: str) -> ExactScalar:
        """Parse ``"a+b√D"`` (also ``"b√D"``, ``"-√D"``, ``"a"``; ``sqrt`` may replace ``√``).

        Decimal points and exponents are rejected: the format is exact only.
        """
        whole = text
        s = "".join(text.split()).replace("sqrt", "√")
        if not s:
            raise ScalarParseError("empty scalar")
        if "√" not in s:
            return cls(_parse_rational(s, whole))
        if s.count("√") != 1:
            raise ScalarParseError(f"more than one square root in {whole!r}")
        idx = s.index("√")
        digits = s[idx + 1:]
        if not digits.isdigit():
            raise ScalarParseError(f"radicand must be a positive integer in {whole!r}")
        radicand = int(digits)
        head = s[:idx]
        j = max(head.rfind("+"), head.rfind("-"))
        if j <= 0:
            a_text, b_text = "", head
        else:
            a_text, b_text = head[:j], head[j:]
        a = _parse_rational(a_text, whole) if a_text else Fraction(0)
        if b_text in ("", "+"):
            b = Fraction(1)
        elif b_text == "-":
            b = Fraction(-1)
        else:
            b = _parse_rational(b_text, whole)
        if radicand < 2 or not is_squarefree(radicand):
            raise ScalarParseError(f"radicand {radicand} is not square-free and >= 2 in {whole!r}")
        return cls(a, b, radicand)

    # -- representation -----------------------------------------------
    def __str__(self) -> str:
        if self.b == 0:
            return _fmt_rational(self.a)
        mag = abs(self.b)
        coef = "" if mag == 1 else _fmt_rational(mag)
        irr = f"{coef}√{self.radicand}"
        if self.a == 0:
            return irr if self.b > 0 else "-" + irr
        return f"{_fmt_rational(self.a)}{'+' if self.b > 0 else '-'}{irr}"

    def __repr__(self) -> str:
        return f"ExactScalar('{self}')"

    def __float__(self) -> float:
        if self.b == 0:
            return float(self.a)
        return float(self.a) + float(self.b) * math.sqrt(self.radicand)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    @property
    def is_integer(self) -> bool:
        return self.b == 0 and self.a.denominator == 1

    # -- field structure ----------------------------------------------
    def _common(self, other: ExactScalar) -> Optional[int]:
        if self.radicand is None:
            return other.radicand
        if other.radicand is None or other.radicand == self.radicand:
            return self.radicand
        raise RadicandMismatch(f"cannot combine √{self.radicand} and √{other.radicand}")

    def __add__(self, other: Number) -> ExactScalar:
        other = as_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        return ExactScalar(self.a + other.a, self.b + other.b, self._common(other))

    __radd__ = __add__

    def __neg__(self) -> ExactScalar:
        return ExactScalar(-self.a, -self.b, self.radicand)

    def __pos__(self) -> ExactScalar:
        return self

    def __sub__(self, other: Number) -> ExactScalar:
        other = as_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Number) -> ExactScalar:
        return (-self) + other

    def __mul__(self, other: Number) -> ExactScalar:
        other = as_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        d = self._common(other)
        if d is None:
            return ExactScalar(self.a * other.a)
        return ExactScalar(self.a * other.a + self.b * other.b * d,
                           self.a * other.b + self.b * other.a, d)

    __rmul__ = __mul__

    def conjugate(self) -> ExactScalar:
        return ExactScalar(self.a, -self.b, self.radicand)

    def norm(self) -> Fraction:
        if self.radicand is None:
            return self.a * self.a
        return self.a * self.a - self.b * self.b * self.radicand

    def reciprocal(self) -> ExactScalar:
        nrm = self.norm()
        if nrm == 0:
            raise ZeroDivisionError("division by zero scalar")
        return ExactScalar(self.a / nrm, -self.b / nrm, self.radicand)

    def __truediv__(self, other: Number) -> ExactScalar:
        other = as_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        self._common(other)
        return self * other.reciprocal()

    def __rtruediv__(self, other: Number) -> ExactScalar:
        return as_scalar(other) * self.reciprocal()

    def __abs__(self) -> ExactScalar:
        return -self if self.sign() < 0 else self

    # -- order --------------------------------------------------------
    def sign(self) -> int:
        """Exact sign, from the signs of ``a``, ``b`` and ``a^2`` vs ``b^2 D``."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        return sa if self.a * self.a > self.b * self.b * self.radicand else sb

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, ExactScalar):
            return self.a == other.a and self.b == other.b and (
                self.b == 0 or self.radicand == other.radicand)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.a) if self.b == 0 else hash((self.a, self.b, self.radicand))
        return self._hash

    def __lt__(self, other: Number) -> bool:
        other = as_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign() < 0

    # -- integer parts ------------------------------------------------
    def _integer_form(self) -> tuple[int, int, int]:
        # self == (A + B*sqrt(D)) / C with C > 0
        if self._ints is None:
            c = self.a.denominator * self.b.denominator // math.gcd(self.a.denominator,
                                                                    self.b.denominator)
            self._ints = (int(self.a * c), int(self.b * c), c)
        return self._ints

    def floor_of_multiple(self, m: int) -> int:
        """``floor(m * self)`` for an integer ``m``, in pure integer arithmetic."""
        big_a, big_b, c = self._integer_form()
        big_a *= m
        big_b *= m
        if big_b == 0:
            s = 0
        else:
            root = math.isqrt(big_b * big_b * self.radicand)
            # B*sqrt(D) is irrational, so floor(-|B|sqrt D) = -isqrt(B^2 D) - 1
            s = root if big_b > 0 else -root - 1
        return (big_a + s) // c

    def floor(self) -> int:
        return self.floor_of_multiple(1)

    def ceil(self) -> int:
        f = self.floor()
        return f if self.is_integer else f + 1

    def frac(self) -> ExactScalar:
        return self - self.floor()

    def frac_of_multiple(self, m: int) -> ExactScalar:
        return self * m - self.floor_of_multiple(m)

    def __floor__(self) -> int:
        return self.floor()

    def __ceil__(self) -> int:
        return self.ceil()


def as_scalar(x: object) -> ExactScalar:
    if isinstance(x, ExactScalar):
        return x
    if isinstance(x, (int, Fraction)):
        return ExactScalar(x)
    return NotImplemented


def floor_of(x: Number) -> int:
    return as_scalar(x).floor()


def ceil_of(x: Number) -> int:
    return as_scalar(x).ceil()


def frac_of(x: Number) -> ExactScalar:
    return as_scalar(x).frac()


def phi_of(x: Number) -> int:
    """0 when ``x`` is an integer, 1 otherwise (ceiling minus floor)."""
    return 0 if as_scalar(x).is_integer else 1

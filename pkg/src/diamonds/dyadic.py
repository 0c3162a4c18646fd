"""Exact dyadic rationals num / 2**exp, stored reduced."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class Dyadic:
    """A rational whose denominator is a power of two.

    Reduced form: ``num`` is odd or ``exp`` is 0 (zero is stored as (0, 0)).
    """

    num: int
    exp: int = 0

    def __post_init__(self):
        num, exp = self.num, self.exp
        if exp < 0:
            raise ValueError("exponent must be nonnegative")
        if num == 0:
            exp = 0
        while exp > 0 and num % 2 == 0:
            num //= 2
            exp -= 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    @staticmethod
    def from_fraction(q) -> "Dyadic":
        q = Fraction(q)
        den = q.denominator
        exp = den.bit_length() - 1
        if den != 1 << exp:
            raise ValueError(f"{q} is not dyadic")
        return Dyadic(q.numerator, exp)

    @staticmethod
    def parse(text: str) -> "Dyadic":
        """Accepts "p", "p/2^k", or any "p/q" with q a power of two."""
        text = text.strip()
        if "/" not in text:
            return Dyadic(int(text))
        num, den = text.split("/", 1)
        if "^" in den:
            base, exp = den.split("^", 1)
            if int(base) != 2:
                raise ValueError(f"bad dyadic denominator base in {text!r}")
            return Dyadic(int(num), int(exp))
        return Dyadic.from_fraction(Fraction(int(num), int(den)))

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.exp)

    def __str__(self):
        if self.exp == 0:
            return str(self.num)
        return f"{self.num}/2^{self.exp}"

    def _aligned(self, other: "Dyadic"):
        e = max(self.exp, other.exp)
        return self.num << (e - self.exp), other.num << (e - other.exp), e

    def __add__(self, other):
        a, b, e = self._aligned(_coerce(other))
        return Dyadic(a + b, e)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        a, b, e = self._aligned(_coerce(other))
        return Dyadic(a - b, e)

    def __rsub__(self, other):
        a, b, e = _coerce(other)._aligned(self)
        return Dyadic(a - b, e)

    def __neg__(self):
        return Dyadic(-self.num, self.exp)

    def __abs__(self):
        return Dyadic(abs(self.num), self.exp)

    def half(self) -> "Dyadic":
        return Dyadic(self.num, self.exp + 1)

    def double(self) -> "Dyadic":
        return Dyadic(self.num * 2, self.exp)

    def _cmp(self, other):
        a, b, _ = self._aligned(_coerce(other))
        return (a > b) - (a < b)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0


def _coerce(x) -> Dyadic:
    if isinstance(x, Dyadic):
        return x
    if isinstance(x, int):
        return Dyadic(x)
    raise TypeError(f"cannot mix Dyadic with {type(x).__name__}")


D_ZERO = Dyadic(0)
D_ONE = Dyadic(1)
D_HALF = Dyadic(1, 1)

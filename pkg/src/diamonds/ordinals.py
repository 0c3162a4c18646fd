"""Countable ordinals below epsilon_0 in Cantor normal form.

An ordinal is a sorted tuple of (exponent, coefficient) pairs with strictly
decreasing ordinal exponents and positive integer coefficients; the empty
tuple is zero.  Every limit ordinal carries a fixed enumeration of the
ordinals below it, so that all transfinite constructions in this package are
deterministic across runs and platforms.

The enumeration scheme is structural recursion on the normal form:

* ``a = b + w^g`` (strip one copy of the last power): even indices enumerate
  ``[0, b)``, odd indices enumerate ``[b, b + w^g)``.
* ``w^(d+1)``: dovetail the blocks ``[w^d * m, w^d * (m+1))`` through the
  Cantor pairing function (for ``d = 0`` the enumeration of ``w`` is the
  identity on the naturals).
* ``w^g`` with ``g`` limit: index 0 gives 0; the remaining indices dovetail
  the blocks ``[w^e, w^(e+1))`` where ``e`` runs along the enumeration of
  ``g`` itself.

The single pairing function used everywhere is ``<m,k> = (m+k)(m+k+1)/2 + k``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from functools import total_ordering


class OrdinalParseError(ValueError):
    """Raised on ordinal expressions that do not match the grammar."""


def cantor_pair(m: int, k: int) -> int:
    return (m + k) * (m + k + 1) // 2 + k


def cantor_unpair(n: int) -> tuple[int, int]:
    w = (math.isqrt(8 * n + 1) - 1) // 2
    k = n - w * (w + 1) // 2
    return w - k, k


class Kind(Enum):
    ZERO = "zero"
    SUCCESSOR = "successor"
    LIMIT = "limit"


@total_ordering
@dataclass(frozen=True)
class Ordinal:
    terms: tuple = ()

    def __post_init__(self):
        prev = None
        for exp, coeff in self.terms:
            if not isinstance(exp, Ordinal):
                raise TypeError("exponents must be Ordinal")
            if coeff < 1:
                raise ValueError("coefficients must be positive")
            if prev is not None and not exp < prev:
                raise ValueError("exponents must strictly decrease")
            prev = exp

    # -- construction -----------------------------------------------------

    @staticmethod
    def from_int(n: int) -> "Ordinal":
        if n < 0:
            raise ValueError("ordinals are nonnegative")
        if n == 0:
            return ZERO
        return Ordinal(((ZERO, n),))

    @staticmethod
    def omega_power(exp: "Ordinal", coeff: int = 1) -> "Ordinal":
        if coeff == 0:
            return ZERO
        return Ordinal(((exp, coeff),))

    # -- order -------------------------------------------------------------

    def _cmp(self, other: "Ordinal") -> int:
        for (e1, c1), (e2, c2) in zip(self.terms, other.terms):
            c = e1._cmp(e2)
            if c != 0:
                return c
            if c1 != c2:
                return 1 if c1 > c2 else -1
        if len(self.terms) != len(other.terms):
            return 1 if len(self.terms) > len(other.terms) else -1
        return 0

    def __lt__(self, other):
        return self._cmp(other) < 0

    # -- classification ----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0].is_zero

    @property
    def is_limit(self) -> bool:
        return bool(self.terms) and not self.terms[-1][0].is_zero

    def classify(self) -> tuple[Kind, "Ordinal | None"]:
        """Zero / Successor(predecessor) / Limit trichotomy."""
        if self.is_zero:
            return Kind.ZERO, None
        exp, coeff = self.terms[-1]
        if not exp.is_zero:
            return Kind.LIMIT, None
        if coeff > 1:
            pred = Ordinal(self.terms[:-1] + ((exp, coeff - 1),))
        else:
            pred = Ordinal(self.terms[:-1])
        return Kind.SUCCESSOR, pred

    @property
    def predecessor(self) -> "Ordinal":
        kind, pred = self.classify()
        if kind is not Kind.SUCCESSOR:
            raise ValueError(f"{self} is not a successor")
        return pred

    def as_int(self) -> int:
        if self.is_zero:
            return 0
        if len(self.terms) == 1 and self.terms[0][0].is_zero:
            return self.terms[0][1]
        raise ValueError(f"{self} is infinite")

    # -- arithmetic (only what enumeration needs) ---------------------------

    def __add__(self, other: "Ordinal") -> "Ordinal":
        if not isinstance(other, Ordinal):
            return NotImplemented
        if other.is_zero:
            return self
        head = other.terms[0][0]
        kept = tuple(t for t in self.terms if head < t[0])
        merged = list(other.terms)
        idx = len(kept)
        if idx < len(self.terms) and self.terms[idx][0] == head:
            merged[0] = (head, self.terms[idx][1] + other.terms[0][1])
        return Ordinal(kept + tuple(merged))

    # -- printing ------------------------------------------------------------

    def _atomic_exponent(self) -> bool:
        # printable after "^" without parentheses
        if len(self.terms) != 1:
            return False
        exp, coeff = self.terms[0]
        if exp.is_zero:
            return True
        return coeff == 1 and exp._atomic_exponent()

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = []
        for exp, coeff in self.terms:
            if exp.is_zero:
                parts.append(str(coeff))
                continue
            if exp == ONE:
                s = "w"
            elif exp._atomic_exponent():
                s = f"w^{exp}"
            else:
                s = f"w^({exp})"
            if coeff > 1:
                s += f"*{coeff}"
            parts.append(s)
        return "+".join(parts)

    def __repr__(self):
        return f"Ordinal({self})"


ZERO = Ordinal()
ONE = Ordinal.from_int(1)
OMEGA = Ordinal.omega_power(ONE)


def compare(a: Ordinal, b: Ordinal) -> int:
    """Total order: -1, 0, or 1."""
    return a._cmp(b)


# -- parsing -----------------------------------------------------------------
#
# expr      := term ("+" term)*
# term      := "0" | nat | "w" ("^" exponent)? ("*" nat)?
# exponent  := "(" expr ")" | nat | "w" ("^" exponent)?
#
# Parentheses extend the bare grammar so that printing round-trips for
# compound exponents such as w^(w+1); non-canonical sums are normalized by
# ordinal addition rather than rejected.

_TOKEN = re.compile(r"\s*(\d+|[w^*+()])")


def _tokenize(text: str) -> list[str]:
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise OrdinalParseError(f"bad character at {text[pos:]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise OrdinalParseError(f"expected {expected or 'token'}, got {tok!r}")
        self.pos += 1
        return tok

    def expr(self) -> Ordinal:
        total = self.term()
        while self.peek() == "+":
            self.take("+")
            total = total + self.term()
        return total

    def term(self) -> Ordinal:
        tok = self.peek()
        if tok is None:
            raise OrdinalParseError("unexpected end of input")
        if tok.isdigit():
            self.take()
            return Ordinal.from_int(int(tok))
        if tok == "w":
            self.take()
            exp = ONE
            if self.peek() == "^":
                self.take("^")
                exp = self.exponent()
            coeff = 1
            if self.peek() == "*":
                self.take("*")
                nat = self.take()
                if not nat.isdigit() or int(nat) < 1:
                    raise OrdinalParseError(f"bad coefficient {nat!r}")
                coeff = int(nat)
            return Ordinal.omega_power(exp, coeff)
        raise OrdinalParseError(f"unexpected token {tok!r}")

    def exponent(self) -> Ordinal:
        tok = self.peek()
        if tok == "(":
            self.take("(")
            e = self.expr()
            self.take(")")
            return e
        if tok is not None and tok.isdigit():
            self.take()
            return Ordinal.from_int(int(tok))
        if tok == "w":
            self.take()
            e = ONE
            if self.peek() == "^":
                self.take("^")
                e = self.exponent()
            return Ordinal.omega_power(e)
        raise OrdinalParseError(f"bad exponent at {tok!r}")


def parse_ordinal(text: str) -> Ordinal:
    parser = _Parser(_tokenize(text))
    value = parser.expr()
    if parser.peek() is not None:
        raise OrdinalParseError(f"trailing input at {parser.peek()!r}")
    return value


# -- canonical enumeration of [0, alpha) for limit alpha ----------------------


def _strip_last_power(alpha: Ordinal) -> tuple[Ordinal, Ordinal]:
    """Write alpha = beta + w^gamma by removing one copy of the last power."""
    exp, coeff = alpha.terms[-1]
    if coeff > 1:
        beta = Ordinal(alpha.terms[:-1] + ((exp, coeff - 1),))
    else:
        beta = Ordinal(alpha.terms[:-1])
    return beta, exp


def _left_subtract(beta: Ordinal, target: Ordinal) -> Ordinal:
    """The xi with beta + xi = target, for targets produced by this module."""
    if beta.is_zero:
        return target
    i = 0
    while i < len(beta.terms) and i < len(target.terms) and beta.terms[i] == target.terms[i]:
        i += 1
    if i == len(beta.terms):
        return Ordinal(target.terms[i:])
    if i == len(beta.terms) - 1 and i < len(target.terms):
        eb, cb = beta.terms[i]
        et, ct = target.terms[i]
        if eb == et and ct > cb:
            return Ordinal(((et, ct - cb),) + target.terms[i + 1 :])
    raise ValueError(f"{target} is not a right extension of {beta}")


def enumerate_below(alpha: Ordinal, n: int) -> Ordinal:
    """The n-th ordinal of the fixed bijection from the naturals onto [0, alpha)."""
    if not alpha.is_limit:
        raise ValueError(f"{alpha} is not a limit ordinal")
    if n < 0:
        raise ValueError("index must be a natural")
    if len(alpha.terms) > 1 or alpha.terms[0][1] > 1:
        beta, gamma = _strip_last_power(alpha)
        if n % 2 == 0:
            return enumerate_below(beta, n // 2)
        return beta + enumerate_below(Ordinal.omega_power(gamma), n // 2)
    gamma = alpha.terms[0][0]
    if gamma == ONE:
        return Ordinal.from_int(n)
    kind, delta = gamma.classify()
    if kind is Kind.SUCCESSOR:
        m, k = cantor_unpair(n)
        return Ordinal.omega_power(delta, m) + enumerate_below(Ordinal.omega_power(delta), k)
    # gamma limit: blocks [w^e, w^(e+1)) along the enumeration of gamma
    if n == 0:
        return ZERO
    m, k = cantor_unpair(n - 1)
    e = enumerate_below(gamma, m)
    if e.is_zero:
        return Ordinal.from_int(k + 1)
    c, k1 = cantor_unpair(k)
    return Ordinal.omega_power(e, c + 1) + enumerate_below(Ordinal.omega_power(e), k1)


def enumeration_index(alpha: Ordinal, beta: Ordinal) -> int:
    """Inverse of enumerate_below: the index n with enumerate_below(alpha, n) = beta."""
    if not alpha.is_limit:
        raise ValueError(f"{alpha} is not a limit ordinal")
    if not beta < alpha:
        raise ValueError(f"{beta} is not below {alpha}")
    if len(alpha.terms) > 1 or alpha.terms[0][1] > 1:
        beta0, gamma = _strip_last_power(alpha)
        if beta < beta0:
            return 2 * enumeration_index(beta0, beta)
        xi = _left_subtract(beta0, beta)
        return 2 * enumeration_index(Ordinal.omega_power(gamma), xi) + 1
    gamma = alpha.terms[0][0]
    if gamma == ONE:
        return beta.as_int()
    kind, delta = gamma.classify()
    if kind is Kind.SUCCESSOR:
        if beta.terms and beta.terms[0][0] == delta:
            m = beta.terms[0][1]
            xi = Ordinal(beta.terms[1:])
        else:
            m, xi = 0, beta
        return cantor_pair(m, enumeration_index(Ordinal.omega_power(delta), xi))
    if beta.is_zero:
        return 0
    e, c = beta.terms[0][0], beta.terms[0][1]
    m = enumeration_index(gamma, e)
    if e.is_zero:
        return 1 + cantor_pair(m, beta.as_int() - 1)
    xi = Ordinal(beta.terms[1:])
    k = cantor_pair(c - 1, enumeration_index(Ordinal.omega_power(e), xi))
    return 1 + cantor_pair(m, k)

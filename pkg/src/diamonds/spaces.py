"""Finite-dimensional normed spaces over the rationals, with exact comparisons.

l1 and linf norms are exact rationals; the l2 norm is never evaluated as a
float: every comparison against a rational bound goes through squared values,
so verdicts stay exact in all three backends.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

NORMS = ("l1", "l2", "linf")

Vector = tuple[Fraction, ...]


@dataclass(frozen=True)
class NormedSpaceHandle:
    dim: int
    norm: str = "l2"

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        if self.norm not in NORMS:
            raise ValueError(f"norm must be one of {NORMS}")

    @property
    def squared(self) -> bool:
        """True when magnitudes are reported as squared values."""
        return self.norm == "l2"


def vec(*entries) -> Vector:
    return tuple(Fraction(e) for e in entries)


def vadd(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vsub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vscale(c, v: Vector) -> Vector:
    c = Fraction(c)
    return tuple(c * a for a in v)


def norm_l1(v: Vector) -> Fraction:
    return sum((abs(a) for a in v), Fraction(0))


def norm_linf(v: Vector) -> Fraction:
    return max((abs(a) for a in v), default=Fraction(0))


def norm_sq(v: Vector) -> Fraction:
    return sum((a * a for a in v), Fraction(0))


def magnitude(space: NormedSpaceHandle, v: Vector) -> Fraction:
    """Exact norm for l1/linf; exact squared norm for l2."""
    if space.norm == "l1":
        return norm_l1(v)
    if space.norm == "linf":
        return norm_linf(v)
    return norm_sq(v)


def cmp_norm(space: NormedSpaceHandle, v: Vector, bound) -> int:
    """Sign of ||v|| - bound, decided exactly."""
    bound = Fraction(bound)
    if space.norm == "l2":
        if bound < 0:
            return 1
        lhs, rhs = norm_sq(v), bound * bound
    else:
        lhs, rhs = magnitude(space, v), bound
    return (lhs > rhs) - (lhs < rhs)


def norm_le(space: NormedSpaceHandle, v: Vector, bound) -> bool:
    return cmp_norm(space, v, bound) <= 0


def norm_ge(space: NormedSpaceHandle, v: Vector, bound) -> bool:
    return cmp_norm(space, v, bound) >= 0


def ratio_measure(space: NormedSpaceHandle, v: Vector, d: Fraction) -> Fraction:
    """||v||/d for l1/linf; (||v||/d)^2 for l2.  Exact either way."""
    if d <= 0:
        raise ValueError("distance must be positive")
    if space.norm == "l2":
        return norm_sq(v) / (d * d)
    return magnitude(space, v) / d

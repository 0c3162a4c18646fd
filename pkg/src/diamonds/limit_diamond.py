"""The limit diamond: codes, exact distances, scaling maps, and the isometry.

The inductive limit of the finite-height countably branching diamonds has
vertices coded (A, r): A is the finite branch address and r the dyadic
distance to the bottom pole.  Poles are (), 0 and (), 1; every other
canonical code has |A| = k and r = m/2^k with m odd.  The half-scale maps
send (A, r) to (i^A, r/2) or (i^A, (r+1)/2), and every diamond of countable
ordinal height embeds isometrically via pole-preserving branch relabelings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .diamond import BOTTOM, TOP, BranchSlot, DiamondSpec, Hub, Pole, Sub, SummandSlot, Vertex
from .dyadic import D_HALF, D_ONE, D_ZERO, Dyadic
from .ordinals import Kind, Ordinal, cantor_pair, enumerate_below


@dataclass(frozen=True)
class DInfCode:
    branch: tuple[int, ...]
    height: Dyadic  # distance to the bottom pole

    @property
    def is_pole(self) -> bool:
        return not self.branch

    def __str__(self):
        body = ",".join(str(i) for i in self.branch)
        return f"A=[{body}];r={self.height.as_fraction()}"


CODE_BOTTOM = DInfCode((), D_ZERO)
CODE_TOP = DInfCode((), D_ONE)

_CODE_RE = re.compile(r"A=\[([\d,\s]*)\];r=(-?\d+(?:/\d+)?)")


def make_code(branch, height) -> DInfCode:
    """Normalized code: heights 0 and 1 collapse to the poles, and trailing
    address entries finer than the height's denominator are dropped."""
    if isinstance(height, Fraction):
        height = Dyadic.from_fraction(height)
    branch = tuple(branch)
    if height < D_ZERO or height > D_ONE:
        raise ValueError(f"height {height} outside [0, 1]")
    if height == D_ZERO:
        return CODE_BOTTOM
    if height == D_ONE:
        return CODE_TOP
    if height.exp > len(branch):
        raise ValueError(f"height {height} finer than address depth {len(branch)}")
    return DInfCode(branch[: height.exp], height)


def parse_code(text: str) -> DInfCode:
    m = _CODE_RE.fullmatch(text.strip())
    if not m:
        raise ValueError(f"bad code {text!r}")
    body = m.group(1).strip()
    branch = tuple(int(x) for x in body.split(",")) if body else ()
    return make_code(branch, Fraction(m.group(2)))


def g_map(i: int, sign: str, c: DInfCode) -> DInfCode:
    """Half-scale isometry onto the branch-i subdiamond; preserves its poles."""
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    r = c.height.half() if sign == "-" else (c.height + D_ONE).half()
    return make_code((i,) + c.branch, r)


def dinf_dist(x: DInfCode, y: DInfCode) -> Dyadic:
    """Exact distance between canonical codes.

    Distinct first branches route through the nearer pole; within a branch
    the hub ((i), 1/2) is the top of the lower half and the bottom of the
    upper half, mixed halves differ by their pole distances, and two codes
    in the same half descend at half scale.
    """
    if x == y:
        return D_ZERO
    rx, ry = x.height, y.height
    if x.is_pole or y.is_pole:
        return abs(rx - ry)
    if x.branch[0] != y.branch[0]:
        return min(rx + ry, Dyadic(2) - rx - ry)
    x_hub = len(x.branch) == 1  # exactly the codes with r = 1/2
    y_hub = len(y.branch) == 1
    if x_hub or y_hub:
        return abs((ry if x_hub else rx) - D_HALF)
    if rx < D_HALF and ry < D_HALF:
        return dinf_dist(_lower_tail(x), _lower_tail(y)).half()
    if rx > D_HALF and ry > D_HALF:
        return dinf_dist(_upper_tail(x), _upper_tail(y)).half()
    return abs(rx - ry)


def _lower_tail(c: DInfCode) -> DInfCode:
    return DInfCode(c.branch[1:], c.height.double())


def _upper_tail(c: DInfCode) -> DInfCode:
    return DInfCode(c.branch[1:], c.height.double() - D_ONE)


def psi(alpha: Ordinal, v: Vertex) -> DInfCode:
    """Pole-preserving isometric embedding of the height-alpha diamond.

    Successor stages compose the half-scale maps; limit stages reshuffle the
    summands into disjoint branch families through the Cantor pairing.
    Satisfies dinf_dist(psi(u), psi(v)) == dist(u, v) exactly.
    """
    if v == TOP:
        return CODE_TOP
    if v == BOTTOM:
        return CODE_BOTTOM
    kind, pred = alpha.classify()
    if isinstance(v, Hub):
        if kind is not Kind.SUCCESSOR:
            raise ValueError(f"hub at non-successor height {alpha}")
        return make_code((v.index,), D_HALF)
    if isinstance(v.slot, BranchSlot):
        if kind is not Kind.SUCCESSOR:
            raise ValueError(f"branch slot at non-successor height {alpha}")
        return g_map(v.slot.index, v.slot.sign, psi(pred, v.inner))
    if kind is not Kind.LIMIT:
        raise ValueError(f"summand slot at non-limit height {alpha}")
    n = v.slot.index
    beta = enumerate_below(alpha, n)
    inner = psi(beta, v.inner)
    # non-pole inner: move its branch family to a fresh set of first indices
    first = cantor_pair(n, inner.branch[0])
    return DInfCode((first,) + inner.branch[1:], inner.height)


def psi_on_spec(spec: DiamondSpec, v: Vertex) -> DInfCode:
    return psi(spec.alpha, v)

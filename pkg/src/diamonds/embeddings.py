"""Sub-Lipschitz embeddings between labelled trees and diamond graphs.

Four engines:

* build a point map on the 2-branching diamond from a verified dyadic tree
  (active pairs land in the exact sandwich [delta*d, d]);
* build a point map on the countably branching diamond from a verified
  sprawling tree (sandwich [delta/2*d, d]);
* extract a dyadic tree from any map whose active pairs satisfy
  A*d <= ||df|| <= d (the extracted tree verifies with delta = A);
* extract a sprawling tree the same way (delta = 2A).

Point maps evaluate lazily from vertex addresses, so countably branching
diamonds are queryable without global enumeration; distortion reports sweep
the truncation window exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .diamond import (
    BOTTOM,
    TOP,
    ActivePair,
    BranchSlot,
    DiamondSpec,
    Hub,
    Pole,
    Sub,
    SummandSlot,
    Vertex,
    active_pairs,
    dist,
    normalize,
)
from .ordinals import Kind, Ordinal, enumerate_below
from .spaces import (
    NormedSpaceHandle,
    Vector,
    cmp_norm,
    norm_ge,
    norm_le,
    ratio_measure,
    vadd,
    vscale,
    vsub,
)
from .trees import (
    DYADIC,
    SPRAWLING,
    LabelledTree,
    TreeShape,
    build_shape,
    verify_dyadic,
    verify_sprawling,
)


class EmbeddingPreconditionError(ValueError):
    pass


class BranchTestFailedError(RuntimeError):
    """Neither hub of a stage passed the 2A separation threshold."""

    def __init__(self, stage_prefix, witness_norms):
        self.stage_prefix = stage_prefix
        self.witness_norms = witness_norms
        super().__init__(f"branch test failed below prefix {stage_prefix}")


@dataclass
class PointMap:
    """Lazily evaluated map from diamond vertices to rational vectors.

    Evaluation normalizes the address first and memoizes; recomputation is
    idempotent, so concurrent queries are safe.
    """

    spec: DiamondSpec
    space: NormedSpaceHandle
    _fn: object
    _memo: dict | None = None

    def eval(self, v: Vertex) -> Vector:
        v = normalize(v)
        if self._memo is None:
            self._memo = {}
        hit = self._memo.get(v)
        if hit is None:
            hit = self._fn(v)
            self._memo[v] = hit
        return hit

    def __call__(self, v: Vertex) -> Vector:
        return self.eval(v)


def scale_pointmap(f: PointMap, lam) -> PointMap:
    lam = Fraction(lam)
    return PointMap(f.spec, f.space, lambda v: vscale(lam, f.eval(v)))


def quotient_vector(f: PointMap, x: Vertex, y: Vertex) -> Vector:
    """(f(x) - f(y)) / d(x, y), defined only for distinct vertices."""
    d = dist(f.spec, x, y)
    if d.num == 0:
        raise ValueError("quotient vector requires distinct vertices")
    return vscale(1 / d.as_fraction(), vsub(f.eval(x), f.eval(y)))


# -- construction ---------------------------------------------------------------


def _require_window(t: LabelledTree):
    lo, hi = Fraction(1, 2), Fraction(1)
    for node in sorted(t.labels):
        v = t.labels[node]
        if cmp_norm(t.space, v, lo) < 0 or cmp_norm(t.space, v, hi) > 0:
            raise EmbeddingPreconditionError(
                f"label norm at {node} outside [1/2, 1]"
            )


def build_dyadic_embedding(t: LabelledTree, spec: DiamondSpec | None = None) -> PointMap:
    """Point map on the 2-branching diamond of the tree's height.

    Bottom goes to 0 and top to the root label; descending the (i,-) copy
    halves the current map, descending the (i,+) copy halves it and shifts by
    half the label at child i (the recursion then follows the opposite child).
    Active pairs satisfy delta*d <= ||df|| <= d exactly.
    """
    if t.shape.kind != DYADIC:
        raise EmbeddingPreconditionError("tree is not dyadic")
    if t.delta > Fraction(1, 2):
        raise EmbeddingPreconditionError("delta must be at most 1/2")
    res = verify_dyadic(t)
    if not res:
        raise EmbeddingPreconditionError(f"tree fails verification at {res.witness}: {res.reason}")
    _require_window(t)
    if spec is None:
        spec = DiamondSpec(t.shape.alpha, 2, t.shape.trunc)
    if spec.branching != 2 or spec.alpha != t.shape.alpha:
        raise EmbeddingPreconditionError("spec does not match the tree")
    zero = tuple(Fraction(0) for _ in range(t.space.dim))
    half = Fraction(1, 2)

    def evaluate(v: Vertex) -> Vector:
        offset, scale, node, alpha = zero, Fraction(1), (), t.shape.alpha
        while True:
            if v == BOTTOM:
                return offset
            if v == TOP:
                return vadd(offset, vscale(scale, t.labels[node]))
            if isinstance(v, Hub):
                return vadd(offset, vscale(scale * half, t.labels[node + (v.index,)]))
            slot = v.slot
            if isinstance(slot, SummandSlot):
                node = node + (slot.index,)
                alpha = enumerate_below(alpha, slot.index)
            else:
                i = slot.index
                if slot.sign == "+":
                    offset = vadd(offset, vscale(scale * half, t.labels[node + (i,)]))
                    node = node + (1 - i,)
                else:
                    node = node + (i,)
                scale = scale * half
                alpha = alpha.predecessor
            v = v.inner

    return PointMap(spec, t.space, evaluate)


def build_sprawling_embedding(t: LabelledTree, spec: DiamondSpec | None = None) -> PointMap:
    """Point map on the countably branching diamond of the tree's height.

    Same shape of recursion as the dyadic construction, with the (0,i) child
    guiding the lower copy and the (1,i) child the upper copy.  Active pairs
    satisfy (delta/2)*d <= ||df|| <= d exactly on the window.
    """
    if t.shape.kind != SPRAWLING:
        raise EmbeddingPreconditionError("tree is not sprawling")
    res = verify_sprawling(t)
    if not res:
        raise EmbeddingPreconditionError(f"tree fails verification at {res.witness}: {res.reason}")
    _require_window(t)
    if spec is None:
        spec = DiamondSpec(t.shape.alpha, None, t.shape.trunc)
    if spec.branching is not None or spec.alpha != t.shape.alpha:
        raise EmbeddingPreconditionError("spec does not match the tree")
    zero = tuple(Fraction(0) for _ in range(t.space.dim))
    half = Fraction(1, 2)

    def evaluate(v: Vertex) -> Vector:
        offset, scale, node, alpha = zero, Fraction(1), (), t.shape.alpha
        while True:
            if v == BOTTOM:
                return offset
            if v == TOP:
                return vadd(offset, vscale(scale, t.labels[node]))
            if isinstance(v, Hub):
                return vadd(offset, vscale(scale * half, t.labels[node + ((0, v.index),)]))
            slot = v.slot
            if isinstance(slot, SummandSlot):
                node = node + ((0, slot.index),)
                alpha = enumerate_below(alpha, slot.index)
            else:
                i = slot.index
                if slot.sign == "+":
                    offset = vadd(offset, vscale(scale * half, t.labels[node + ((0, i),)]))
                    node = node + ((1, i),)
                else:
                    node = node + ((0, i),)
                scale = scale * half
                alpha = alpha.predecessor
            v = v.inner

    return PointMap(spec, t.space, evaluate)


def normalize_tree_for_embedding(t: LabelledTree) -> LabelledTree:
    """Rescale-and-translate preprocessor.

    Appends a constant coordinate and halves, sending a 2delta-tree in the
    unit ball to a delta-tree whose labels all have norm in [1/2, 1]; the
    separation parameter halves accordingly.
    """
    one = Fraction(1)
    labels = {n: tuple(x / 2 for x in v) + (one / 2,) for n, v in t.labels.items()}
    space = NormedSpaceHandle(t.space.dim + 1, t.space.norm)
    return LabelledTree(t.shape, labels, space, t.delta / 2, t.weights, t.ball_radius)


# -- distortion certification ----------------------------------------------------


@dataclass
class DistortionReport:
    """Exact two-sided sandwich over all windowed active pairs.

    Ratios are ||df||/d for l1/linf and the squared ratio for l2 (the
    ``squared`` flag says which); verdicts are always exact.
    """

    pairs_checked: int
    lower_ratio_min: Fraction | None
    upper_ratio_max: Fraction | None
    min_witness: ActivePair | None
    max_witness: ActivePair | None
    lower_bound: Fraction
    upper_bound: Fraction
    lower_ok: bool
    upper_ok: bool
    squared: bool

    @property
    def passed(self) -> bool:
        return self.lower_ok and self.upper_ok

    def to_json(self) -> dict:
        from .diamond import format_vertex

        def wit(p):
            return None if p is None else [format_vertex(p.u), format_vertex(p.v)]

        return {
            "pairs": self.pairs_checked,
            "min_ratio": None if self.lower_ratio_min is None else str(self.lower_ratio_min),
            "max_ratio": None if self.upper_ratio_max is None else str(self.upper_ratio_max),
            "witnesses": {"min": wit(self.min_witness), "max": wit(self.max_witness)},
            "lower_bound": str(self.lower_bound),
            "upper_bound": str(self.upper_bound),
            "squared": self.squared,
            "passed": self.passed,
        }


def check_distortion(f: PointMap, lower, upper) -> DistortionReport:
    """Exact verdict of lower*d <= ||df|| <= upper*d on every windowed active pair."""
    lower, upper = Fraction(lower), Fraction(upper)
    n = 0
    lo_min = hi_max = None
    lo_wit = hi_wit = None
    lower_ok = upper_ok = True
    for pair in active_pairs(f.spec):
        n += 1
        d = dist(f.spec, pair.u, pair.v)
        gap = vsub(f.eval(pair.u), f.eval(pair.v))
        if cmp_norm(f.space, gap, lower * d.as_fraction()) < 0:
            lower_ok = False
        if cmp_norm(f.space, gap, upper * d.as_fraction()) > 0:
            upper_ok = False
        ratio = ratio_measure(f.space, gap, d.as_fraction())
        if lo_min is None or ratio < lo_min:
            lo_min, lo_wit = ratio, pair
        if hi_max is None or ratio > hi_max:
            hi_max, hi_wit = ratio, pair
    return DistortionReport(
        pairs_checked=n,
        lower_ratio_min=lo_min,
        upper_ratio_max=hi_max,
        min_witness=lo_wit,
        max_witness=hi_wit,
        lower_bound=lower,
        upper_bound=upper,
        lower_ok=lower_ok,
        upper_ok=upper_ok,
        squared=f.space.squared,
    )


# -- extraction -------------------------------------------------------------------


class _View:
    """Restriction of a point map to a subdiamond, rescaled to unit diameter."""

    def __init__(self, f: PointMap, prefix=(), mult=Fraction(1)):
        self.f = f
        self.prefix = tuple(prefix)
        self.mult = mult

    def wrap(self, v: Vertex) -> Vertex:
        for slot in reversed(self.prefix):
            v = Sub(slot, v)
        return normalize(v)

    def eval(self, v: Vertex) -> Vector:
        return vscale(self.mult, self.f.eval(self.wrap(v)))

    def descend(self, slot, factor) -> "_View":
        return _View(self.f, self.prefix + (slot,), self.mult * factor)

    def quotient_root(self) -> Vector:
        return vsub(self.eval(TOP), self.eval(BOTTOM))

    def hub_quotients(self, i: int) -> tuple[Vector, Vector]:
        # (top-to-hub, hub-to-bottom) quotient vectors, both at distance 1/2
        top, bot, hub = self.eval(TOP), self.eval(BOTTOM), self.eval(Hub(i))
        return vscale(2, vsub(top, hub)), vscale(2, vsub(hub, bot))


def extract_dyadic_tree(f: PointMap, bound) -> LabelledTree:
    """Dyadic tree of quotient vectors extracted from a sub-Lipschitz map.

    At each successor stage at least one hub separates its two quotient
    vectors by 2A (ties break to the lowest index); the recursion follows
    that hub's two copies at double scale.  The result verifies with
    delta = A and root (f(t) - f(b)) / d(t, b).
    """
    bound = Fraction(bound)
    if f.spec.branching != 2:
        raise EmbeddingPreconditionError("dyadic extraction needs branching 2")
    labels: dict = {}

    def rec(view: _View, alpha: Ordinal, prefix):
        labels[prefix] = view.quotient_root()
        kind, pred = alpha.classify()
        if kind is Kind.ZERO:
            return
        if kind is Kind.SUCCESSOR:
            chosen = None
            norms = []
            for i in (0, 1):
                up, down = view.hub_quotients(i)
                gap = vsub(up, down)
                norms.append(gap)
                if cmp_norm(f.space, gap, 2 * bound) >= 0:
                    chosen = i
                    break
            if chosen is None:
                raise BranchTestFailedError(prefix, norms)
            up_view = view.descend(BranchSlot(chosen, "+"), Fraction(2))
            down_view = view.descend(BranchSlot(chosen, "-"), Fraction(2))
            rec(up_view, pred, prefix + (0,))
            rec(down_view, pred, prefix + (1,))
            return
        for n in range(f.spec.trunc.limit_width):
            beta = enumerate_below(alpha, n)
            rec(view.descend(SummandSlot(n), Fraction(1)), beta, prefix + (n,))

    rec(_View(f), f.spec.alpha, ())
    shape = build_shape(DYADIC, f.spec.alpha, f.spec.trunc)
    return LabelledTree(shape, labels, f.space, bound)


def extract_sprawling_tree(f: PointMap, bound) -> LabelledTree:
    """Sprawling tree of quotient vectors from a map on the countably
    branching diamond; verifies with delta = 2A on the window."""
    bound = Fraction(bound)
    if f.spec.branching is not None:
        raise EmbeddingPreconditionError("sprawling extraction needs countable branching")
    labels: dict = {}
    width = f.spec.trunc.fan_width

    def rec(view: _View, alpha: Ordinal, prefix):
        labels[prefix] = view.quotient_root()
        kind, pred = alpha.classify()
        if kind is Kind.ZERO:
            return
        if kind is Kind.SUCCESSOR:
            downs = []
            for i in range(width):
                up, down = view.hub_quotients(i)
                downs.append(down)
                rec(view.descend(BranchSlot(i, "-"), Fraction(2)), pred, prefix + ((0, i),))
                rec(view.descend(BranchSlot(i, "+"), Fraction(2)), pred, prefix + ((1, i),))
            for a in range(len(downs)):
                for b in range(a + 1, len(downs)):
                    if cmp_norm(f.space, vsub(downs[a], downs[b]), 2 * bound) < 0:
                        raise BranchTestFailedError(prefix, [downs[a], downs[b]])
            return
        for n in range(f.spec.trunc.limit_width):
            beta = enumerate_below(alpha, n)
            rec(view.descend(SummandSlot(n), Fraction(1)), beta, prefix + ((0, n),))

    rec(_View(f), f.spec.alpha, ())
    shape = build_shape(SPRAWLING, f.spec.alpha, f.spec.trunc)
    return LabelledTree(shape, labels, f.space, 2 * bound)

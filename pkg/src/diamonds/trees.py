"""Tree shapes of ordinal height and exact verification of labelled trees.

Three shape families over finite windows:

* dyadic trees: nodes are 0/1 sequences at successor stages and fan out
  countably at limit stages;
* sprawling trees: successor stages fan out countably in pairs
  ((0,n), (1,n)), limit stages fan out through the (0,n) children only;
* bushes: nodes with finitely many successors carry convex weights, fans
  are constant.

Labels are exact rational vectors; every verifier verdict (midpoint
identities, convex combinations, separations, ball containment) is decided
in exact arithmetic, squared where the l2 norm is involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

from .ordinals import Kind, Ordinal, enumerate_below, parse_ordinal
from .spaces import NormedSpaceHandle, Vector, cmp_norm, norm_ge, norm_le, vadd, vscale, vsub
from .truncation import DEFAULT_TRUNC, BudgetExceededError, TruncationSpec

DYADIC = "dyadic"
SPRAWLING = "sprawling"
BUSH = "bush"
KINDS = (DYADIC, SPRAWLING, BUSH)

DEFAULT_NODE_CAP = 10**5


@dataclass(frozen=True)
class TreeShape:
    kind: str
    alpha: Ordinal
    trunc: TruncationSpec
    nodes: frozenset
    fan_nodes: frozenset  # nodes whose (truncated) children form a constant fan

    def children(self, node) -> list:
        k = len(node)
        return sorted(n for n in self.nodes if len(n) == k + 1 and n[:k] == node)

    def internal_nodes(self) -> list:
        lengths = {}
        for n in self.nodes:
            lengths.setdefault(len(n), []).append(n)
        out = []
        for n in sorted(self.nodes):
            if any(m[: len(n)] == n for m in lengths.get(len(n) + 1, ())):
                out.append(n)
        return out


def build_shape(
    kind: str,
    alpha: Ordinal,
    trunc: TruncationSpec = DEFAULT_TRUNC,
    cap: int = DEFAULT_NODE_CAP,
) -> TreeShape:
    """Prefix-closed node set with the correct successor profile, windowed.

    Bushes are built as the canonical member arising from a dyadic tree
    (two successors at every successor stage); richer bush shapes come from
    user input.
    """
    if isinstance(alpha, str):
        alpha = parse_ordinal(alpha)
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    nodes: set = set()
    fans: set = set()

    def add(node):
        nodes.add(node)
        if len(nodes) > cap:
            raise BudgetExceededError(f"tree exceeds {cap} nodes")

    def rec(a: Ordinal, prefix, depth: int):
        add(prefix)
        if trunc.depth_budget is not None and depth >= trunc.depth_budget:
            return
        k, pred = a.classify()
        if k is Kind.ZERO:
            return
        if k is Kind.SUCCESSOR:
            if kind == SPRAWLING:
                for n in range(trunc.fan_width):
                    rec(pred, prefix + ((0, n),), depth + 1)
                    rec(pred, prefix + ((1, n),), depth + 1)
            else:
                rec(pred, prefix + (0,), depth + 1)
                rec(pred, prefix + (1,), depth + 1)
            return
        fans.add(prefix)
        for n in range(trunc.limit_width):
            beta = enumerate_below(a, n)
            child = prefix + ((0, n),) if kind == SPRAWLING else prefix + (n,)
            rec(beta, child, depth + 1)

    rec(alpha, (), 0)
    return TreeShape(kind, alpha, trunc, frozenset(nodes), frozenset(fans))


@dataclass
class LabelledTree:
    shape: TreeShape
    labels: dict
    space: NormedSpaceHandle
    delta: Fraction
    weights: dict | None = None  # node -> {child: weight}, bushes only
    ball_radius: Fraction = field(default_factory=lambda: Fraction(1))

    def label(self, node) -> Vector:
        return self.labels[node]


@dataclass
class VerificationResult:
    passed: bool
    witness: tuple | None = None
    reason: str = ""
    nodes_checked: int = 0

    def __bool__(self):
        return self.passed


def _fail(node, reason) -> VerificationResult:
    return VerificationResult(False, node, reason)


def _check_labels_cover(t: LabelledTree) -> VerificationResult | None:
    missing = t.shape.nodes - set(t.labels)
    if missing:
        return _fail(min(missing), "node without label")
    extra = set(t.labels) - t.shape.nodes
    if extra:
        return _fail(min(extra), "label without node")
    return None


def _check_ball(t: LabelledTree) -> VerificationResult | None:
    for node in sorted(t.labels):
        if not norm_le(t.space, t.labels[node], t.ball_radius):
            return _fail(node, f"label outside radius-{t.ball_radius} ball")
    return None


def verify_dyadic(t: LabelledTree) -> VerificationResult:
    """Two-successor nodes are exact midpoints of 2*delta-separated children;
    fan nodes are constant; all labels lie in the unit ball."""
    if t.shape.kind != DYADIC:
        return _fail(None, "shape is not dyadic")
    bad = _check_labels_cover(t) or _check_ball(t)
    if bad:
        return bad
    checked = 0
    for node in t.shape.internal_nodes():
        kids = t.shape.children(node)
        x = t.labels[node]
        checked += 1
        if node in t.shape.fan_nodes:
            for c in kids:
                if t.labels[c] != x:
                    return _fail(c, "fan child differs from its parent")
            continue
        if len(kids) != 2:
            return _fail(node, f"expected 2 successors, found {len(kids)}")
        c0, c1 = (t.labels[k] for k in kids)
        if vscale(Fraction(1, 2), vadd(c0, c1)) != x:
            return _fail(node, "children do not average to the parent")
        if not norm_ge(t.space, vsub(c0, c1), 2 * t.delta):
            return _fail(node, "children are not 2*delta separated")
    return VerificationResult(True, nodes_checked=checked)


def verify_sprawling(t: LabelledTree) -> VerificationResult:
    """Every materialized pair ((0,n),(1,n)) averages to its parent, the
    (0,*) children are pairwise delta-separated, fans are constant."""
    if t.shape.kind != SPRAWLING:
        return _fail(None, "shape is not sprawling")
    bad = _check_labels_cover(t) or _check_ball(t)
    if bad:
        return bad
    half = Fraction(1, 2)
    checked = 0
    for node in t.shape.internal_nodes():
        kids = t.shape.children(node)
        x = t.labels[node]
        checked += 1
        if node in t.shape.fan_nodes:
            for c in kids:
                if t.labels[c] != x:
                    return _fail(c, "fan child differs from its parent")
            continue
        pairs = {}
        for c in kids:
            bit, n = c[-1]
            pairs.setdefault(n, {})[bit] = c
        zeros = []
        for n, sides in sorted(pairs.items()):
            if set(sides) != {0, 1}:
                return _fail(node, f"fan pair {n} is incomplete")
            lo, hi = t.labels[sides[0]], t.labels[sides[1]]
            if vscale(half, vadd(lo, hi)) != x:
                return _fail(sides[0], "pair does not average to the parent")
            zeros.append(sides[0])
        for a in range(len(zeros)):
            for b in range(a + 1, len(zeros)):
                gap = vsub(t.labels[zeros[a]], t.labels[zeros[b]])
                if not norm_ge(t.space, gap, t.delta):
                    return _fail(zeros[b], "first members are not delta separated")
                # cross midpoints stay delta/2 away from the parent
                cross = vsub(x, vscale(half, vadd(t.labels[zeros[a]], _other(t, zeros[b]))))
                if not norm_ge(t.space, cross, t.delta / 2):
                    return _fail(zeros[b], "cross midpoint too close to the parent")
    return VerificationResult(True, nodes_checked=checked)


def _other(t: LabelledTree, zero_child):
    bit, n = zero_child[-1]
    return t.labels[zero_child[:-1] + ((1, n),)]


def verify_bush(t: LabelledTree) -> VerificationResult:
    """Finite-successor nodes are exact convex combinations of successors that
    each sit at least delta away; fans are constant; labels stay in the
    declared radius-M ball."""
    if t.shape.kind != BUSH:
        return _fail(None, "shape is not a bush")
    bad = _check_labels_cover(t) or _check_ball(t)
    if bad:
        return bad
    weights = t.weights or {}
    checked = 0
    for node in t.shape.internal_nodes():
        kids = t.shape.children(node)
        x = t.labels[node]
        checked += 1
        if node in t.shape.fan_nodes:
            for c in kids:
                if t.labels[c] != x:
                    return _fail(c, "fan child differs from its parent")
            continue
        if node not in weights:
            return _fail(node, "finite-successor node without weights")
        w = weights[node]
        if set(w) != set(kids):
            return _fail(node, "weights do not match the successors")
        total = sum(w.values(), Fraction(0))
        if total != 1:
            return _fail(node, f"weights sum to {total}, not 1")
        combo = None
        for c in kids:
            lam = Fraction(w[c])
            if not 0 < lam <= 1:
                return _fail(c, f"weight {lam} outside (0, 1]")
            part = vscale(lam, t.labels[c])
            combo = part if combo is None else vadd(combo, part)
            if not norm_ge(t.space, vsub(x, t.labels[c]), t.delta):
                return _fail(c, "successor is not delta separated from the node")
        if combo != x:
            return _fail(node, "successors do not combine to the node")
    return VerificationResult(True, nodes_checked=checked)


def tree_as_bush(t: LabelledTree) -> LabelledTree:
    """A passing dyadic tree is a bush with weights (1/2, 1/2) everywhere."""
    res = verify_dyadic(t)
    if not res:
        raise ValueError(f"input fails dyadic verification at {res.witness}: {res.reason}")
    shape = replace(t.shape, kind=BUSH)
    half = Fraction(1, 2)
    weights = {}
    for node in t.shape.internal_nodes():
        if node in t.shape.fan_nodes:
            continue
        weights[node] = {c: half for c in t.shape.children(node)}
    return LabelledTree(shape, dict(t.labels), t.space, t.delta, weights, t.ball_radius)


def haar_tree(depth: int) -> LabelledTree:
    """Stock of valid trees: normalized indicators of dyadic blocks in l1.

    Each node of the depth-n binary tree is labelled by the indicator of its
    dyadic block, scaled to l1-norm exactly 1; midpoint identities are exact
    and siblings have disjoint supports, so separation is 2 and the tree
    verifies with delta = 1.
    """
    if not 0 <= depth <= 12:
        raise ValueError("depth must be between 0 and 12")
    dim = 1 << depth
    shape = build_shape(DYADIC, Ordinal.from_int(depth), DEFAULT_TRUNC)
    labels = {}
    for node in shape.nodes:
        k = len(node)
        block = 1 << (depth - k)
        start = 0
        for bit in node:
            start = start * 2 + bit
        start *= block
        value = Fraction(1, block)
        labels[node] = tuple(
            value if start <= i < start + block else Fraction(0) for i in range(dim)
        )
    return LabelledTree(shape, labels, NormedSpaceHandle(dim, "l1"), Fraction(1))


# -- serialization -------------------------------------------------------------


def _path_to_json(kind: str, node):
    if kind == SPRAWLING:
        return [list(p) for p in node]
    return list(node)


def _path_from_json(kind: str, raw):
    if kind == SPRAWLING:
        return tuple((int(a), int(b)) for a, b in raw)
    return tuple(int(x) for x in raw)


def tree_to_json(t: LabelledTree) -> dict:
    kind = t.shape.kind
    doc = {
        "kind": kind,
        "alpha": str(t.shape.alpha),
        "trunc": t.shape.trunc.to_dict(),
        "space": {"dim": t.space.dim, "norm": t.space.norm},
        "delta": str(t.delta),
        "ball_radius": str(t.ball_radius),
        "fans": sorted(_path_to_json(kind, n) for n in t.shape.fan_nodes),
        "labels": [
            [_path_to_json(kind, n), [str(x) for x in t.labels[n]]] for n in sorted(t.labels)
        ],
    }
    if t.weights is not None:
        doc["weights"] = [
            [
                _path_to_json(kind, n),
                [[_path_to_json(kind, c), str(w)] for c, w in sorted(t.weights[n].items())],
            ]
            for n in sorted(t.weights)
        ]
    return doc


def tree_from_json(doc: dict) -> LabelledTree:
    kind = doc["kind"]
    if kind not in KINDS:
        raise ValueError(f"bad tree kind {kind!r}")
    alpha = parse_ordinal(doc["alpha"])
    trunc = TruncationSpec.from_dict(doc.get("trunc", {}))
    labels = {}
    for raw_path, raw_vec in doc["labels"]:
        labels[_path_from_json(kind, raw_path)] = tuple(Fraction(x) for x in raw_vec)
    fans = frozenset(_path_from_json(kind, p) for p in doc.get("fans", []))
    shape = TreeShape(kind, alpha, trunc, frozenset(labels), fans)
    weights = None
    if "weights" in doc:
        weights = {}
        for raw_node, raw_entries in doc["weights"]:
            node = _path_from_json(kind, raw_node)
            weights[node] = {
                _path_from_json(kind, c): Fraction(w) for c, w in raw_entries
            }
    space = NormedSpaceHandle(int(doc["space"]["dim"]), doc["space"]["norm"])
    return LabelledTree(
        shape,
        labels,
        space,
        Fraction(doc["delta"]),
        weights,
        Fraction(doc.get("ball_radius", 1)),
    )

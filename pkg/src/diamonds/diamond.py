"""Diamond graphs of ordinal height with exact recursive distances.

A diamond of height alpha and branching kappa is built by replacing every
edge of the (2+kappa)-vertex bipartite gadget with a half-scale copy of the
height-beta diamond (successor stages), or by gluing countably many smaller
diamonds at their poles (limit stages).  Vertices are canonical recursive
addresses; distances are dyadic rationals computed by a recursion that is
checked, pair for pair, against an exact Dijkstra oracle on materialized
finite windows.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Union

from .dyadic import D_HALF, D_ONE, D_ZERO, Dyadic
from .ordinals import Kind, Ordinal, enumerate_below, parse_ordinal
from .truncation import DEFAULT_TRUNC, BudgetExceededError, TruncationSpec

DEFAULT_VERTEX_CAP = 10**5


# -- vertex addresses ---------------------------------------------------------


@dataclass(frozen=True)
class Pole:
    name: str  # "t" or "b"

    def __repr__(self):
        return f"Pole({self.name})"


TOP = Pole("t")
BOTTOM = Pole("b")


@dataclass(frozen=True)
class Hub:
    """Middle vertex x_i of a successor-stage gadget, at distance 1/2 from both poles."""

    index: int


@dataclass(frozen=True)
class BranchSlot:
    """Position (i, sign) of a subdiamond copy at a successor stage."""

    index: int
    sign: str  # "+" (touches the top) or "-" (touches the bottom)

    def __post_init__(self):
        if self.sign not in ("+", "-"):
            raise ValueError("sign must be '+' or '-'")
        if self.index < 0:
            raise ValueError("branch index must be a natural")


@dataclass(frozen=True)
class SummandSlot:
    """Position n of a glued summand at a limit stage."""

    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("summand index must be a natural")


Slot = Union[BranchSlot, SummandSlot]


@dataclass(frozen=True)
class Sub:
    slot: Slot
    inner: "Vertex"


Vertex = Union[Pole, Hub, Sub]


class AddressError(ValueError):
    """An address is inconsistent with the height it is used at."""


def normalize(v: Vertex) -> Vertex:
    """Canonical form under the pole identifications; idempotent.

    At a successor stage the bottom of a (i,+) copy and the top of a (i,-)
    copy are both the hub x_i, the top of a (i,+) copy is the stage top, and
    the bottom of a (i,-) copy is the stage bottom.  At a limit stage every
    summand's poles are the stage poles.
    """
    if isinstance(v, (Pole, Hub)):
        return v
    inner = normalize(v.inner)
    slot = v.slot
    if isinstance(slot, BranchSlot):
        if inner == TOP:
            return TOP if slot.sign == "+" else Hub(slot.index)
        if inner == BOTTOM:
            return Hub(slot.index) if slot.sign == "+" else BOTTOM
        return Sub(slot, inner)
    if isinstance(inner, Pole):
        return inner
    return Sub(slot, inner)


def format_vertex(v: Vertex) -> str:
    if v == TOP:
        return "t"
    if v == BOTTOM:
        return "b"
    if isinstance(v, Hub):
        return f"x{v.index}"
    slot = v.slot
    if isinstance(slot, BranchSlot):
        return f"{slot.index}{slot.sign}/{format_vertex(v.inner)}"
    return f"s{slot.index}/{format_vertex(v.inner)}"


def parse_vertex(text: str) -> Vertex:
    """Inverse of format_vertex; the result is normalized."""
    parts = text.strip().split("/")
    leaf = parts[-1]
    if leaf == "t":
        v: Vertex = TOP
    elif leaf == "b":
        v = BOTTOM
    elif leaf.startswith("x") and leaf[1:].isdigit():
        v = Hub(int(leaf[1:]))
    else:
        raise AddressError(f"bad vertex leaf {leaf!r}")
    for part in reversed(parts[:-1]):
        if part.startswith("s") and part[1:].isdigit():
            v = Sub(SummandSlot(int(part[1:])), v)
        elif part and part[-1] in "+-" and part[:-1].isdigit():
            v = Sub(BranchSlot(int(part[:-1]), part[-1]), v)
        else:
            raise AddressError(f"bad vertex slot {part!r}")
    return normalize(v)


def vertex_sort_key(v: Vertex) -> str:
    return format_vertex(v)


# -- the graph family ---------------------------------------------------------


@dataclass(frozen=True)
class DiamondSpec:
    """Height alpha, branching (an int >= 2, or None for countable), window."""

    alpha: Ordinal
    branching: int | None = 2
    trunc: TruncationSpec = DEFAULT_TRUNC

    def __post_init__(self):
        if self.branching is not None and self.branching < 2:
            raise ValueError("finite branching must be at least 2")

    @property
    def width(self) -> int:
        """Hubs materialized per successor stage within the window."""
        return self.branching if self.branching is not None else self.trunc.fan_width


def spec_of(alpha, branching=2, fan_width=3, limit_width=3) -> DiamondSpec:
    if isinstance(alpha, str):
        alpha = parse_ordinal(alpha)
    if isinstance(branching, str):
        branching = None if branching in ("w", "omega") else int(branching)
    return DiamondSpec(alpha, branching, TruncationSpec(fan_width, limit_width))


def validate_vertex(spec: DiamondSpec, v: Vertex) -> None:
    """Check slot kinds against the stage classification along the address."""

    def walk(alpha: Ordinal, v: Vertex):
        if isinstance(v, Pole):
            return
        kind, pred = alpha.classify()
        if isinstance(v, Hub):
            if kind is not Kind.SUCCESSOR:
                raise AddressError(f"hub at non-successor height {alpha}")
            if spec.branching is not None and v.index >= spec.branching:
                raise AddressError(f"hub index {v.index} exceeds branching")
            return
        if isinstance(v.slot, BranchSlot):
            if kind is not Kind.SUCCESSOR:
                raise AddressError(f"branch slot at non-successor height {alpha}")
            if spec.branching is not None and v.slot.index >= spec.branching:
                raise AddressError(f"branch index {v.slot.index} exceeds branching")
            walk(pred, v.inner)
            return
        if kind is not Kind.LIMIT:
            raise AddressError(f"summand slot at non-limit height {alpha}")
        walk(enumerate_below(alpha, v.slot.index), v.inner)

    walk(spec.alpha, v)


# -- distances ----------------------------------------------------------------


def _to_bottom(v: Vertex) -> Dyadic:
    if v == TOP:
        return D_ONE
    if v == BOTTOM:
        return D_ZERO
    if isinstance(v, Hub):
        return D_HALF
    slot = v.slot
    if isinstance(slot, SummandSlot):
        return _to_bottom(v.inner)
    r = _to_bottom(v.inner).half()
    return D_HALF + r if slot.sign == "+" else r


def dist_to_poles(spec: DiamondSpec, v: Vertex) -> tuple[Dyadic, Dyadic]:
    """(distance to bottom, distance to top); the two always sum to 1."""
    r = _to_bottom(v)
    return r, D_ONE - r


def _poles_or_min(ru: Dyadic, rv: Dyadic) -> Dyadic:
    """Distance through the nearer common pole."""
    return min(ru + rv, Dyadic(2) - ru - rv)


def dist(spec: DiamondSpec, u: Vertex, v: Vertex) -> Dyadic:
    """Exact distance between normalized vertices.

    Same-branch opposite-sign pairs are the difference of their pole
    distances; distinct branches or summands route through the nearer pole;
    everything else descends into the shared copy at half scale.
    """
    if u == v:
        return D_ZERO
    ru, rv = _to_bottom(u), _to_bottom(v)
    if isinstance(u, Pole) or isinstance(v, Pole):
        return abs(ru - rv)

    u_limit = isinstance(u, Sub) and isinstance(u.slot, SummandSlot)
    v_limit = isinstance(v, Sub) and isinstance(v.slot, SummandSlot)
    if u_limit != v_limit:
        raise AddressError("vertices come from different stage kinds")

    if u_limit:
        if u.slot.index == v.slot.index:
            return dist(spec, u.inner, v.inner)
        return _poles_or_min(ru, rv)

    bi = u.index if isinstance(u, Hub) else u.slot.index
    bj = v.index if isinstance(v, Hub) else v.slot.index
    if bi != bj:
        return _poles_or_min(ru, rv)
    if isinstance(u, Hub) or isinstance(v, Hub):
        hub_first = isinstance(u, Hub)
        w = v if hub_first else u
        # the hub is the bottom pole of the (i,+) copy and the top of the (i,-) copy
        inner_r = _to_bottom(w.inner)
        d_inner = inner_r if w.slot.sign == "+" else D_ONE - inner_r
        return d_inner.half()
    if u.slot.sign == v.slot.sign:
        return dist(spec, u.inner, v.inner).half()
    return abs(ru - rv)


# -- active pairs -------------------------------------------------------------


@dataclass(frozen=True)
class ActivePair:
    u: Vertex
    v: Vertex
    stage: Ordinal

    def key(self) -> tuple[str, str]:
        a, b = vertex_sort_key(self.u), vertex_sort_key(self.v)
        return (a, b) if a <= b else (b, a)


def active_pairs(spec: DiamondSpec) -> Iterator[ActivePair]:
    """Deterministic deduplicated stream of the distinguished pairs.

    Height 0 contributes only the pole pair; each successor stage contributes
    all pairs of its gadget vertices plus the (lifted) pairs of every copy;
    limit stages take the union over the windowed summands.
    """
    seen: set[tuple[str, str]] = set()

    def emit(u: Vertex, v: Vertex, stage: Ordinal):
        pair = ActivePair(u, v, stage)
        k = pair.key()
        if k not in seen:
            seen.add(k)
            yield pair

    def rec(alpha: Ordinal, wrap) -> Iterator[ActivePair]:
        kind, pred = alpha.classify()
        if kind is Kind.ZERO:
            yield from emit(wrap(TOP), wrap(BOTTOM), alpha)
            return
        if kind is Kind.SUCCESSOR:
            gadget = [wrap(TOP), wrap(BOTTOM)] + [wrap(Hub(i)) for i in range(spec.width)]
            for a in range(len(gadget)):
                for b in range(a + 1, len(gadget)):
                    yield from emit(gadget[a], gadget[b], alpha)
            for i in range(spec.width):
                for sign in ("+", "-"):
                    slot = BranchSlot(i, sign)
                    yield from rec(pred, lambda w, s=slot: wrap(normalize(Sub(s, w))))
            return
        for n in range(spec.trunc.limit_width):
            beta = enumerate_below(alpha, n)
            slot = SummandSlot(n)
            yield from rec(beta, lambda w, s=slot: wrap(normalize(Sub(s, w))))

    yield from rec(spec.alpha, lambda w: w)


# -- finite materializations ---------------------------------------------------


@dataclass
class Materialization:
    spec: DiamondSpec
    vertices: tuple[Vertex, ...]
    edges: tuple[tuple[int, int, Dyadic], ...]
    index: dict = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {v: i for i, v in enumerate(self.vertices)}

    def adjacency(self) -> list[list[tuple[int, Fraction]]]:
        adj: list[list[tuple[int, Fraction]]] = [[] for _ in self.vertices]
        for a, b, w in self.edges:
            wf = w.as_fraction()
            adj[a].append((b, wf))
            adj[b].append((a, wf))
        return adj


def window_vertices(spec: DiamondSpec, cap: int = DEFAULT_VERTEX_CAP) -> list[Vertex]:
    """All vertices of the windowed graph, poles first, in construction order."""
    out: list[Vertex] = [TOP, BOTTOM]

    def rec(alpha: Ordinal, wrap):
        kind, pred = alpha.classify()
        if kind is Kind.ZERO:
            return
        if kind is Kind.SUCCESSOR:
            for i in range(spec.width):
                out.append(wrap(Hub(i)))
                if len(out) > cap:
                    raise BudgetExceededError(f"vertex window exceeds {cap}")
            for i in range(spec.width):
                for sign in ("+", "-"):
                    slot = BranchSlot(i, sign)
                    rec(pred, lambda w, s=slot: wrap(normalize(Sub(s, w))))
            return
        for n in range(spec.trunc.limit_width):
            beta = enumerate_below(alpha, n)
            slot = SummandSlot(n)
            rec(beta, lambda w, s=slot: wrap(normalize(Sub(s, w))))

    rec(spec.alpha, lambda w: w)
    return out


def materialize(spec: DiamondSpec, cap: int = DEFAULT_VERTEX_CAP) -> Materialization:
    """Explicit weighted graph whose shortest-path metric equals dist on the window."""
    verts = window_vertices(spec, cap)
    index = {v: i for i, v in enumerate(verts)}
    edges: list[tuple[int, int, Dyadic]] = []

    def rec(alpha: Ordinal, wrap, weight: Dyadic):
        kind, pred = alpha.classify()
        if kind is Kind.ZERO:
            a, b = index[wrap(TOP)], index[wrap(BOTTOM)]
            edges.append((min(a, b), max(a, b), weight))
            return
        if kind is Kind.SUCCESSOR:
            for i in range(spec.width):
                for sign in ("+", "-"):
                    slot = BranchSlot(i, sign)
                    rec(pred, lambda w, s=slot: wrap(normalize(Sub(s, w))), weight.half())
            return
        for n in range(spec.trunc.limit_width):
            beta = enumerate_below(alpha, n)
            slot = SummandSlot(n)
            rec(beta, lambda w, s=slot: wrap(normalize(Sub(s, w))), weight)

    rec(spec.alpha, lambda w: w, D_ONE)
    dedup = {}
    for a, b, w in edges:
        key = (a, b)
        if key not in dedup or w < dedup[key]:
            dedup[key] = w
    edge_tuple = tuple((a, b, w) for (a, b), w in dedup.items())
    return Materialization(spec, tuple(verts), edge_tuple)


# -- exact shortest-path oracle ------------------------------------------------


def _oracle_from(m: Materialization, src: int) -> list[Fraction | None]:
    # common-denominator integer Dijkstra: exact and fast
    max_exp = max((w.exp for _, _, w in m.edges), default=0)
    scale = 1 << max_exp
    adj: list[list[tuple[int, int]]] = [[] for _ in m.vertices]
    for a, b, w in m.edges:
        wi = w.num << (max_exp - w.exp)
        adj[a].append((b, wi))
        adj[b].append((a, wi))
    INF = None
    distv: list[int | None] = [INF] * len(m.vertices)
    distv[src] = 0
    heap = [(0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if distv[u] is not None and d > distv[u]:
            continue
        for v, w in adj[u]:
            nd = d + w
            if distv[v] is None or nd < distv[v]:
                distv[v] = nd
                heapq.heappush(heap, (nd, v))
    return [None if d is None else Fraction(d, scale) for d in distv]


def oracle_all_from(m: Materialization, u: Vertex) -> dict[Vertex, Fraction]:
    if u not in m.index:
        raise KeyError(f"vertex {format_vertex(u)} not in window")
    row = _oracle_from(m, m.index[u])
    return {v: row[i] for i, v in enumerate(m.vertices)}


def oracle_dist(m: Materialization, u: Vertex, v: Vertex) -> Fraction:
    """Independent exact shortest-path distance on the materialized window."""
    for x in (u, v):
        if x not in m.index:
            raise KeyError(f"vertex {format_vertex(x)} not in window")
    row = _oracle_from(m, m.index[u])
    d = row[m.index[v]]
    if d is None:
        raise RuntimeError("materialization is not connected")
    return d


# -- export ---------------------------------------------------------------------


def materialization_to_json(m: Materialization) -> dict:
    return {
        "alpha": str(m.spec.alpha),
        "branching": "w" if m.spec.branching is None else m.spec.branching,
        "trunc": m.spec.trunc.to_dict(),
        "vertices": [format_vertex(v) for v in m.vertices],
        "edges": [
            [format_vertex(m.vertices[a]), format_vertex(m.vertices[b]), str(w)]
            for a, b, w in m.edges
        ],
    }


def materialization_to_dot(m: Materialization) -> str:
    lines = ["graph diamond {"]
    for v in m.vertices:
        lines.append(f'  "{format_vertex(v)}";')
    for a, b, w in m.edges:
        lines.append(
            f'  "{format_vertex(m.vertices[a])}" -- "{format_vertex(m.vertices[b])}"'
            f' [label="{w}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"

"""Minimum-distortion l1 embedding of small finite metrics via the cut cone.

A finite metric embeds in l1 exactly when it is a nonnegative combination of
cut semimetrics.  For up to 14 points we enumerate all proper cuts, solve

    minimize c  subject to  d <= sum_S lambda_S delta_S <= c * d,  lambda >= 0

with a floating-point LP, and then rebuild the certificate in exact rational
arithmetic: the floating weights are rationalized, rescaled so the lower
inequality holds exactly with equality at its tightest pair, and the reported
distortion is the exact maximum ratio of the rescaled combination.  The
floating solver never decides a verdict: every certificate is re-checked by
an independent exact sandwich test.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .diamond import Materialization, dist, format_vertex
from .dyadic import Dyadic
from .limit_diamond import DInfCode, dinf_dist

MAX_POINTS = 14


@dataclass(frozen=True)
class FiniteMetric:
    labels: tuple[str, ...]
    d: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        n = len(self.labels)
        if len(self.d) != n or any(len(row) != n for row in self.d):
            raise ValueError("distance matrix shape mismatch")
        for i in range(n):
            if self.d[i][i] != 0:
                raise ValueError("diagonal must be zero")
            for j in range(i + 1, n):
                if self.d[i][j] != self.d[j][i]:
                    raise ValueError("matrix must be symmetric")
                if self.d[i][j] <= 0:
                    raise ValueError("off-diagonal distances must be positive")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self.d[i][j] > self.d[i][k] + self.d[k][j]:
                        raise ValueError("triangle inequality fails")

    @property
    def n(self) -> int:
        return len(self.labels)

    def pairs(self):
        for i in range(self.n):
            for j in range(i + 1, self.n):
                yield i, j

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "d": [[str(x) for x in row] for row in self.d],
        }

    @staticmethod
    def from_json(doc: dict) -> "FiniteMetric":
        labels = tuple(doc["labels"])
        d = tuple(tuple(Fraction(x) for x in row) for row in doc["d"])
        return FiniteMetric(labels, d)


def metric_from_materialization(m: Materialization) -> FiniteMetric:
    labels = tuple(format_vertex(v) for v in m.vertices)
    rows = []
    for u in m.vertices:
        rows.append(tuple(dist(m.spec, u, v).as_fraction() for v in m.vertices))
    return FiniteMetric(labels, tuple(rows))


@dataclass(frozen=True)
class CutCombination:
    """Nonnegative weights on proper nonempty vertex subsets.

    Cuts are canonicalized to the side not containing point 0.
    """

    n: int
    weights: tuple[tuple[frozenset, Fraction], ...]

    @staticmethod
    def from_dict(n: int, weights: dict) -> "CutCombination":
        canon = {}
        for subset, w in weights.items():
            w = Fraction(w)
            if w < 0:
                raise ValueError("cut weights must be nonnegative")
            if w == 0:
                continue
            s = frozenset(subset)
            if not s or len(s) >= n:
                raise ValueError("cuts must be proper and nonempty")
            if 0 in s:
                s = frozenset(range(n)) - s
            canon[s] = canon.get(s, Fraction(0)) + w
        ordered = tuple(sorted(canon.items(), key=lambda kv: sorted(kv[0])))
        return CutCombination(n, ordered)

    def value(self, i: int, j: int) -> Fraction:
        total = Fraction(0)
        for s, w in self.weights:
            if (i in s) != (j in s):
                total += w
        return total

    def to_json(self) -> list:
        return [{"subset": sorted(s), "weight": str(w)} for s, w in self.weights]

    @staticmethod
    def from_json(n: int, doc: list) -> "CutCombination":
        return CutCombination.from_dict(
            n, {frozenset(entry["subset"]): Fraction(entry["weight"]) for entry in doc}
        )


def _proper_cuts(n: int):
    # subsets of {1..n-1}: one representative per cut
    for mask in range(1, 1 << (n - 1)):
        yield frozenset(i + 1 for i in range(n - 1) if mask >> i & 1)


def verify_cut_sandwich(metric: FiniteMetric, cuts: CutCombination, c) -> tuple[bool, tuple | None]:
    """Exact check of d <= sum lambda delta_S <= c*d on all pairs; returns a
    witness pair on failure."""
    c = Fraction(c)
    for i, j in metric.pairs():
        val = cuts.value(i, j)
        if val < metric.d[i][j] or val > c * metric.d[i][j]:
            return False, (metric.labels[i], metric.labels[j])
    return True, None


def min_distortion_l1(metric: FiniteMetric) -> tuple[Fraction, CutCombination, dict]:
    """Exact-certificate minimum-distortion embedding oracle.

    Returns (c, cuts, status): c is the exact distortion of the returned
    rational cut combination (within solver accuracy of the true LP optimum),
    and verify_cut_sandwich(metric, cuts, c) passes.
    """
    n = metric.n
    if n > MAX_POINTS:
        raise ValueError(f"metric has {n} points; the cut enumeration caps at {MAX_POINTS}")
    if n < 2:
        raise ValueError("need at least two points")
    cut_list = list(_proper_cuts(n))
    pair_list = list(metric.pairs())
    ncuts, npairs = len(cut_list), len(pair_list)

    sep = np.zeros((npairs, ncuts))
    for col, s in enumerate(cut_list):
        for row, (i, j) in enumerate(pair_list):
            if (i in s) != (j in s):
                sep[row, col] = 1.0
    dvec = np.array([float(metric.d[i][j]) for i, j in pair_list])

    # variables: lambda_1..lambda_ncuts, c
    a_ub = np.zeros((2 * npairs, ncuts + 1))
    b_ub = np.zeros(2 * npairs)
    a_ub[:npairs, :ncuts] = -sep  # -sum lambda delta <= -d
    b_ub[:npairs] = -dvec
    a_ub[npairs:, :ncuts] = sep  # sum lambda delta - c d <= 0
    a_ub[npairs:, ncuts] = -dvec
    obj = np.zeros(ncuts + 1)
    obj[ncuts] = 1.0
    res = linprog(obj, A_ub=a_ub, b_ub=b_ub, bounds=[(0, None)] * ncuts + [(1, None)])
    if not res.success:
        raise RuntimeError(f"LP solver failed: {res.message}")

    weights = {}
    for col, s in enumerate(cut_list):
        x = float(res.x[col])
        if x > 1e-12:
            weights[s] = Fraction(x)  # exact float-to-rational conversion
    cuts = CutCombination.from_dict(n, weights)
    lo = min((cuts.value(i, j) / metric.d[i][j] for i, j in pair_list), default=Fraction(0))
    if lo <= 0:
        # degenerate floating solution; pad with singleton cuts and retry
        pad = {s: w for s, w in cuts.weights}
        for i in range(1, n):
            s = frozenset([i])
            pad[s] = pad.get(s, Fraction(0)) + Fraction(1, 10**6)
        cuts = CutCombination.from_dict(n, pad)
        lo = min(cuts.value(i, j) / metric.d[i][j] for i, j in pair_list)
    scaled = CutCombination(n, tuple((s, w / lo) for s, w in cuts.weights))
    c = max(scaled.value(i, j) / metric.d[i][j] for i, j in pair_list)
    ok, witness = verify_cut_sandwich(metric, scaled, c)
    if not ok:
        raise RuntimeError(f"internal certificate check failed at {witness}")
    status = {"lp_objective": float(res.fun), "cuts_used": len(scaled.weights)}
    return c, scaled, status


def cuts_to_embedding(cuts: CutCombination) -> tuple[list[tuple[Fraction, ...]], list["StepFunction"]]:
    """Coordinates (one per cut: weight times membership) and the equivalent
    step functions on dyadic intervals; pairwise l1 distances reproduce the
    cut combination exactly."""
    ncuts = len(cuts.weights)
    coords = []
    for p in range(cuts.n):
        coords.append(tuple(w if p in s else Fraction(0) for s, w in cuts.weights))
    k = max(1, (ncuts - 1).bit_length()) if ncuts else 1
    cells = 1 << k
    steps = []
    for p in range(cuts.n):
        values = []
        for idx in range(cells):
            if idx < ncuts:
                s, w = cuts.weights[idx]
                values.append(w * cells if p in s else Fraction(0))
            else:
                values.append(Fraction(0))
        breaks = tuple(Fraction(i, cells) for i in range(1, cells))
        steps.append(StepFunction(breaks, tuple(values)))
    return coords, steps


# -- exact step functions on [0, 1] ---------------------------------------------


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function on [0, 1): values[i] on [breaks[i-1], breaks[i])."""

    breaks: tuple[Fraction, ...]  # strictly increasing, inside (0, 1)
    values: tuple[Fraction, ...]  # len(breaks) + 1 entries

    def __post_init__(self):
        if len(self.values) != len(self.breaks) + 1:
            raise ValueError("values must have one more entry than breaks")
        prev = Fraction(0)
        for b in self.breaks:
            if not prev < b < 1:
                raise ValueError("breaks must increase strictly inside (0, 1)")
            prev = b

    @staticmethod
    def constant(value) -> "StepFunction":
        return StepFunction((), (Fraction(value),))

    @staticmethod
    def indicator(a, b) -> "StepFunction":
        """Characteristic function of [a, b) inside [0, 1)."""
        a, b = Fraction(a), Fraction(b)
        if not 0 <= a < b <= 1:
            raise ValueError("need 0 <= a < b <= 1")
        breaks = tuple(x for x in (a, b) if 0 < x < 1)
        values = []
        if a > 0:
            values.append(Fraction(0))
        values.append(Fraction(1))
        if b < 1:
            values.append(Fraction(0))
        return StepFunction(breaks, tuple(values))

    def _cells(self):
        pts = (Fraction(0),) + self.breaks + (Fraction(1),)
        for i, v in enumerate(self.values):
            yield pts[i], pts[i + 1], v

    def scale(self, c) -> "StepFunction":
        c = Fraction(c)
        return StepFunction(self.breaks, tuple(c * v for v in self.values)).normalized()

    def add(self, other: "StepFunction") -> "StepFunction":
        merged = sorted(set(self.breaks) | set(other.breaks))
        values = []
        for lo in [Fraction(0)] + merged:
            values.append(self._value_at(lo) + other._value_at(lo))
        return StepFunction(tuple(merged), tuple(values)).normalized()

    def sub(self, other: "StepFunction") -> "StepFunction":
        return self.add(other.scale(-1))

    def _value_at(self, x: Fraction) -> Fraction:
        idx = 0
        for b in self.breaks:
            if x >= b:
                idx += 1
            else:
                break
        return self.values[idx]

    def l1_norm(self) -> Fraction:
        return sum((abs(v) * (hi - lo) for lo, hi, v in self._cells()), Fraction(0))

    def normalized(self) -> "StepFunction":
        """Merge adjacent cells with equal values."""
        breaks, values = [], [self.values[0]]
        for b, v in zip(self.breaks, self.values[1:]):
            if v == values[-1]:
                continue
            breaks.append(b)
            values.append(v)
        return StepFunction(tuple(breaks), tuple(values))


def l1_distance(f: StepFunction, g: StepFunction) -> Fraction:
    return f.sub(g).l1_norm()


def check_l1_provider(provider, codes: list[DInfCode]) -> tuple[bool, tuple | None]:
    """Verify a user-supplied limit-diamond-to-L1 map on all pairs of the
    given codes: (1/2) d <= ||Psi(x) - Psi(y)||_1 <= d, exactly."""
    images = [provider(c) for c in codes]
    for i in range(len(codes)):
        for j in range(i + 1, len(codes)):
            d = dinf_dist(codes[i], codes[j]).as_fraction()
            gap = l1_distance(images[i], images[j])
            if gap < d / 2 or gap > d:
                return False, (codes[i], codes[j])
    return True, None

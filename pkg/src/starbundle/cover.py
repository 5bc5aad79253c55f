"""Good covers of flat tori by axis-aligned rectangles with explicit lifts.

All branch bookkeeping is integral: for each overlapping pair of charts the
relative lift (the integer translation making the lifted rectangles meet) is
unique because chart widths stay below 1/2, and triple lifts are forced by
pair lifts.  Contractibility is rectangle geometry, checked exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Mapping, Sequence

from .manifold import Torus


@dataclass(frozen=True)
class Rect:
    """Open axis-aligned rectangle in lifted coordinates."""

    center: tuple[Fraction, ...]
    halfwidth: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.center) != len(self.halfwidth):
            raise ValueError("center/halfwidth dimension mismatch")
        if any(w <= 0 for w in self.halfwidth):
            raise ValueError("halfwidths must be positive")

    @property
    def dim(self) -> int:
        return len(self.center)

    def bounds(self, axis: int) -> tuple[Fraction, Fraction]:
        return (
            self.center[axis] - self.halfwidth[axis],
            self.center[axis] + self.halfwidth[axis],
        )

    def translated(self, shift: Sequence[int]) -> "Rect":
        return Rect(
            tuple(c + s for c, s in zip(self.center, shift)), self.halfwidth
        )

    def intersect(self, other: "Rect") -> "Rect | None":
        centers, widths = [], []
        for ax in range(self.dim):
            lo = max(self.bounds(ax)[0], other.bounds(ax)[0])
            hi = min(self.bounds(ax)[1], other.bounds(ax)[1])
            if lo >= hi:
                return None
            centers.append((lo + hi) / 2)
            widths.append((hi - lo) / 2)
        return Rect(tuple(centers), tuple(widths))

    def contains(self, point: Sequence[Fraction]) -> bool:
        return all(
            self.bounds(ax)[0] < Fraction(p) < self.bounds(ax)[1]
            for ax, p in enumerate(point)
        )

    def to_json(self) -> dict:
        return {
            "center": [str(c) for c in self.center],
            "halfwidth": [str(w) for w in self.halfwidth],
        }

    @staticmethod
    def from_json(data: Mapping) -> "Rect":
        return Rect(
            tuple(Fraction(c) for c in data["center"]),
            tuple(Fraction(w) for w in data["halfwidth"]),
        )


def _axis_lifts(c1: Fraction, w1: Fraction, c2: Fraction, w2: Fraction) -> list[int]:
    """Integers n with (c1-w1, c1+w1) meeting (c2+n-w2, c2+n+w2)."""
    out = []
    lo = c1 - w1 - (c2 + w2)
    hi = c1 + w1 - (c2 - w2)
    n = int(lo) - 1
    while n <= int(hi) + 1:
        if lo < n < hi:
            out.append(n)
        n += 1
    return out


class GoodCover:
    """Rectangle cover of a torus with nerve pairs/triples and chosen lifts."""

    def __init__(self, torus: Torus, charts: Sequence[Rect], grid_shape: tuple[int, ...] | None = None):
        self.torus = torus
        self.charts = tuple(charts)
        self.grid_shape = grid_shape
        dim = torus.dim
        for r in self.charts:
            if r.dim != dim:
                raise ValueError("chart dimension mismatch")
            if any(w >= Fraction(1, 2) for w in r.halfwidth):
                raise ValueError("chart halfwidths must stay below 1/2")
        self._check_coverage()
        self._pair_lifts: dict[tuple[int, int], tuple[int, ...]] = {}
        self._build_nerve()

    # -- constructors ------------------------------------------------------

    @staticmethod
    def grid(torus: Torus, n: int, halfwidth: Fraction | None = None) -> "GoodCover":
        """n x ... x n grid of congruent rectangles, centers at lattice/n."""
        if n < 3:
            raise ValueError("grid covers need n >= 3 per axis to stay good")
        dim = torus.dim
        w = halfwidth if halfwidth is not None else Fraction(5, 8 * n)
        if not Fraction(1, 2 * n) < w < Fraction(1, 2):
            raise ValueError("halfwidth must cover the grid gap and embed")
        charts = []
        for coords in product(range(n), repeat=dim):
            center = tuple(Fraction(c, n) for c in coords)
            charts.append(Rect(center, (w,) * dim))
        return GoodCover(torus, charts, grid_shape=(n,) * dim)

    # -- validation ----------------------------------------------------------

    def _check_coverage(self):
        # per-axis arc union must cover the circle (sufficient for product
        # rectangles on a product grid; exact interval sweep on open arcs,
        # strict overlaps required so no boundary point is missed)
        dim = self.torus.dim
        for ax in range(dim):
            arcs = []
            for r in self.charts:
                lo, hi = r.bounds(ax)
                start = lo % 1
                arcs.append((start, start + (hi - lo)))
            arcs.sort()
            extended = sorted(arcs + [(s + 1, e + 1) for s, e in arcs])
            frontier = extended[0][1]
            target = extended[0][0] + 1
            for s, e in extended[1:]:
                if frontier > target:
                    break
                if s >= frontier:
                    raise ValueError(f"axis {ax}: coverage gap near {frontier}")
                frontier = max(frontier, e)
            if frontier <= target:
                raise ValueError(f"axis {ax}: charts do not wrap the circle")

    def _build_nerve(self):
        n = len(self.charts)
        pairs = []
        for i, j in combinations(range(n), 2):
            lifts_per_axis = []
            for ax in range(self.torus.dim):
                c1, w1 = self.charts[i].center[ax], self.charts[i].halfwidth[ax]
                c2, w2 = self.charts[j].center[ax], self.charts[j].halfwidth[ax]
                ns = _axis_lifts(c1, w1, c2, w2)
                if len(ns) > 1:
                    raise ValueError(
                        f"overlap of charts {i},{j} is disconnected on axis {ax}; "
                        "not a good cover"
                    )
                lifts_per_axis.append(ns)
            if all(ns for ns in lifts_per_axis):
                lift = tuple(ns[0] for ns in lifts_per_axis)
                self._pair_lifts[(i, j)] = lift
                pairs.append((i, j))
        self.pairs = tuple(pairs)
        triples = []
        for i, j, k in combinations(range(n), 3):
            if (i, j) not in self._pair_lifts or (i, k) not in self._pair_lifts:
                continue
            if (j, k) not in self._pair_lifts:
                continue
            mj = self._pair_lifts[(i, j)]
            mk = self._pair_lifts[(i, k)]
            rect = self.triple_rect(i, j, k)
            if rect is None:
                continue
            # pair lift uniqueness forces consistency; assert it
            njk = self._pair_lifts[(j, k)]
            if tuple(a - b for a, b in zip(mk, mj)) != njk:
                raise AssertionError("triple lift inconsistent with pair lifts")
            triples.append((i, j, k))
        self.triples = tuple(triples)

    # -- nerve queries ------------------------------------------------------------

    def pair_lift(self, i: int, j: int) -> tuple[int, ...]:
        """Integer lift applied to chart j in chart i's frame."""
        if i == j:
            return (0,) * self.torus.dim
        if (i, j) in self._pair_lifts:
            return self._pair_lifts[(i, j)]
        if (j, i) in self._pair_lifts:
            return tuple(-s for s in self._pair_lifts[(j, i)])
        raise KeyError(f"charts {i} and {j} do not overlap")

    def overlaps(self, i: int, j: int) -> bool:
        if i == j:
            return True
        return (min(i, j), max(i, j)) in self._pair_lifts

    def pair_rect(self, i: int, j: int) -> Rect:
        """Overlap rectangle in chart i's frame."""
        lift = self.pair_lift(i, j)
        rect = self.charts[i].intersect(self.charts[j].translated(lift))
        if rect is None:
            raise KeyError(f"charts {i} and {j} do not overlap")
        return rect

    def triple_rect(self, i: int, j: int, k: int) -> Rect | None:
        mj = self.pair_lift(i, j)
        mk = self.pair_lift(i, k)
        rect = self.charts[i].intersect(self.charts[j].translated(mj))
        if rect is None:
            return None
        return rect.intersect(self.charts[k].translated(mk))

    def complete_pairwise(self) -> bool:
        n = len(self.charts)
        return len(self.pairs) == n * (n - 1) // 2

    # -- serialization --------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "dim": self.torus.dim,
            "charts": [r.to_json() for r in self.charts],
            "lifts": {
                "pairs": {
                    f"{i},{j}": list(self._pair_lifts[(i, j)]) for i, j in self.pairs
                },
                "triples": {
                    f"{i},{j},{k}": [
                        list(self.pair_lift(i, j)),
                        list(self.pair_lift(i, k)),
                    ]
                    for i, j, k in self.triples
                },
            },
            "grid": list(self.grid_shape) if self.grid_shape else None,
        }

    @staticmethod
    def from_json(data: Mapping) -> "GoodCover":
        torus = Torus(int(data["dim"]))
        charts = [Rect.from_json(r) for r in data["charts"]]
        grid = tuple(data["grid"]) if data.get("grid") else None
        return GoodCover(torus, charts, grid_shape=grid)

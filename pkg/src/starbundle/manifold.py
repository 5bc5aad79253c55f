"""Supported base manifolds and generic chart domains for forms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .chartfn import ChartSpace


def _default_torus_names(n: int) -> tuple[str, ...]:
    if n == 1:
        return ("x",)
    if n == 2:
        return ("x", "y")
    if n % 2 == 0:
        pairs = []
        for j in range(1, n // 2 + 1):
            pairs += [f"x{j}", f"y{j}"]
        return tuple(pairs)
    return tuple(f"x{j}" for j in range(1, n + 1))


@dataclass(frozen=True)
class Torus:
    """Flat torus R^n / Z^n with unit lattice and unit volume."""

    n: int
    names: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("torus dimension must be >= 1")
        if self.names is None:
            object.__setattr__(self, "names", _default_torus_names(self.n))
        if len(self.names) != self.n:
            raise ValueError("coordinate names must match dimension")

    @property
    def dim(self) -> int:
        return self.n

    @property
    def space(self) -> ChartSpace:
        return ChartSpace.torus(self.names)

    @property
    def covectors(self) -> tuple[str, ...]:
        return tuple(f"d{n}" for n in self.names)

    @property
    def is_compact(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {"type": "torus", "n": self.n, "names": list(self.names)}


@dataclass(frozen=True)
class Sphere2:
    """Round 2-sphere with form algebra restricted to span{1, area form}.

    The area form is normalized to total integral 1.
    """

    @property
    def dim(self) -> int:
        return 2

    @property
    def space(self) -> ChartSpace:
        return ChartSpace.euclidean(())

    @property
    def covectors(self) -> tuple[str, ...]:
        return ("s1", "s2")

    @property
    def is_compact(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {"type": "sphere2"}


@dataclass(frozen=True)
class EuclideanChart:
    """An open chart of R^n with named coordinates."""

    names: tuple[str, ...]

    def __post_init__(self):
        if len(self.names) < 1:
            raise ValueError("chart needs at least one coordinate")

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def space(self) -> ChartSpace:
        return ChartSpace.euclidean(self.names)

    @property
    def covectors(self) -> tuple[str, ...]:
        return tuple(f"d{n}" for n in self.names)

    @property
    def is_compact(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {"type": "euclidean", "names": list(self.names)}


@dataclass(frozen=True)
class ProductChart:
    """Generic domain over an explicit ChartSpace (lifted pair/triple charts).

    Covectors correspond to the coordinates; there is no global integration.
    """

    chart_space: ChartSpace

    @property
    def dim(self) -> int:
        return self.chart_space.dim

    @property
    def space(self) -> ChartSpace:
        return self.chart_space

    @property
    def covectors(self) -> tuple[str, ...]:
        return tuple(f"d{n}" for n in self.chart_space.names)

    @property
    def is_compact(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {"type": "product-chart", "space": self.chart_space.to_json()}


Manifold = Torus | Sphere2 | EuclideanChart | ProductChart


def manifold_from_json(data: Mapping) -> Manifold:
    t = data["type"]
    if t == "torus":
        return Torus(int(data["n"]), tuple(data["names"]))
    if t == "sphere2":
        return Sphere2()
    if t == "euclidean":
        return EuclideanChart(tuple(data["names"]))
    if t == "product-chart":
        return ProductChart(ChartSpace.from_json(data["space"]))
    raise ValueError(f"unknown manifold type {t!r}")

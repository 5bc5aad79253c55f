"""Pure star products with exponential-of-Poisson bidifferential operators.

The order-m bidifferential operator is Pi^m/m! applied as m-fold contracted
derivatives:

    B_m(a, b) = (1/m!) sum Pi^{i1 j1} ... Pi^{im jm} (d_{i1..im} a)(d_{j1..jm} b)

so B_0 is the pointwise product and B_1 is the Poisson bracket.  For a
constant bivector this product is associative at every truncation order,
which the toolkit verifies by exact expansion rather than assuming.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import factorial
from typing import Iterable, Sequence

from .chartfn import ChartFunction
from .poisson import PoissonStructure
from .scalar import Scalar
from .series import FormalSeries

StarInput = ChartFunction | FormalSeries


def _derive_multi(f: ChartFunction, order: tuple[int, ...], cache: dict) -> ChartFunction:
    """Iterated partial derivative d^order f with memoization."""
    if all(o == 0 for o in order):
        return f
    got = cache.get(order)
    if got is not None:
        return got
    i = next(k for k, o in enumerate(order) if o > 0)
    prev = tuple(o - (1 if k == i else 0) for k, o in enumerate(order))
    result = _derive_multi(f, prev, cache).derive(f.space.names[i])
    cache[order] = result
    return result


@dataclass(frozen=True)
class PureStarProduct:
    """Star product generated by powers of a constant Poisson bivector."""

    poisson: PoissonStructure

    @property
    def space(self):
        return self.poisson.space

    def _promote(self, a: StarInput, K: int | None) -> FormalSeries:
        if isinstance(a, ChartFunction):
            if K is None:
                raise ValueError("a truncation order K is required for plain functions")
            return FormalSeries.constant(a, K)
        return a

    def bidiff(self, m: int, a: ChartFunction, b: ChartFunction) -> ChartFunction:
        """The order-m bidifferential operator applied to (a, b)."""
        if a.space != self.space or b.space != self.space:
            raise ValueError("star-product inputs live on the wrong chart")
        if m == 0:
            return a * b
        if a.is_zero() or b.is_zero():
            return ChartFunction.zero(self.space)
        n = self.space.dim
        entries = self.poisson.nonzero_entries()
        cache_a: dict = {}
        cache_b: dict = {}
        total = ChartFunction.zero(self.space)
        for multiset in combinations_with_replacement(range(len(entries)), m):
            weight = Scalar.one()
            order_a = [0] * n
            order_b = [0] * n
            run = 1
            prev = None
            mult = 1
            for idx in multiset:
                i, j, s = entries[idx]
                weight = weight * s
                order_a[i] += 1
                order_b[j] += 1
                if idx == prev:
                    mult += 1
                    run *= mult
                else:
                    prev, mult = idx, 1
            da = _derive_multi(a, tuple(order_a), cache_a)
            if da.is_zero():
                continue
            db = _derive_multi(b, tuple(order_b), cache_b)
            if db.is_zero():
                continue
            coeff = weight * Scalar.rational(1) / Scalar.rational(run)
            total = total + (da * db).scale(coeff)
        return total

    def multiply(self, a: StarInput, b: StarInput, K: int | None = None) -> FormalSeries:
        """a * b with c_k = sum_{j+l+m=k} B_m(a_j, b_l)."""
        sa = self._promote(a, K)
        sb = self._promote(b, K)
        if sa.space != self.space or sb.space != self.space:
            raise ValueError("star-product inputs live on the wrong chart")
        kmax = min(sa.K, sb.K)
        if K is not None:
            kmax = min(kmax, K)
        coeffs = []
        for k in range(kmax + 1):
            c = ChartFunction.zero(self.space)
            for j in range(k + 1):
                if sa.coeffs[j].is_zero():
                    continue
                for l in range(k - j + 1):
                    m = k - j - l
                    if sb.coeffs[l].is_zero():
                        continue
                    c = c + self.bidiff(m, sa.coeffs[j], sb.coeffs[l])
            coeffs.append(c)
        return FormalSeries(self.space, coeffs)

    def commutator(self, a: StarInput, b: StarInput, K: int | None = None) -> FormalSeries:
        return self.multiply(a, b, K) - self.multiply(b, a, K)


def star_multiply(a: StarInput, b: StarInput, product: PureStarProduct, K: int | None = None) -> FormalSeries:
    return product.multiply(a, b, K)


def star_commutator(a: StarInput, b: StarInput, product: PureStarProduct, K: int | None = None) -> FormalSeries:
    return product.commutator(a, b, K)


@dataclass(frozen=True)
class AssociativityReport:
    requested_order: int
    verified_order: int
    samples: int
    violations: tuple[dict, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "requested_order": self.requested_order,
            "verified_order": self.verified_order,
            "samples": self.samples,
            "violations": [dict(v) for v in self.violations],
        }


def _associator_defect(product, triple, K):
    a, b, c = triple
    left = product.multiply(product.multiply(a, b, K), c, K)
    right = product.multiply(a, product.multiply(b, c, K), K)
    return left - right


def _assoc_worker(args):
    product, index, triple, K = args
    defect = _associator_defect(product, triple, K)
    order = defect.first_nonzero_order()
    if order is None:
        return None
    return {
        "sample": index,
        "first_nonzero_order": order,
        "coefficient": str(defect.coefficient(order)),
    }


def check_associativity(
    product: PureStarProduct,
    samples: Sequence[tuple[ChartFunction, ChartFunction, ChartFunction]],
    K: int,
) -> AssociativityReport:
    """Expand (a*b)*c - a*(b*c) exactly for every sampled triple.

    Violations are report content, not exceptions.  Honors the
    STARBUNDLE_PARALLEL env var for the embarrassingly parallel sweep.
    """
    jobs = [(product, i, triple, K) for i, triple in enumerate(samples)]
    workers = int(os.environ.get("STARBUNDLE_PARALLEL", "1") or "1")
    if workers > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_assoc_worker, jobs))
    else:
        results = [_assoc_worker(job) for job in jobs]
    violations = tuple(r for r in results if r is not None)
    verified = K if not violations else min(v["first_nonzero_order"] for v in violations) - 1
    return AssociativityReport(
        requested_order=K,
        verified_order=verified,
        samples=len(jobs),
        violations=violations,
    )


def star_trace(a: StarInput, product: PureStarProduct, K: int | None = None) -> FormalSeries:
    """Order-by-order torus mean; the unique normalized trace candidate.

    Requires coefficients that are genuine functions on the torus (finite
    Fourier sums with no lifted-coordinate dependence).
    """
    space = product.space
    if not all(space.periodic):
        raise ValueError("the star-algebra trace is defined on torus charts only")
    series = product._promote(a, K)
    if series.space != space:
        raise ValueError("series lives on the wrong chart")
    consts = []
    for c in series.coeffs:
        mean = c.torus_mean()
        consts.append(ChartFunction.constant(space, mean))
    return FormalSeries(space, consts)

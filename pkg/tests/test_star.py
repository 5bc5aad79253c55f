import itertools
from fractions import Fraction
from math import factorial

import pytest

from starbundle.chartfn import ChartFunction, ChartSpace
from starbundle.poisson import PoissonStructure, poisson_bracket
from starbundle.scalar import CScalar, Scalar
from starbundle.series import FormalSeries
from starbundle.star import PureStarProduct, check_associativity, star_commutator, star_multiply, star_trace

from conftest import random_poly, random_trig

R2 = ChartSpace.euclidean(("x", "y"))
R4 = ChartSpace.euclidean(("x1", "y1", "x2", "y2"))
T2 = ChartSpace.torus(("x", "y"))

P2 = PoissonStructure.standard(R2)
P4 = PoissonStructure.standard(R4)
PT2 = PoissonStructure.standard(T2)

S2 = PureStarProduct(P2)
S4 = PureStarProduct(P4)
ST2 = PureStarProduct(PT2)

X = ChartFunction.variable(R2, "x")
Y = ChartFunction.variable(R2, "y")


def naive_bidiff(product, m, a, b):
    """Independent oracle: raw sum over index sequences, weight 1/m!."""
    entries = product.poisson.nonzero_entries()
    names = product.space.names
    total = ChartFunction.zero(product.space)
    for seq in itertools.product(entries, repeat=m):
        coeff = Scalar.one()
        da, db = a, b
        for i, j, s in seq:
            coeff = coeff * s
            da = da.derive(names[i])
            db = db.derive(names[j])
        total = total + (da * db).scale(coeff)
    return total.scale(Fraction(1, factorial(m)))


def test_bidiff_matches_naive_oracle(rng):
    for product, space in [(S2, R2), (S4, R4)]:
        for _ in range(6):
            a = random_poly(space, rng, max_deg=3, n_terms=3)
            b = random_poly(space, rng, max_deg=3, n_terms=3)
            for m in range(4):
                assert product.bidiff(m, a, b) == naive_bidiff(product, m, a, b)
    for _ in range(4):
        a = random_trig(T2, rng, max_freq=1, n_terms=2)
        b = random_trig(T2, rng, max_freq=1, n_terms=2)
        for m in range(3):
            assert ST2.bidiff(m, a, b) == naive_bidiff(ST2, m, a, b)


def test_poisson_bracket_examples():
    assert poisson_bracket(X, Y, P2) == ChartFunction.one(R2)
    f = X * X * Y + Y
    assert poisson_bracket(f, f, P2).is_zero()
    assert poisson_bracket(X * X, Y, P2) == X.scale(2)


def test_poisson_jacobi_randomized(rng):
    for _ in range(10):
        a = random_poly(R4, rng, max_deg=2, n_terms=3)
        b = random_poly(R4, rng, max_deg=2, n_terms=3)
        c = random_poly(R4, rng, max_deg=2, n_terms=3)
        jac = (
            poisson_bracket(poisson_bracket(a, b, P4), c, P4)
            + poisson_bracket(poisson_bracket(b, c, P4), a, P4)
            + poisson_bracket(poisson_bracket(c, a, P4), b, P4)
        )
        assert jac.is_zero()


def test_poisson_dimension_mismatch():
    with pytest.raises(ValueError):
        poisson_bracket(ChartFunction.variable(R4, "x1"), Y, P2)


def test_star_unit_law(rng):
    one = ChartFunction.one(R2)
    for _ in range(5):
        a = random_poly(R2, rng)
        sa = FormalSeries.constant(a, 4)
        assert star_multiply(one, a, S2, 4) == sa
        assert star_multiply(a, one, S2, 4) == sa


def test_star_frozen_examples():
    # x * y = xy + t
    got = star_multiply(X, Y, S2, 2)
    assert got.coefficient(0) == X * Y
    assert got.coefficient(1) == ChartFunction.one(R2)
    assert got.coefficient(2).is_zero()
    # x^2 * y^2 = x^2 y^2 + 4t xy + 2 t^2
    got = star_multiply(X * X, Y * Y, S2, 3)
    assert got.coefficient(0) == X * X * Y * Y
    assert got.coefficient(1) == (X * Y).scale(4)
    assert got.coefficient(2) == ChartFunction.constant(R2, 2)
    assert got.coefficient(3).is_zero()


def test_star_commutator_examples(rng):
    # [x, y] = 2t
    comm = star_commutator(X, Y, S2, 3)
    assert comm.coefficient(0).is_zero()
    assert comm.coefficient(1) == ChartFunction.constant(R2, 2)
    # [1, a] = 0 and [a, a] = 0
    a = random_poly(R2, rng)
    assert star_commutator(ChartFunction.one(R2), a, S2, 3).is_zero()
    assert star_commutator(a, a, S2, 3).is_zero()
    # t^1 coefficient of [a, b] is 2{a0, b0}
    b = random_poly(R2, rng)
    comm = star_commutator(a, b, S2, 2)
    assert comm.coefficient(1) == poisson_bracket(a, b, P2).scale(2)


def test_first_order_normal_form_monomial_span():
    # B_0 = pointwise product and antisym(B_1) = Poisson bracket on all
    # monomials of degree <= 3
    monos = []
    for dx in range(4):
        for dy in range(4 - dx):
            monos.append(ChartFunction.monomial(R2, {"x": dx, "y": dy}))
    for a in monos:
        for b in monos:
            assert S2.bidiff(0, a, b) == a * b
            anti = (S2.bidiff(1, a, b) - S2.bidiff(1, b, a)).scale(Fraction(1, 2))
            assert anti == poisson_bracket(a, b, P2)


def test_derivative_count_bound():
    # the order-k operator applies exactly k derivatives to each argument:
    # on monomials every surviving term drops total degree by exactly k per side
    a = ChartFunction.monomial(R2, {"x": 2, "y": 1})
    b = ChartFunction.monomial(R2, {"x": 1, "y": 2})
    for k in range(4):
        out = S2.bidiff(k, a, b)
        expected_degree = (3 - k) + (3 - k)
        for (mon, _freq), _c in out.terms.items():
            assert sum(mon) == expected_degree
    assert S2.bidiff(4, a, b).is_zero()  # more derivatives than degree


def test_min_truncation_semantics(rng):
    a = FormalSeries.constant(random_poly(R2, rng), 5)
    b = FormalSeries.constant(random_poly(R2, rng), 3)
    assert star_multiply(a, b, S2).K == 3
    assert (a + b).K == 3


def test_associativity_random_triples(rng):
    triples = []
    for _ in range(6):
        triples.append(tuple(random_poly(R2, rng, max_deg=3, n_terms=2) for _ in range(3)))
    for _ in range(3):
        triples.append(tuple(random_poly(R4, rng, max_deg=2, n_terms=2) for _ in range(3)))
    report2 = check_associativity(S2, triples[:6], K=4)
    report4 = check_associativity(S4, triples[6:], K=3)
    assert report2.passed and report2.verified_order == 4
    assert report4.passed and report4.verified_order == 3


def test_associativity_with_unit_triple(rng):
    one = ChartFunction.one(R2)
    triple = (one, random_poly(R2, rng), random_poly(R2, rng))
    report = check_associativity(S2, [triple], K=5)
    assert report.passed


def test_associativity_detects_violation():
    # a deliberately broken first-order term a*(d_x b) is not a Hochschild
    # cocycle: the associator picks up -a*b*(d_x c) already at order t^1
    class Broken(PureStarProduct):
        def bidiff(self, m, a, b):
            if m == 1:
                return a * b.derive("x")
            return super().bidiff(m, a, b)

    broken = Broken(P2)
    triple = (Y, Y, X)
    report = check_associativity(broken, [triple], K=3)
    assert not report.passed
    assert report.violations[0]["first_nonzero_order"] == 1
    assert report.verified_order == 0


def test_star_trace_examples():
    one = ChartFunction.one(T2)
    ex = ChartFunction.fourier(T2, {"x": 1})
    ey = ChartFunction.fourier(T2, {"y": 1})
    tr_one = star_trace(one, ST2, 3)
    assert tr_one.coefficient(0) == one
    assert all(tr_one.coefficient(k).is_zero() for k in (1, 2, 3))
    assert star_trace(ex, ST2, 3).is_zero()
    comm = ST2.commutator(ex, ey, 5)
    assert star_trace(comm, ST2).is_zero()


def test_star_trace_property_randomized(rng):
    for _ in range(8):
        a = random_trig(T2, rng, max_freq=2, n_terms=2, real=False)
        b = random_trig(T2, rng, max_freq=2, n_terms=2, real=False)
        lhs = star_trace(ST2.multiply(a, b, 5), ST2)
        rhs = star_trace(ST2.multiply(b, a, 5), ST2)
        assert lhs == rhs


def test_star_trace_rejects_non_torus():
    with pytest.raises(ValueError):
        star_trace(X, S2, 2)


def test_star_trace_rejects_lifted_coordinates():
    lifted = ChartFunction.variable(T2, "x")
    with pytest.raises(ValueError):
        star_trace(lifted, ST2, 2)

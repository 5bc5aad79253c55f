from fractions import Fraction

import pytest

from starbundle.bundle import build_local_line_bundle
from starbundle.cech import constant_two_form, solve_cech
from starbundle.chartfn import ChartFunction
from starbundle.cover import GoodCover
from starbundle.forms import DifferentialForm
from starbundle.gluing import (
    FormalQuotientWeight,
    GluingError,
    PartitionOfUnity,
    check_product_additivity,
    chern_class,
    connection_difference,
    glue_hermitian,
    glue_multiplicative_connection,
    left_curvature,
)
from starbundle.manifold import ProductChart, Torus
from starbundle.scalar import Scalar

T2 = Torus(2)
COVER = GoodCover.grid(T2, 3)


def make_bundle(theta):
    return build_local_line_bundle(solve_cech(constant_two_form(T2, theta), COVER))


def varied_initial(bundle):
    """alpha_i plus a distinct closed correction per chart."""
    x_form = DifferentialForm.basis(T2, "dx")
    out = {}
    for i, alpha in bundle.data.alphas.items():
        out[i] = alpha + x_form.scale(Scalar.rational(Fraction(i, 9)))
    return out


def test_partition_sums_to_one_exactly():
    for family in ("primary", "alternate"):
        part = PartitionOfUnity.for_grid(COVER, family)
        total = ChartFunction.zero(T2.space)
        for w in part.all_windows():
            assert w.is_real() and w.is_global()
            total = total + w
        assert total == ChartFunction.one(T2.space)


def test_partition_window_count_guard():
    part = PartitionOfUnity.for_grid(COVER)
    with pytest.raises(GluingError):
        PartitionOfUnity(COVER, [part.axis_windows[0][:2], part.axis_windows[1]])


def test_partition_negative_window_rejected():
    cos = ChartFunction.cosine(T2.space, "x")
    third = ChartFunction.constant(T2.space, Fraction(1, 3))
    bad = [third + cos.scale(Fraction(1, 2)),  # dips below zero
           third - cos.scale(Fraction(1, 4)),
           third - cos.scale(Fraction(1, 4))]
    with pytest.raises(GluingError):
        PartitionOfUnity(COVER, [bad, PartitionOfUnity.for_grid(COVER).axis_windows[1]])


def test_partition_four_grid_exact():
    cover4 = GoodCover.grid(T2, 4)
    part = PartitionOfUnity.for_grid(cover4)
    total = ChartFunction.zero(T2.space)
    for w in part.all_windows():
        total = total + w
    assert total == ChartFunction.one(T2.space)


def test_partition_unsupported_grid():
    cover5 = GoodCover.grid(T2, 5)
    with pytest.raises(GluingError):
        PartitionOfUnity.for_grid(cover5)


def test_single_chartless_gluing_guard():
    cover4 = GoodCover.grid(T2, 4)  # has non-overlapping pairs
    bundle = build_local_line_bundle(
        solve_cech(constant_two_form(T2, Fraction(1, 2)), cover4)
    )
    part = PartitionOfUnity.for_grid(cover4)
    with pytest.raises(GluingError):
        glue_multiplicative_connection(bundle, part)


def test_default_gluing_collapses_to_cech_primitives():
    # with initial = alpha the overlap identity alpha_j + d phi_ij = alpha_i
    # makes the partition average collapse exactly
    bundle = make_bundle(Fraction(3, 7))
    part = PartitionOfUnity.for_grid(COVER)
    conn = glue_multiplicative_connection(bundle, part)
    for i, beta in conn.left_forms.items():
        assert beta == bundle.data.alphas[i]
    assert conn.consistency_report().passed
    assert conn.multiplicativity_report()["passed"]


@pytest.mark.parametrize(
    "theta", [Scalar.zero(), Scalar.rational(Fraction(3, 7)), Scalar.pi(1, 2)]
)
def test_left_curvature_recovers_omega_bitwise(theta):
    bundle = make_bundle(theta)
    part = PartitionOfUnity.for_grid(COVER)
    conn = glue_multiplicative_connection(bundle, part)
    assert left_curvature(conn) == bundle.data.omega


def test_varied_initial_still_consistent():
    bundle = make_bundle(Fraction(3, 7))
    part = PartitionOfUnity.for_grid(COVER)
    conn = glue_multiplicative_connection(bundle, part, initial=varied_initial(bundle))
    assert conn.consistency_report().passed
    report = conn.multiplicativity_report()
    assert report["passed"]
    # curvature differs from omega by the exact form d(sum c_j rho_j dx)
    curv = left_curvature(conn)
    x_form = DifferentialForm.basis(T2, "dx")
    primitive = DifferentialForm.zero(T2)
    for j in range(9):
        primitive = primitive + x_form.scale(Scalar.rational(Fraction(j, 9))).multiply_function(part.window(j))
    assert curv == bundle.data.omega + primitive.exterior_d()


def test_two_partitions_differ_by_global_one_form():
    bundle = make_bundle(Fraction(3, 7))
    initial = varied_initial(bundle)
    conn_a = glue_multiplicative_connection(
        bundle, PartitionOfUnity.for_grid(COVER, "primary"), initial=initial
    )
    conn_b = glue_multiplicative_connection(
        bundle, PartitionOfUnity.for_grid(COVER, "alternate"), initial=initial
    )
    beta = connection_difference(conn_a, conn_b)
    assert not beta.is_zero()
    assert all(c.is_global() for c in beta.terms.values())
    # curvatures differ by an exact form with explicit primitive beta
    curv_a = left_curvature(conn_a)
    curv_b = left_curvature(conn_b)
    assert curv_a - curv_b == beta.exterior_d()
    # chern output is bitwise identical
    cls_a = chern_class(bundle, conn_a)
    cls_b = chern_class(bundle, conn_b)
    assert cls_a.coefficient == cls_b.coefficient
    assert cls_a.cohomology_class == cls_b.cohomology_class


def test_chern_class_family():
    theta_int = chern_class(make_bundle(Scalar.pi(1, 6)))  # theta = 6*pi = 2*pi*3
    assert theta_int.coefficient == Scalar.rational(3)
    assert theta_int.is_integral
    frac = chern_class(make_bundle(Fraction(3, 7)))
    assert frac.coefficient == Scalar.pi(-1, Fraction(3, 14))
    assert not frac.is_integral
    zero = chern_class(make_bundle(0))
    assert zero.coefficient.is_zero() and zero.is_integral


def test_integrality_criterion_both_directions():
    for theta, integral in [
        (Scalar.zero(), True),
        (Scalar.pi(1, 2), True),
        (Scalar.pi(1, 4), True),
        (Scalar.rational(Fraction(3, 7)), False),
        (Scalar.pi(1, Fraction(2, 3)), False),
        (Scalar.rational(1), False),
    ]:
        bundle = make_bundle(theta)
        closes = bundle.honest_cocycle_closes()["closes"]
        cls = chern_class(bundle)
        assert closes == cls.is_integral == theta.is_two_pi_integer()


def test_product_additivity_check():
    base = T2.space
    pair = ProductChart(base.copies(2))
    f = ChartFunction.cosine(base, "x") + ChartFunction.variable(base, "y")
    left = DifferentialForm.from_function(T2, f).embed(pair, base.copy_map(1))
    right = DifferentialForm.from_function(T2, f).embed(pair, base.copy_map(2))
    dx1 = DifferentialForm.basis(pair, "dx_1")
    good = left.exterior_d() - right.exterior_d()
    assert check_product_additivity(good, base)
    # slot-mixing form fails
    y2 = ChartFunction.variable(pair.space, "y_2")
    bad = dx1.multiply_function(y2)
    assert not check_product_additivity(bad, base)


def test_hermitian_gluing():
    bundle = make_bundle(Fraction(3, 7))
    part = PartitionOfUnity.for_grid(COVER)
    flat = {i: ChartFunction.one(T2.space) for i in range(9)}
    metric = glue_hermitian(bundle, part, flat)
    assert metric.weight == ChartFunction.one(T2.space)
    assert metric.multiplicativity_report()["passed"]

    bump = ChartFunction.one(T2.space) + (
        ChartFunction.one(T2.space) + ChartFunction.cosine(T2.space, "x")
    ).scale(Fraction(1, 4))
    weights = {i: bump for i in range(9)}
    metric = glue_hermitian(bundle, part, weights)
    assert metric.weight == bump  # partition averages a constant family
    assert metric.multiplicativity_report()["passed"]
    witness = metric.compatible_connection_witness()
    assert witness["leibniz_identity"]


def test_hermitian_rejects_bad_weights():
    bundle = make_bundle(Fraction(3, 7))
    part = PartitionOfUnity.for_grid(COVER)
    negative = {i: ChartFunction.cosine(T2.space, "x") for i in range(9)}
    with pytest.raises(GluingError):
        glue_hermitian(bundle, part, negative)
    local = {i: ChartFunction.variable(T2.space, "x") + 2 for i in range(9)}
    with pytest.raises(GluingError):
        glue_hermitian(bundle, part, local)


def test_mismatched_metric_detected():
    # a deliberately non-product weight fails the cleared-denominator identity
    base = T2.space
    pair = base.copies(2)
    h = ChartFunction.one(base) + ChartFunction.cosine(base, "x").scale(Fraction(1, 2))
    num = h.embed(pair, base.copy_map(1)) + ChartFunction.cosine(pair, "x_2").scale(
        Fraction(1, 3)
    )
    den = h.embed(pair, base.copy_map(2))
    bad = FormalQuotientWeight(num, den)
    assert not bad.is_multiplicative(base)
    good = FormalQuotientWeight(
        h.embed(pair, base.copy_map(1)), h.embed(pair, base.copy_map(2))
    )
    assert good.is_multiplicative(base)

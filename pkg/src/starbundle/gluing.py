"""Glued multiplicative connections and Hermitian structures.

The chart connections d + i*alpha_i are averaged against an exact partition
of unity: on chart i the glued left 1-form is

    beta_i = sum_j rho_j * (alpha_j + d phi_ij)

where alpha_j and phi_ij are translated into chart i's frame.  Every glued
identity used here (overlap consistency, curvature recovery, the beta
structure of connection differences) only needs sum rho_j = 1 and the
cocycle identities, which are polynomial identities, so the checks are
exact even though trigonometric windows cannot vanish on open sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .bundle import LocalLineBundle
from .chartfn import ChartFunction, ChartSpace
from .cohomology import CohomologyClass
from .cover import GoodCover
from .forms import DifferentialForm
from .manifold import ProductChart, Torus
from .scalar import CScalar, Scalar


class GluingError(ValueError):
    pass


def _window_min_certificate(w: ChartFunction) -> Fraction:
    """Exact nonnegativity certificate for a single-frequency real window.

    For w = c0 + 2*Re(c1 e(u)) the minimum is c0 - 2|c1|, so nonnegativity
    is the rational inequality 4|c1|^2 <= c0^2.  Conjugate mode pairs are
    counted once via their positive-half representative.
    """
    zero_mon = (0,) * w.space.dim
    c0 = Fraction(0)
    amp_sq = Fraction(0)
    positive_modes = 0
    for (mon, freq), c in w.terms.items():
        if mon != zero_mon:
            raise GluingError("windows must be trigonometric polynomials")
        if all(k == 0 for k in freq):
            if not c.is_real():
                raise GluingError("windows must be real")
            c0 = c.re.as_fraction()
        elif sum(abs(k) for k in freq) == 1:
            lead = next(k for k in freq if k != 0)
            if lead > 0:
                positive_modes += 1
                amp_sq += c.re.as_fraction() ** 2 + c.im.as_fraction() ** 2
        else:
            raise GluingError("window certificate needs frequencies in {-1,0,1}")
    if positive_modes > 1:
        raise GluingError("window certificate handles one mode per axis window")
    if c0 < 0 or 4 * amp_sq > c0**2:
        raise GluingError(f"window fails the nonnegativity certificate: {w}")
    return c0


class PartitionOfUnity:
    """Tensor products of exact per-axis windows on a grid cover.

    Axis windows are raised-cosine profiles with rational Fourier pairs;
    their sum telescopes to 1 exactly and each is certified nonnegative.
    """

    def __init__(self, cover: GoodCover, axis_windows: Sequence[Sequence[ChartFunction]], family: str = "custom"):
        if cover.grid_shape is None:
            raise GluingError("partitions are built over grid covers")
        self.cover = cover
        self.family = family
        self.axis_windows = tuple(tuple(ws) for ws in axis_windows)
        space = cover.torus.space
        if len(self.axis_windows) != cover.torus.dim:
            raise GluingError("one window family per axis is required")
        for axis, windows in enumerate(self.axis_windows):
            if len(windows) != cover.grid_shape[axis]:
                raise GluingError(
                    "window count does not match the grid: partition not "
                    "subordinate to this cover"
                )
            total = ChartFunction.zero(space)
            for w in windows:
                if not w.is_real() or not w.is_global():
                    raise GluingError("windows must be real global functions")
                _window_min_certificate(w)
                total = total + w
            if total != ChartFunction.one(space):
                raise GluingError(f"axis {axis} windows do not sum to 1 exactly")
        # grid coordinates per chart index (row-major as built by GoodCover.grid)
        n = cover.grid_shape
        self._coords = []
        from itertools import product as iproduct

        for coords in iproduct(*(range(k) for k in n)):
            self._coords.append(coords)
        if len(self._coords) != len(cover.charts):
            raise GluingError("grid shape does not match the chart count")

    @staticmethod
    def _axis_family_3(space: ChartSpace, name: str, variant: str) -> list[ChartFunction]:
        """Exact 3-window families; thirds shifts would need sqrt(3), so the
        side windows are rational tilted raised cosines peaked in their charts."""
        one_third = ChartFunction.constant(space, Fraction(1, 3))
        cos = ChartFunction.cosine(space, name)
        sin = ChartFunction.sine(space, name)
        if variant == "primary":
            a, b = Fraction(1, 6), Fraction(2, 7)
            w0 = one_third + cos.scale(Fraction(1, 3))
        elif variant == "alternate":
            a, b = Fraction(1, 8), Fraction(2, 7)
            w0 = one_third + cos.scale(Fraction(1, 4))
        else:
            raise GluingError(f"unknown window family {variant!r}")
        w1 = one_third - cos.scale(a) + sin.scale(b)
        w2 = one_third - cos.scale(a) - sin.scale(b)
        return [w0, w1, w2]

    @staticmethod
    def _axis_family_4(space: ChartSpace, name: str) -> list[ChartFunction]:
        windows = []
        for k in range(4):
            cos_k = ChartFunction.cosine(space, name).shift({name: Fraction(-k, 4)})
            windows.append(
                (ChartFunction.one(space) + cos_k).scale(Fraction(1, 4))
            )
        return windows

    @staticmethod
    def for_grid(cover: GoodCover, family: str = "primary") -> "PartitionOfUnity":
        if cover.grid_shape is None:
            raise GluingError("partitions are built over grid covers")
        space = cover.torus.space
        axis_windows = []
        for axis, n in enumerate(cover.grid_shape):
            name = cover.torus.names[axis]
            if n == 3:
                axis_windows.append(PartitionOfUnity._axis_family_3(space, name, family))
            elif n == 4:
                axis_windows.append(PartitionOfUnity._axis_family_4(space, name))
            else:
                raise GluingError(
                    f"no exact rational window family for a {n}-grid axis"
                )
        return PartitionOfUnity(cover, axis_windows, family=family)

    def window(self, chart_index: int) -> ChartFunction:
        coords = self._coords[chart_index]
        w = ChartFunction.one(self.cover.torus.space)
        for axis, pos in enumerate(coords):
            w = w * self.axis_windows[axis][pos]
        return w

    def all_windows(self) -> list[ChartFunction]:
        return [self.window(i) for i in range(len(self.cover.charts))]

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "axis_windows": [
                [w.to_json() for w in ws] for ws in self.axis_windows
            ],
        }


@dataclass(frozen=True)
class ConsistencyReport:
    pairs_checked: int
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "pairs_checked": self.pairs_checked,
            "failures": list(self.failures),
        }


class GluedConnection:
    """Per-chart left connection 1-forms of a glued product connection."""

    def __init__(
        self,
        bundle: LocalLineBundle,
        partition: PartitionOfUnity,
        initial: Mapping[int, DifferentialForm],
        left_forms: Mapping[int, DifferentialForm],
    ):
        self.bundle = bundle
        self.partition = partition
        self.initial = dict(initial)
        self.left_forms = dict(left_forms)

    @property
    def torus(self) -> Torus:
        return self.bundle.torus

    def _shift_map(self, i: int, j: int) -> dict[str, Fraction]:
        lift = self.bundle.cover.pair_lift(i, j)
        return {n: Fraction(-s) for n, s in zip(self.torus.names, lift)}

    def consistency_report(self) -> ConsistencyReport:
        """beta_i - beta_j = d phi_ij on every overlap, exactly."""
        failures = []
        data = self.bundle.data
        count = 0
        for (i, j) in data.transitions:
            count += 1
            beta_j_here = self.left_forms[j].shift(self._shift_map(i, j))
            dphi = DifferentialForm.from_function(self.torus, data.transition(i, j)).exterior_d()
            if self.left_forms[i] - beta_j_here != dphi:
                failures.append(f"charts ({i},{j}): glued forms are inconsistent")
        return ConsistencyReport(count, tuple(failures))

    def product_form(self, chart: int) -> DifferentialForm:
        """pi_L* beta - pi_R* beta on the squared chart."""
        base = self.torus.space
        pair = ProductChart(base.copies(2))
        beta = self.left_forms[chart]
        left = beta.embed(pair, base.copy_map(1))
        right = beta.embed(pair, base.copy_map(2))
        return left - right

    def multiplicativity_report(self) -> dict:
        """Connection-form additivity across triples plus overlap consistency.

        A product-structure form A = pi_L*beta - pi_R*beta satisfies
        A_(x,y) + A_(y,z) = A_(x,z); combined with overlap consistency this
        is the infinitesimal multiplicative property of the connection.
        """
        consistency = self.consistency_report()
        additive_failures = []
        for chart in self.left_forms:
            form = self.product_form(chart)
            if not check_product_additivity(form, self.torus.space):
                additive_failures.append(f"chart {chart}: additivity identity fails")
        return {
            "passed": consistency.passed and not additive_failures,
            "overlap_consistency": consistency.to_json(),
            "additivity_failures": additive_failures,
        }


def check_product_additivity(pair_form: DifferentialForm, base: ChartSpace) -> bool:
    """Does a 1-form on the squared chart satisfy A_S + A_F = A_C on triples?

    Exact identity test; product-structure forms pass, anything mixing the
    two slots fails.
    """
    triple = ProductChart(base.copies(3))

    def pull(a: int, b: int) -> DifferentialForm:
        mapping = {}
        for n in base.names:
            mapping[f"{n}_1"] = f"{n}_{a}"
            mapping[f"{n}_2"] = f"{n}_{b}"
        return pair_form.embed(triple, mapping)

    return (pull(1, 2) + pull(2, 3) - pull(1, 3)).is_zero()


def glue_multiplicative_connection(
    bundle: LocalLineBundle,
    partition: PartitionOfUnity,
    initial: Mapping[int, DifferentialForm] | None = None,
) -> GluedConnection:
    """Average chart connections through the partition of unity.

    ``initial`` supplies the per-chart starting connections (default: the
    Cech primitives alpha_i).  The glued forms satisfy the overlap identity
    exactly; the construction needs every pair of charts to overlap so the
    translated integrands are defined chart-wide.
    """
    cover = bundle.cover
    if partition.cover is not cover and partition.cover.to_json() != cover.to_json():
        raise GluingError("partition is subordinate to a different cover")
    if not cover.complete_pairwise():
        raise GluingError(
            "gluing needs pairwise-overlapping charts for the exact extension"
        )
    data = bundle.data
    torus = bundle.torus
    if initial is None:
        initial = data.alphas
    else:
        initial = dict(initial)
        for i, form in initial.items():
            if form.manifold != torus:
                raise GluingError("initial connection forms live on the torus charts")
            if any(len(idx) != 1 for idx in form.terms):
                raise GluingError("initial connections must be 1-forms")
        if set(initial) != set(range(len(cover.charts))):
            raise GluingError("one initial connection per chart is required")

    windows = partition.all_windows()
    left_forms = {}
    for i in range(len(cover.charts)):
        total = DifferentialForm.zero(torus)
        for j in range(len(cover.charts)):
            if j == i:
                transported = initial[i]
            else:
                lift = cover.pair_lift(i, j)
                shift = {n: Fraction(-s) for n, s in zip(torus.names, lift)}
                dphi = DifferentialForm.from_function(
                    torus, data.transition(i, j)
                ).exterior_d()
                transported = initial[j].shift(shift) + dphi
            total = total + transported.multiply_function(windows[j])
        left_forms[i] = total
    return GluedConnection(bundle, partition, initial, left_forms)


def left_curvature(connection: GluedConnection) -> DifferentialForm:
    """d of the glued left form, restricted to left tangent vectors.

    The per-chart curvatures must agree across overlaps and descend to the
    torus; for bundles built from the Cech solver with default initial data
    this returns the input 2-form bitwise.
    """
    torus = connection.torus
    curvatures = {i: beta.exterior_d() for i, beta in connection.left_forms.items()}
    items = sorted(curvatures.items())
    first = items[0][1]
    for i, curv in items[1:]:
        lift = connection.bundle.cover.pair_lift(items[0][0], i)
        shift = {n: Fraction(-s) for n, s in zip(torus.names, lift)}
        if curv.shift(shift) != first:
            raise GluingError("glued curvature is not globally consistent")
        if curv != first:
            raise GluingError("glued curvature does not descend to the torus")
    for coeff in first.terms.values():
        if not coeff.is_global():
            raise GluingError("curvature coefficient is not globally defined")
    if not first.is_closed():
        raise AssertionError("curvature failed the closedness check")
    return first


def connection_difference(a: GluedConnection, b: GluedConnection) -> DifferentialForm:
    """The global 1-form beta with a - b = pi_L*beta - pi_R*beta.

    Raises when the difference fails to be globally defined, which would
    mean one of the inputs was not a product connection on this bundle.
    """
    if set(a.left_forms) != set(b.left_forms):
        raise GluingError("connections live on different covers")
    torus = a.torus
    diffs = {i: a.left_forms[i] - b.left_forms[i] for i in a.left_forms}
    items = sorted(diffs.items())
    first = items[0][1]
    for i, d in items[1:]:
        if d != first:
            raise GluingError("connection difference is chart-dependent")
    for coeff in first.terms.values():
        if not coeff.is_global():
            raise GluingError("connection difference does not descend to the torus")
    # structural identity: the induced difference on the bundle is
    # pi_L*beta - pi_R*beta; verify the additivity signature
    base = torus.space
    pair = ProductChart(base.copies(2))
    induced = first.embed(pair, base.copy_map(1)) - first.embed(pair, base.copy_map(2))
    if not check_product_additivity(induced, base):
        raise AssertionError("connection difference lost the product structure")
    return first


@dataclass(frozen=True)
class FormalQuotientWeight:
    """A metric weight N(x,y)/D(x,y) on the squared chart, kept unsplit so
    multiplicativity can be decided by cleared-denominator identities."""

    num: ChartFunction
    den: ChartFunction

    def is_multiplicative(self, base: ChartSpace) -> bool:
        """W(x,y) W(y,z) == W(x,z) via N12 N23 D13 == N13 D12 D23."""
        triple = ProductChart(base.copies(3)).space

        def pull(f: ChartFunction, a: int, b: int) -> ChartFunction:
            mapping = {}
            for n in base.names:
                mapping[f"{n}_1"] = f"{n}_{a}"
                mapping[f"{n}_2"] = f"{n}_{b}"
            return f.embed(triple, mapping)

        lhs = pull(self.num, 1, 2) * pull(self.num, 2, 3) * pull(self.den, 1, 3)
        rhs = pull(self.num, 1, 3) * pull(self.den, 1, 2) * pull(self.den, 2, 3)
        return lhs == rhs


class GluedMetric:
    """Multiplicative Hermitian structure glued from per-chart weights."""

    def __init__(self, bundle: LocalLineBundle, partition: PartitionOfUnity, weight: ChartFunction):
        self.bundle = bundle
        self.partition = partition
        self.weight = weight  # glued left weight, a single global function

    def pair_weight(self) -> FormalQuotientWeight:
        base = self.bundle.torus.space
        pair = base.copies(2)
        return FormalQuotientWeight(
            num=self.weight.embed(pair, base.copy_map(1)),
            den=self.weight.embed(pair, base.copy_map(2)),
        )

    def multiplicativity_report(self) -> dict:
        ok = self.pair_weight().is_multiplicative(self.bundle.torus.space)
        return {
            "passed": ok,
            "structure": "boxtimes-inverse weights cancel: |H(u,v)| = |u||v|",
        }

    def compatible_connection_witness(self) -> dict:
        """The metric-compatible correction is (1/2) d(h)/h; return it in
        cleared form together with the verified Leibniz identity."""
        dh = DifferentialForm.from_function(self.bundle.torus, self.weight).exterior_d()
        half_dh = dh.scale(Fraction(1, 2))
        identity_holds = (half_dh + half_dh) == dh
        return {
            "correction_numerator": half_dh.to_json(),
            "correction_denominator": self.weight.to_json(),
            "leibniz_identity": identity_holds,
        }


def glue_hermitian(
    bundle: LocalLineBundle,
    partition: PartitionOfUnity,
    weights: Mapping[int, ChartFunction],
) -> GluedMetric:
    """Glue per-chart positive weights into a multiplicative metric.

    Weights must be real, positive (certified by an exact coefficient
    bound), and globally defined; positivity of the glued weight follows
    from rho >= 0 and sum rho = 1.
    """
    torus = bundle.torus
    if set(weights) != set(range(len(bundle.cover.charts))):
        raise GluingError("one weight per chart is required")
    for i, h in weights.items():
        if h.space != torus.space:
            raise GluingError("weights live on the wrong chart")
        if not h.is_real():
            raise GluingError(f"weight {i} is not real")
        if not h.is_global():
            raise GluingError(
                "chart-local weights cannot glue consistently without exact "
                "support control; use globally defined weights"
            )
        zero_mon = (0,) * torus.space.dim
        c0 = Fraction(0)
        tail = Fraction(0)
        for (mon, freq), c in h.terms.items():
            if all(k == 0 for k in freq):
                c0 = c.re.as_fraction()
            else:
                tail += abs(c.re.as_fraction()) + abs(c.im.as_fraction())
        if c0 <= tail:
            raise GluingError(f"weight {i} fails the positivity certificate")
    glued = ChartFunction.zero(torus.space)
    for i, h in sorted(weights.items()):
        glued = glued + partition.window(i) * h
    return GluedMetric(bundle, partition, glued)


@dataclass(frozen=True)
class ChernClassResult:
    cohomology_class: CohomologyClass
    coefficient: Scalar
    is_integral: bool

    def to_json(self) -> dict:
        return {
            "class": self.cohomology_class.to_json(),
            "coefficient": self.coefficient.to_json(),
            "integral": self.is_integral,
        }


def chern_class(
    bundle: LocalLineBundle,
    connection: GluedConnection | None = None,
) -> ChernClassResult:
    """[omega / 2*pi] as an exact class; integral iff theta is in 2*pi*Z.

    The returned representative is the canonical constant-coefficient one
    (the integral pairing times the volume generator), so the output does
    not depend on the partition of unity used for the connection: exact
    parts of the curvature integrate away.
    """
    if connection is None:
        partition = PartitionOfUnity.for_grid(bundle.cover)
        connection = glue_multiplicative_connection(bundle, partition)
    curv = left_curvature(connection)
    coefficient = curv.scale(Scalar.pi(-1, Fraction(1, 2))).integrate()
    torus = bundle.torus
    generator = DifferentialForm.basis(torus, *torus.covectors)
    cls = CohomologyClass(torus, (generator.scale(coefficient),))
    return ChernClassResult(cls, coefficient, coefficient.is_integer())

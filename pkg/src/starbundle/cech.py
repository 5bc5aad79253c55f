"""Cech descent data for constant closed 2-forms on the 2-torus.

For omega = theta dx^dy the chart primitives are alpha_i = theta (x - a_i) dy
in lifted chart coordinates.  Transition functions are induced from the single
universal-cover potential theta * x dy with a fixed multiplier convention, so
the triple-overlap constants come out as theta times signed integer lattice
areas: they all lie in 2*pi*Z exactly when theta does, which is the honest
line-bundle criterion.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .chartfn import ChartFunction
from .cover import GoodCover
from .forms import DifferentialForm
from .manifold import Torus
from .scalar import Scalar


class CechError(ValueError):
    """Raised when descent data violates one of its defining identities."""


@dataclass(frozen=True)
class CechReport:
    curl_ok: bool
    overlap_ok: bool
    triple_ok: bool
    antisymmetry_ok: bool
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return self.curl_ok and self.overlap_ok and self.triple_ok and self.antisymmetry_ok

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "chart_curl": self.curl_ok,
            "overlap_gradient": self.overlap_ok,
            "triple_constancy": self.triple_ok,
            "antisymmetry": self.antisymmetry_ok,
            "failures": list(self.failures),
        }


class CechConnectionData:
    """Per-chart 1-forms, overlap transitions, triple constants for omega."""

    def __init__(
        self,
        cover: GoodCover,
        omega: DifferentialForm,
        alphas: Mapping[int, DifferentialForm],
        transitions: Mapping[tuple[int, int], ChartFunction],
        triple_constants: Mapping[tuple[int, int, int], Scalar],
    ):
        self.cover = cover
        self.omega = omega
        self.alphas = dict(alphas)
        self.transitions = dict(transitions)
        self.triple_constants = dict(triple_constants)

    @property
    def torus(self) -> Torus:
        return self.cover.torus

    def theta(self) -> Scalar:
        """The constant coefficient of omega against dx^dy."""
        coeff = self.omega.terms.get((0, 1))
        if coeff is None:
            return Scalar.zero()
        v = coeff.constant_value()
        if not v.is_real():
            raise CechError("omega coefficient must be real")
        return v.re

    def transition(self, i: int, j: int) -> ChartFunction:
        """phi_ij expressed in chart i's frame (identically 0 when i == j)."""
        if i == j:
            return ChartFunction.zero(self.torus.space)
        return self.transitions[(i, j)]

    def transition_in_triple_frame(self, i: int, j: int, anchor: int) -> ChartFunction:
        """phi_ij shifted into the frame anchored at chart ``anchor``."""
        m_i = self.cover.pair_lift(anchor, i)
        shift = {n: Fraction(-s) for n, s in zip(self.torus.names, m_i)}
        return self.transition(i, j).shift(shift)

    def triple_sum(self, i: int, j: int, k: int) -> ChartFunction:
        """phi_ij + phi_jk + phi_ki in the frame anchored at chart i."""
        t1 = self.transition_in_triple_frame(i, j, i)
        t2 = self.transition_in_triple_frame(j, k, i)
        t3 = self.transition_in_triple_frame(k, i, i)
        return t1 + t2 + t3

    # -- verification -----------------------------------------------------

    def verify(self) -> CechReport:
        failures: list[str] = []
        space = self.torus.space
        curl_ok = True
        for i, alpha in self.alphas.items():
            if alpha.exterior_d() != self.omega:
                curl_ok = False
                failures.append(f"d(alpha_{i}) != omega")
        overlap_ok = True
        antisym_ok = True
        for (i, j), phi in self.transitions.items():
            lift = self.cover.pair_lift(i, j)
            shift = {n: Fraction(-s) for n, s in zip(self.torus.names, lift)}
            alpha_j_here = self.alphas[j].shift(shift)
            dphi = DifferentialForm.from_function(self.torus, phi).exterior_d()
            if self.alphas[i] - alpha_j_here != dphi:
                overlap_ok = False
                failures.append(f"alpha_{i} - alpha_{j} != d(phi_{i}{j})")
            reverse = self.transitions.get((j, i))
            if reverse is None:
                antisym_ok = False
                failures.append(f"missing phi_{j}{i}")
                continue
            back = {n: Fraction(s) for n, s in zip(self.torus.names, lift)}
            if reverse != (-phi).shift(back):
                antisym_ok = False
                failures.append(f"phi_{j}{i} != -phi_{i}{j}")
        triple_ok = True
        for (i, j, k), const in self.triple_constants.items():
            total = self.triple_sum(i, j, k)
            if not total.is_constant():
                triple_ok = False
                failures.append(f"phi_{i}{j}{k} is not constant: {total}")
                continue
            v = total.constant_value()
            if not v.is_real() or v.re != const:
                triple_ok = False
                failures.append(f"phi_{i}{j}{k} != stored constant")
        return CechReport(curl_ok, overlap_ok, triple_ok, antisym_ok, tuple(failures))

    def to_json(self) -> dict:
        return {
            "cover": self.cover.to_json(),
            "omega": self.omega.to_json(),
            "alphas": {str(i): a.to_json() for i, a in sorted(self.alphas.items())},
            "transitions": {
                f"{i},{j}": phi.to_json()
                for (i, j), phi in sorted(self.transitions.items())
            },
            "triple_constants": {
                f"{i},{j},{k}": c.to_json()
                for (i, j, k), c in sorted(self.triple_constants.items())
            },
        }

    @staticmethod
    def from_json(data: Mapping) -> "CechConnectionData":
        cover = GoodCover.from_json(data["cover"])
        omega = DifferentialForm.from_json(data["omega"])
        alphas = {
            int(i): DifferentialForm.from_json(a) for i, a in data["alphas"].items()
        }
        transitions = {}
        for key, phi in data["transitions"].items():
            i, j = (int(p) for p in key.split(","))
            transitions[(i, j)] = ChartFunction.from_json(phi)
        consts = {}
        for key, c in data["triple_constants"].items():
            i, j, k = (int(p) for p in key.split(","))
            consts[(i, j, k)] = Scalar.from_json(c)
        return CechConnectionData(cover, omega, alphas, transitions, consts)


def solve_cech(omega: DifferentialForm, cover: GoodCover) -> CechConnectionData:
    """Solve the descent equations for omega = theta dx^dy on Torus(2).

    Produces alpha_i with d(alpha_i) = omega, transitions with
    alpha_i - alpha_j = d(phi_ij), and constant triple sums, all exact.
    """
    torus = cover.torus
    if not isinstance(omega.manifold, Torus) or omega.manifold.n != 2:
        raise CechError("the supported family lives on Torus(2)")
    if omega.manifold != torus:
        raise CechError("omega and cover live on different tori")
    if not omega.is_closed():
        raise CechError("omega must be closed")
    if any(len(idx) != 2 for idx in omega.terms):
        raise CechError("omega must be a 2-form")
    coeff = omega.terms.get((0, 1), ChartFunction.zero(torus.space))
    if not coeff.is_constant():
        raise CechError(
            "unsupported family: only constant-coefficient 2-forms are handled"
        )
    value = coeff.constant_value()
    if not value.is_real():
        raise CechError("omega must be a real form")
    theta = value.re

    space = torus.space
    xname, yname = torus.names
    x = ChartFunction.variable(space, xname)

    alphas = {}
    for i, rect in enumerate(cover.charts):
        a_x = rect.center[0]
        coeff_i = (x - ChartFunction.constant(space, a_x)).scale(theta)
        alphas[i] = DifferentialForm(torus, {(1,): coeff_i})

    y = ChartFunction.variable(space, yname)
    transitions: dict[tuple[int, int], ChartFunction] = {}
    for i, j in cover.pairs:
        n = cover.pair_lift(i, j)
        a_i, a_j = cover.charts[i].center, cover.charts[j].center
        delta_x = a_j[0] + n[0] - a_i[0]
        const = -(a_j[0] + n[0]) * Fraction(n[1])
        phi = (y.scale(delta_x) + ChartFunction.constant(space, const)).scale(theta)
        transitions[(i, j)] = phi
        back = {name: Fraction(s) for name, s in zip(torus.names, n)}
        transitions[(j, i)] = (-phi).shift(back)

    data = CechConnectionData(cover, omega, alphas, transitions, {})
    consts: dict[tuple[int, int, int], Scalar] = {}
    for i, j, k in cover.triples:
        total = data.triple_sum(i, j, k)
        if not total.is_constant():
            raise AssertionError(f"triple sum {i},{j},{k} is not constant: {total}")
        v = total.constant_value()
        consts[(i, j, k)] = v.re
    data.triple_constants = consts

    report = data.verify()
    if not report.passed:  # construction is supposed to be exact
        raise AssertionError(f"descent solution failed verification: {report.failures}")
    return data


def constant_two_form(torus: Torus, theta: Scalar | int | Fraction) -> DifferentialForm:
    """theta dx^dy on Torus(2)."""
    if torus.n != 2:
        raise ValueError("constant_two_form expects Torus(2)")
    return DifferentialForm.basis(torus, *torus.covectors).scale(Scalar.coerce(theta))

"""The twisted index pairing at the cohomological level.

An elliptic element enters through the Thom-pushed Chern data of its symbol
class: an even class gamma on the base.  The twisted index is the exact
pairing

    ind(a) = integral_X  gamma ^ Td(X) ^ exp(omega / 2*pi)

which reduces to the untwisted integer pairing at omega = 0, adds under
composition, is insensitive to exact-form perturbations, and agrees with
honest line-bundle twisting for integral classes; each property is an
executable check here rather than an assumption.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .cohomology import CohomologyClass, exp_twist, todd_class
from .forms import DifferentialForm
from .manifold import Manifold, Sphere2, Torus
from .scalar import Scalar

SUPPORTED = "Torus(2), Torus(4), Sphere2"


def _check_supported(manifold: Manifold):
    if isinstance(manifold, Torus) and manifold.n in (2, 4):
        return
    if isinstance(manifold, Sphere2):
        return
    raise ValueError(f"index pairing supports {SUPPORTED}")


class EllipticSymbolClass:
    """Ranks plus Thom-pushed Chern data of an elliptic symbol."""

    __slots__ = ("rank_e", "rank_f", "gamma")

    def __init__(self, rank_e: int, rank_f: int, gamma: CohomologyClass):
        if rank_e != rank_f:
            raise ValueError("ellipticity forces equal ranks")
        if rank_e < 0:
            raise ValueError("ranks are nonnegative")
        deg0 = gamma.component(0)
        if not deg0.is_zero():
            value = deg0.terms[()].constant_value()
            if not value.is_real() or not value.re.is_integer():
                raise ValueError("degree-0 part of the pushed class must be integral")
        object.__setattr__(self, "rank_e", rank_e)
        object.__setattr__(self, "rank_f", rank_f)
        object.__setattr__(self, "gamma", gamma)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("EllipticSymbolClass is immutable")

    @staticmethod
    def identity(manifold: Manifold, rank: int = 1) -> "EllipticSymbolClass":
        return EllipticSymbolClass(rank, rank, CohomologyClass.zero(manifold))

    @staticmethod
    def on_torus2(
        manifold: Torus, d: int | Fraction | Scalar, e: int | Fraction | Scalar, rank: int = 1
    ) -> "EllipticSymbolClass":
        """gamma = d*1 + e*vol on Torus(2)."""
        if manifold.n != 2:
            raise ValueError("on_torus2 expects Torus(2)")
        vol = DifferentialForm.basis(manifold, *manifold.covectors)
        gamma = CohomologyClass(
            manifold,
            (
                DifferentialForm.constant(manifold, Scalar.coerce(d)),
                vol.scale(Scalar.coerce(e)),
            ),
        )
        return EllipticSymbolClass(rank, rank, gamma)

    def to_json(self) -> dict:
        return {
            "rankE": self.rank_e,
            "rankF": self.rank_f,
            "gamma": self.gamma.to_json(),
        }

    @staticmethod
    def from_json(data: Mapping) -> "EllipticSymbolClass":
        return EllipticSymbolClass(
            int(data["rankE"]),
            int(data["rankF"]),
            CohomologyClass.from_json(data["gamma"]),
        )


@dataclass(frozen=True)
class IndexResult:
    value: Scalar
    by_degree: tuple[tuple[int, Scalar], ...]
    is_integer: bool

    def to_json(self) -> dict:
        return {
            "value": self.value.to_json(),
            "by_degree": {str(d): v.to_json() for d, v in self.by_degree},
            "integer": self.is_integer,
        }


def twisted_index(
    a: EllipticSymbolClass, omega: DifferentialForm | None, manifold: Manifold
) -> IndexResult:
    """ind(a) = integral gamma ^ Td ^ exp(omega/2*pi), exactly."""
    _check_supported(manifold)
    if a.gamma.manifold != manifold:
        raise ValueError("symbol class lives on a different manifold")
    td = todd_class(manifold)
    if omega is None:
        twist = CohomologyClass.unit(manifold)
    else:
        if omega.manifold != manifold:
            raise ValueError("twisting form lives on a different manifold")
        twist = exp_twist(omega)
    weight = td.cup(twist)
    by_degree = []
    total = Scalar.zero()
    for degree in range(0, manifold.dim + 1, 2):
        part = CohomologyClass(manifold, (a.gamma.component(degree),))
        if part.is_zero():
            continue
        contribution = part.cup(weight).integrate()
        by_degree.append((degree, contribution))
        total = total + contribution
    return IndexResult(total, tuple(by_degree), total.is_integer())


def compose_symbols(a1: EllipticSymbolClass, a2: EllipticSymbolClass) -> EllipticSymbolClass:
    """Composite a2 . a1; pushed Chern data is additive under composition."""
    if a1.rank_f != a2.rank_e:
        raise ValueError("ranks do not chain: rank F of the first factor must "
                         "match rank E of the second")
    return EllipticSymbolClass(a1.rank_e, a2.rank_f, a1.gamma + a2.gamma)


def check_log_multiplicativity(
    a1: EllipticSymbolClass,
    a2: EllipticSymbolClass,
    omega: DifferentialForm | None,
    manifold: Manifold,
) -> dict:
    """ind(a2 . a1) == ind(a1) + ind(a2), exact equality."""
    composite = compose_symbols(a1, a2)
    lhs = twisted_index(composite, omega, manifold)
    r1 = twisted_index(a1, omega, manifold)
    r2 = twisted_index(a2, omega, manifold)
    equal = lhs.value == r1.value + r2.value
    return {
        "passed": equal,
        "composite": lhs.to_json(),
        "factors": [r1.to_json(), r2.to_json()],
    }


def check_homotopy_invariance(
    a: EllipticSymbolClass,
    omega: DifferentialForm | None,
    manifold: Manifold,
    beta: DifferentialForm,
    target: str | int = "omega",
) -> dict:
    """Perturb a representative by d(beta) and require bitwise equality.

    ``beta`` is the demanded primitive witness; its exterior derivative is
    the perturbation.  ``target`` is "omega" or the gamma degree to perturb.
    """
    if beta.manifold != manifold:
        raise ValueError("witness lives on a different manifold")
    perturbation = beta.exterior_d()
    before = twisted_index(a, omega, manifold)
    if target == "omega":
        if omega is None:
            raise ValueError("no twisting form to perturb")
        if not perturbation.is_homogeneous(2):
            raise ValueError("witness must be a 1-form to perturb omega")
        after = twisted_index(a, omega + perturbation, manifold)
    else:
        degree = int(target)
        if not perturbation.degrees() or set(perturbation.degrees()) != {degree}:
            raise ValueError(f"witness derivative is not homogeneous of degree {degree}")
        gamma = CohomologyClass(
            manifold,
            tuple(a.gamma.components) + (perturbation,),
        )
        perturbed = EllipticSymbolClass(a.rank_e, a.rank_f, gamma)
        after = twisted_index(perturbed, omega, manifold)
    return {
        "passed": before.value == after.value,
        "before": before.to_json(),
        "after": after.to_json(),
    }


def check_tensor_consistency(a: EllipticSymbolClass, m: int, manifold: Torus) -> dict:
    """For integral twists, twisting equals tensoring by the honest bundle.

    Compares ind(a, omega = 2*pi*m vol) with the untwisted index of the
    class gamma ^ exp(omega/2*pi); rejects non-integral requests.
    """
    if not isinstance(manifold, Torus) or manifold.n != 2:
        raise ValueError("tensor consistency check runs on Torus(2)")
    if not isinstance(m, int):
        raise ValueError("twist must be an integral class: m is an integer")
    vol = DifferentialForm.basis(manifold, *manifold.covectors)
    omega = vol.scale(Scalar.pi(1, 2 * m))
    lhs = twisted_index(a, omega, manifold)
    tensored = EllipticSymbolClass(
        a.rank_e, a.rank_f, a.gamma.cup(exp_twist(omega))
    )
    rhs = twisted_index(tensored, None, manifold)
    return {
        "passed": lhs.value == rhs.value,
        "twisted": lhs.to_json(),
        "tensored_untwisted": rhs.to_json(),
    }

"""Exact scalars: Laurent polynomials in pi over the rationals.

Every number produced by the toolkit is a finite sum ``sum_m q_m * pi**m``
with rational ``q_m`` and integer ``m``.  Because pi is transcendental, two
such sums are equal as real numbers iff they are structurally equal, so all
equality tests (including membership in ``2*pi*Z``, which decides phase
identities) are exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union
import math
import re

RationalLike = Union[int, Fraction]
ScalarLike = Union["Scalar", int, Fraction]


class Scalar:
    """Immutable Laurent polynomial in pi with Fraction coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, RationalLike] | None = None):
        clean: dict[int, Fraction] = {}
        if terms:
            for m, q in terms.items():
                q = Fraction(q)
                if q != 0:
                    clean[int(m)] = clean.get(int(m), Fraction(0)) + q
        self._terms = {m: q for m, q in clean.items() if q != 0}

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "Scalar":
        return Scalar()

    @staticmethod
    def one() -> "Scalar":
        return Scalar({0: 1})

    @staticmethod
    def rational(q: RationalLike) -> "Scalar":
        return Scalar({0: Fraction(q)})

    @staticmethod
    def pi(power: int = 1, coeff: RationalLike = 1) -> "Scalar":
        return Scalar({power: Fraction(coeff)})

    @staticmethod
    def coerce(x: ScalarLike) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, (int, Fraction)):
            return Scalar.rational(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to Scalar")

    # -- structure ----------------------------------------------------

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        """True when no pi power appears (pure rational number)."""
        return set(self._terms) <= {0}

    def is_integer(self) -> bool:
        if not self._terms:
            return True
        return self.is_rational() and self._terms[0].denominator == 1

    def is_two_pi_integer(self) -> bool:
        """Exact membership in 2*pi*Z (0 counts)."""
        if not self._terms:
            return True
        if set(self._terms) != {1}:
            return False
        q = self._terms[1] / 2
        return q.denominator == 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"not a rational scalar: {self}")
        return self._terms.get(0, Fraction(0))

    # -- ring operations ----------------------------------------------

    def __add__(self, other: ScalarLike) -> "Scalar":
        other = Scalar.coerce(other)
        out = dict(self._terms)
        for m, q in other._terms.items():
            out[m] = out.get(m, Fraction(0)) + q
        return Scalar(out)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar({m: -q for m, q in self._terms.items()})

    def __sub__(self, other: ScalarLike) -> "Scalar":
        return self + (-Scalar.coerce(other))

    def __rsub__(self, other: ScalarLike) -> "Scalar":
        return Scalar.coerce(other) + (-self)

    def __mul__(self, other: ScalarLike) -> "Scalar":
        other = Scalar.coerce(other)
        out: dict[int, Fraction] = {}
        for m1, q1 in self._terms.items():
            for m2, q2 in other._terms.items():
                m = m1 + m2
                out[m] = out.get(m, Fraction(0)) + q1 * q2
        return Scalar(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Scalar":
        if not isinstance(n, int):
            raise TypeError("Scalar power must be an integer")
        if n < 0:
            return self.inverse() ** (-n)
        result = Scalar.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def inverse(self) -> "Scalar":
        """Exact inverse; defined only for monomials q*pi**m."""
        if len(self._terms) != 1:
            raise ZeroDivisionError(
                f"scalar {self} has no exact inverse in the Laurent-pi ring"
            )
        ((m, q),) = self._terms.items()
        return Scalar({-m: 1 / q})

    def __truediv__(self, other: ScalarLike) -> "Scalar":
        return self * Scalar.coerce(other).inverse()

    # -- comparison / hashing ------------------------------------------

    def __getstate__(self):
        return self._terms

    def __setstate__(self, state):
        object.__setattr__(self, "_terms", state)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Scalar.rational(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    # -- rendering ------------------------------------------------------

    def __float__(self) -> float:
        return float(sum(float(q) * math.pi**m for m, q in self._terms.items()))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms, reverse=True):
            q = self._terms[m]
            if m == 0:
                parts.append(str(q))
            else:
                head = "" if q == 1 else ("-" if q == -1 else f"{q}*")
                tail = "pi" if m == 1 else f"pi^{m}"
                parts.append(head + tail)
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Scalar({self})"

    def to_json(self) -> dict:
        return {
            "terms": [
                {"pi": m, "q": str(self._terms[m])} for m in sorted(self._terms)
            ]
        }

    @staticmethod
    def from_json(data: Mapping) -> "Scalar":
        terms = {}
        for item in data["terms"]:
            terms[int(item["pi"])] = Fraction(item["q"])
        return Scalar(terms)


_TERM_RE = re.compile(
    r"^\s*(?P<coef>[+-]?\d+(?:/\d+)?)?\s*(?:(?P<star>\*)?\s*pi(?:\^(?P<exp>-?\d+))?)?\s*$"
)


def parse_scalar(text: str) -> Scalar:
    """Parse strings like '3/7', '2*pi', '2pi', '-1/2*pi^-1 + 1'."""
    text = text.strip()
    if not text:
        raise ValueError("empty scalar string")
    # split into signed terms
    pieces = re.split(r"(?<=[0-9a-z])\s*\+\s*", text)
    total = Scalar.zero()
    for piece in pieces:
        # allow a single leading minus inside each piece; further minuses split
        chunks = re.split(r"(?<=[0-9a-z])\s*-\s*", piece)
        signs = [1] + [-1] * (len(chunks) - 1)
        for sign, chunk in zip(signs, chunks):
            m = _TERM_RE.match(chunk)
            if not m or (m.group("coef") is None and "pi" not in chunk):
                raise ValueError(f"cannot parse scalar term {chunk!r}")
            coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
            if "pi" in chunk:
                exp = int(m.group("exp")) if m.group("exp") else 1
            else:
                exp = 0
            total = total + Scalar({exp: sign * coef})
    return total


class CScalar:
    """Complex number with exact Scalar real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: ScalarLike = 0, im: ScalarLike = 0):
        object.__setattr__(self, "re", Scalar.coerce(re))
        object.__setattr__(self, "im", Scalar.coerce(im))

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("CScalar is immutable")

    def __getstate__(self):
        return (self.re, self.im)

    def __setstate__(self, state):
        object.__setattr__(self, "re", state[0])
        object.__setattr__(self, "im", state[1])

    @staticmethod
    def zero() -> "CScalar":
        return CScalar()

    @staticmethod
    def one() -> "CScalar":
        return CScalar(Scalar.one())

    @staticmethod
    def i() -> "CScalar":
        return CScalar(0, Scalar.one())

    @staticmethod
    def coerce(x) -> "CScalar":
        if isinstance(x, CScalar):
            return x
        if isinstance(x, (Scalar, int, Fraction)):
            return CScalar(Scalar.coerce(x))
        raise TypeError(f"cannot coerce {type(x).__name__} to CScalar")

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def is_real(self) -> bool:
        return self.im.is_zero()

    def conj(self) -> "CScalar":
        return CScalar(self.re, -self.im)

    def times_i(self) -> "CScalar":
        return CScalar(-self.im, self.re)

    def __add__(self, other) -> "CScalar":
        other = CScalar.coerce(other)
        return CScalar(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> "CScalar":
        return CScalar(-self.re, -self.im)

    def __sub__(self, other) -> "CScalar":
        return self + (-CScalar.coerce(other))

    def __rsub__(self, other) -> "CScalar":
        return CScalar.coerce(other) + (-self)

    def __mul__(self, other) -> "CScalar":
        other = CScalar.coerce(other)
        return CScalar(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (Scalar, int, Fraction)):
            other = CScalar.coerce(other)
        if not isinstance(other, CScalar):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if self.im.is_zero():
            return str(self.re)
        if self.re.is_zero():
            return f"({self.im})*i"
        return f"({self.re} + ({self.im})*i)"

    def __repr__(self) -> str:
        return f"CScalar({self})"

    def to_json(self) -> dict:
        return {"re": self.re.to_json(), "im": self.im.to_json()}

    @staticmethod
    def from_json(data: Mapping) -> "CScalar":
        return CScalar(Scalar.from_json(data["re"]), Scalar.from_json(data["im"]))


def scalar_sum(items: Iterable[Scalar]) -> Scalar:
    total = Scalar.zero()
    for x in items:
        total = total + x
    return total

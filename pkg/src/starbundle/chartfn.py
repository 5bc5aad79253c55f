"""Sparse exact function algebra on coordinate charts.

A chart function is a finite sum of terms

    c * u1^e1 * ... * un^en * exp(2*pi*i*(k1*u1 + ... + kn*un))

with ``c`` an exact complex scalar (:class:`~starbundle.scalar.CScalar`),
integer exponents ``e`` and integer frequencies ``k``.  Pure polynomials
(all ``k = 0``) and finite Fourier sums (all ``e = 0``) are the two primary
shapes; products of the two arise when global partition windows multiply
chart-local polynomial data, so the algebra is closed by design.

Frequencies are only allowed along periodic (torus) directions.  Monomial
exponents along periodic directions represent dependence on a *lifted*
coordinate and mark the function as chart-local rather than global.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .scalar import CScalar, Scalar

CoeffLike = Union[CScalar, Scalar, int, Fraction]


@dataclass(frozen=True)
class ChartSpace:
    """An ordered tuple of named real coordinates, some marked periodic."""

    names: tuple[str, ...]
    periodic: tuple[bool, ...]

    def __post_init__(self):
        if len(self.names) != len(self.periodic):
            raise ValueError("names and periodic flags must align")
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate coordinate names: {self.names}")

    @staticmethod
    def euclidean(names: Sequence[str]) -> "ChartSpace":
        names = tuple(names)
        return ChartSpace(names, (False,) * len(names))

    @staticmethod
    def torus(names: Sequence[str]) -> "ChartSpace":
        names = tuple(names)
        return ChartSpace(names, (True,) * len(names))

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown coordinate {name!r} in chart {self.names}")

    def copies(self, k: int) -> "ChartSpace":
        """Product of k copies; coordinate u becomes u_1 .. u_k."""
        names = tuple(f"{n}_{j}" for j in range(1, k + 1) for n in self.names)
        periodic = tuple(p for _ in range(k) for p in self.periodic)
        return ChartSpace(names, periodic)

    def copy_map(self, j: int) -> dict[str, str]:
        """Variable map embedding this space as the j-th factor (1-based)."""
        return {n: f"{n}_{j}" for n in self.names}

    def to_json(self) -> dict:
        return {"names": list(self.names), "periodic": list(self.periodic)}

    @staticmethod
    def from_json(data: Mapping) -> "ChartSpace":
        return ChartSpace(tuple(data["names"]), tuple(bool(p) for p in data["periodic"]))


def _quarter_phase(q: Fraction) -> CScalar:
    """exp(2*pi*i*q) for q in (1/4)Z; these are the only exactly
    representable unit phases in the coefficient field."""
    q = q % 1
    table = {
        Fraction(0): CScalar.one(),
        Fraction(1, 4): CScalar.i(),
        Fraction(1, 2): -CScalar.one(),
        Fraction(3, 4): -CScalar.i(),
    }
    if q not in table:
        raise ValueError(
            f"phase exp(2*pi*i*{q}) is irrational over the scalar field; "
            "only quarter-integer arguments are exact"
        )
    return table[q]


class ChartFunction:
    """Immutable sparse function on a :class:`ChartSpace`."""

    __slots__ = ("space", "_terms")

    def __init__(
        self,
        space: ChartSpace,
        terms: Mapping[tuple[tuple[int, ...], tuple[int, ...]], CoeffLike] | None = None,
    ):
        clean: dict[tuple[tuple[int, ...], tuple[int, ...]], CScalar] = {}
        n = space.dim
        if terms:
            for (mon, freq), c in terms.items():
                mon = tuple(int(e) for e in mon)
                freq = tuple(int(k) for k in freq)
                if len(mon) != n or len(freq) != n:
                    raise ValueError("term arity does not match chart dimension")
                if any(e < 0 for e in mon):
                    raise ValueError("negative monomial exponent")
                for k, per in zip(freq, space.periodic):
                    if k != 0 and not per:
                        raise ValueError(
                            "Fourier frequency on a non-periodic coordinate"
                        )
                c = CScalar.coerce(c)
                if not c.is_zero():
                    key = (mon, freq)
                    acc = clean.get(key)
                    clean[key] = c if acc is None else acc + c
        object.__setattr__(self, "space", space)
        object.__setattr__(
            self, "_terms", {k: v for k, v in clean.items() if not v.is_zero()}
        )

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("ChartFunction is immutable")

    def __getstate__(self):
        return (self.space, self._terms)

    def __setstate__(self, state):
        object.__setattr__(self, "space", state[0])
        object.__setattr__(self, "_terms", state[1])

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(space: ChartSpace) -> "ChartFunction":
        return ChartFunction(space)

    @staticmethod
    def constant(space: ChartSpace, c: CoeffLike) -> "ChartFunction":
        zero = (0,) * space.dim
        return ChartFunction(space, {(zero, zero): CScalar.coerce(c)})

    @staticmethod
    def one(space: ChartSpace) -> "ChartFunction":
        return ChartFunction.constant(space, 1)

    @staticmethod
    def variable(space: ChartSpace, name: str) -> "ChartFunction":
        i = space.index(name)
        mon = tuple(1 if j == i else 0 for j in range(space.dim))
        zero = (0,) * space.dim
        return ChartFunction(space, {(mon, zero): CScalar.one()})

    @staticmethod
    def monomial(
        space: ChartSpace, exponents: Mapping[str, int], coeff: CoeffLike = 1
    ) -> "ChartFunction":
        mon = [0] * space.dim
        for name, e in exponents.items():
            mon[space.index(name)] = int(e)
        zero = (0,) * space.dim
        return ChartFunction(space, {(tuple(mon), zero): CScalar.coerce(coeff)})

    @staticmethod
    def fourier(
        space: ChartSpace, freqs: Mapping[str, int], coeff: CoeffLike = 1
    ) -> "ChartFunction":
        freq = [0] * space.dim
        for name, k in freqs.items():
            freq[space.index(name)] = int(k)
        zero = (0,) * space.dim
        return ChartFunction(space, {(zero, tuple(freq)): CScalar.coerce(coeff)})

    @staticmethod
    def cosine(space: ChartSpace, name: str, k: int = 1, coeff: CoeffLike = 1) -> "ChartFunction":
        """coeff * cos(2*pi*k*name) as a two-mode Fourier sum."""
        half = CScalar.coerce(coeff) * CScalar(Fraction(1, 2))
        return ChartFunction.fourier(space, {name: k}, half) + ChartFunction.fourier(
            space, {name: -k}, half
        )

    @staticmethod
    def sine(space: ChartSpace, name: str, k: int = 1, coeff: CoeffLike = 1) -> "ChartFunction":
        """coeff * sin(2*pi*k*name)."""
        half_over_i = CScalar.coerce(coeff) * CScalar(0, Fraction(-1, 2))
        return ChartFunction.fourier(space, {name: k}, half_over_i) + ChartFunction.fourier(
            space, {name: -k}, -half_over_i
        )

    # -- structure -------------------------------------------------------

    @property
    def terms(self) -> dict[tuple[tuple[int, ...], tuple[int, ...]], CScalar]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_polynomial(self) -> bool:
        return all(all(k == 0 for k in freq) for (_, freq) in self._terms)

    def is_trig(self) -> bool:
        return all(all(e == 0 for e in mon) for (mon, _) in self._terms)

    def is_global(self) -> bool:
        """Well-defined on the torus itself: no lifted-coordinate dependence."""
        for (mon, _), _c in self._terms.items():
            for e, per in zip(mon, self.space.periodic):
                if e != 0 and per:
                    return False
        return True

    def is_constant(self) -> bool:
        zero = (0,) * self.space.dim
        return set(self._terms) <= {(zero, zero)}

    def constant_value(self) -> CScalar:
        if not self.is_constant():
            raise ValueError(f"not a constant function: {self}")
        zero = (0,) * self.space.dim
        return self._terms.get((zero, zero), CScalar.zero())

    def is_real(self) -> bool:
        """Conjugate symmetry: coeff(mon, -k) == conj(coeff(mon, k))."""
        for (mon, freq), c in self._terms.items():
            mirror = self._terms.get((mon, tuple(-k for k in freq)), CScalar.zero())
            if mirror != c.conj():
                return False
        return True

    def conj(self) -> "ChartFunction":
        return ChartFunction(
            self.space,
            {
                (mon, tuple(-k for k in freq)): c.conj()
                for (mon, freq), c in self._terms.items()
            },
        )

    def total_degree(self) -> int:
        return max((sum(mon) for (mon, _) in self._terms), default=0)

    def max_frequency(self) -> int:
        return max(
            (max((abs(k) for k in freq), default=0) for (_, freq) in self._terms),
            default=0,
        )

    # -- arithmetic --------------------------------------------------------

    def _check_space(self, other: "ChartFunction"):
        if self.space != other.space:
            raise ValueError(
                f"chart mismatch: {self.space.names} vs {other.space.names}"
            )

    def __add__(self, other) -> "ChartFunction":
        if isinstance(other, (CScalar, Scalar, int, Fraction)):
            other = ChartFunction.constant(self.space, other)
        self._check_space(other)
        out = dict(self._terms)
        for key, c in other._terms.items():
            acc = out.get(key)
            out[key] = c if acc is None else acc + c
        return ChartFunction(self.space, out)

    __radd__ = __add__

    def __neg__(self) -> "ChartFunction":
        return ChartFunction(self.space, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "ChartFunction":
        if isinstance(other, (CScalar, Scalar, int, Fraction)):
            other = ChartFunction.constant(self.space, other)
        return self + (-other)

    def __rsub__(self, other) -> "ChartFunction":
        return (-self) + other

    def scale(self, c: CoeffLike) -> "ChartFunction":
        c = CScalar.coerce(c)
        return ChartFunction(self.space, {k: c * v for k, v in self._terms.items()})

    def __mul__(self, other) -> "ChartFunction":
        if isinstance(other, (CScalar, Scalar, int, Fraction)):
            return self.scale(other)
        self._check_space(other)
        out: dict[tuple[tuple[int, ...], tuple[int, ...]], CScalar] = {}
        for (m1, f1), c1 in self._terms.items():
            for (m2, f2), c2 in other._terms.items():
                key = (
                    tuple(a + b for a, b in zip(m1, m2)),
                    tuple(a + b for a, b in zip(f1, f2)),
                )
                c = c1 * c2
                acc = out.get(key)
                out[key] = c if acc is None else acc + c
        return ChartFunction(self.space, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "ChartFunction":
        if not isinstance(n, int) or n < 0:
            raise TypeError("power must be a nonnegative integer")
        result = ChartFunction.one(self.space)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChartFunction):
            return NotImplemented
        return self.space == other.space and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.space, frozenset(self._terms.items())))

    # -- calculus ------------------------------------------------------------

    def derive(self, name: str) -> "ChartFunction":
        """Exact partial derivative; Fourier modes pick up 2*pi*i*k."""
        i = self.space.index(name)
        out: dict[tuple[tuple[int, ...], tuple[int, ...]], CScalar] = {}

        def add(key, c):
            if c.is_zero():
                return
            acc = out.get(key)
            out[key] = c if acc is None else acc + c

        for (mon, freq), c in self._terms.items():
            if mon[i] > 0:
                dm = list(mon)
                dm[i] -= 1
                add((tuple(dm), freq), c * CScalar(Fraction(mon[i])))
            if freq[i] != 0:
                add((mon, freq), c * CScalar(0, Scalar.pi(1, 2 * freq[i])))
        return ChartFunction(self.space, out)

    def torus_mean(self) -> CScalar:
        """Mean over the torus (unit volume).  Requires a global function."""
        if not all(self.space.periodic):
            raise ValueError("torus mean requires an all-periodic chart")
        if not self.is_global():
            raise ValueError(
                "function depends on lifted coordinates; not globally defined"
            )
        zero = (0,) * self.space.dim
        return self._terms.get((zero, zero), CScalar.zero())

    # -- substitution machinery ------------------------------------------

    def embed(self, target: ChartSpace, var_map: Mapping[str, str]) -> "ChartFunction":
        """Rename coordinates into a (possibly larger) chart."""
        idx = []
        for name in self.space.names:
            new = var_map.get(name, name)
            idx.append(target.index(new))
        out: dict[tuple[tuple[int, ...], tuple[int, ...]], CScalar] = {}
        for (mon, freq), c in self._terms.items():
            m2 = [0] * target.dim
            f2 = [0] * target.dim
            for j, (e, k) in enumerate(zip(mon, freq)):
                m2[idx[j]] += e
                f2[idx[j]] += k
            key = (tuple(m2), tuple(f2))
            acc = out.get(key)
            out[key] = c if acc is None else acc + c
        return ChartFunction(target, out)

    def identify(self, source: str, target: str) -> "ChartFunction":
        """Substitute coordinate ``source := target`` within the same chart."""
        i, j = self.space.index(source), self.space.index(target)
        if i == j:
            return self
        out: dict[tuple[tuple[int, ...], tuple[int, ...]], CScalar] = {}
        for (mon, freq), c in self._terms.items():
            m2, f2 = list(mon), list(freq)
            m2[j] += m2[i]
            f2[j] += f2[i]
            m2[i] = 0
            f2[i] = 0
            key = (tuple(m2), tuple(f2))
            acc = out.get(key)
            out[key] = c if acc is None else acc + c
        return ChartFunction(self.space, out)

    def shift(self, delta: Mapping[str, Fraction]) -> "ChartFunction":
        """Return g with g(u) = f(u + delta).

        Monomials expand binomially; Fourier modes pick up the exact unit
        phase exp(2*pi*i*k*delta), so k*delta must be quarter-integral (frame
        translations in this package are always by integer lattice vectors).
        """
        dvec = [Fraction(delta.get(n, 0)) for n in self.space.names]
        result = ChartFunction.zero(self.space)
        from math import comb

        for (mon, freq), c in self._terms.items():
            phase_arg = sum((Fraction(k) * d for k, d in zip(freq, dvec)), Fraction(0))
            coeff = c * _quarter_phase(phase_arg)
            # expand prod (u_i + d_i)^{e_i}
            expanded: dict[tuple[int, ...], Fraction] = {(0,) * 0: Fraction(1)}
            exps: list[tuple[int, Fraction]] = list(zip(mon, dvec))
            keys: list[tuple[tuple[int, ...], Fraction]] = [((), Fraction(1))]
            for e, d in exps:
                new_keys = []
                for prefix, w in keys:
                    for r in range(e + 1):
                        new_keys.append((prefix + (r,), w * comb(e, r) * d ** (e - r)))
                keys = new_keys
            terms = {}
            for mon2, w in keys:
                if w == 0:
                    continue
                key = (mon2, freq)
                acc = terms.get(key)
                add = coeff * CScalar(Scalar.rational(w))
                terms[key] = add if acc is None else acc + add
            result = result + ChartFunction(self.space, terms)
        return result

    def evaluate(self, point: Mapping[str, Fraction]) -> CScalar:
        """Exact evaluation at a rational point.

        Fourier factors require frequency*coordinate to be quarter-integral.
        """
        pvec = [Fraction(point[n]) for n in self.space.names]
        total = CScalar.zero()
        for (mon, freq), c in self._terms.items():
            w = Fraction(1)
            for e, x in zip(mon, pvec):
                w *= x**e
            phase_arg = sum((Fraction(k) * x for k, x in zip(freq, pvec)), Fraction(0))
            total = total + c * CScalar(Scalar.rational(w)) * _quarter_phase(phase_arg)
        return total

    # -- rendering ---------------------------------------------------------

    def _sorted_terms(self):
        return sorted(self._terms.items(), key=lambda kv: (kv[0][0], kv[0][1]))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        chunks = []
        for (mon, freq), c in self._sorted_terms():
            factors = []
            for name, e in zip(self.space.names, mon):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            nz = {n: k for n, k in zip(self.space.names, freq) if k != 0}
            if nz:
                arg = "+".join(f"{k}{n}" for n, k in nz.items())
                factors.append(f"e({arg})")
            body = "*".join(factors) if factors else "1"
            chunks.append(f"({c})*{body}")
        return " + ".join(chunks)

    def __repr__(self) -> str:
        return f"ChartFunction({self})"

    def kind(self) -> str:
        if self.is_polynomial():
            return "poly"
        if self.is_trig():
            return "trig"
        return "mixed"

    def to_json(self) -> dict:
        return {
            "space": self.space.to_json(),
            "kind": self.kind(),
            "terms": [
                {
                    "mon": list(mon),
                    "freq": list(freq),
                    "re": c.re.to_json(),
                    "im": c.im.to_json(),
                }
                for (mon, freq), c in self._sorted_terms()
            ],
        }

    @staticmethod
    def from_json(data: Mapping) -> "ChartFunction":
        space = ChartSpace.from_json(data["space"])
        terms = {}
        for item in data["terms"]:
            key = (tuple(item["mon"]), tuple(item["freq"]))
            terms[key] = CScalar(
                Scalar.from_json(item["re"]), Scalar.from_json(item["im"])
            )
        return ChartFunction(space, terms)


def function_sum(space: ChartSpace, items: Iterable[ChartFunction]) -> ChartFunction:
    total = ChartFunction.zero(space)
    for f in items:
        total = total + f
    return total

import random
from fractions import Fraction

import pytest

from starbundle.chartfn import ChartFunction, ChartSpace
from starbundle.forms import DifferentialForm
from starbundle.scalar import CScalar, Scalar


def random_fraction(rng, max_num=5, max_den=4):
    num = rng.randint(-max_num, max_num)
    den = rng.randint(1, max_den)
    return Fraction(num, den)


def random_scalar(rng, allow_pi=True):
    terms = {}
    for _ in range(rng.randint(1, 2)):
        m = rng.choice([-1, 0, 0, 1]) if allow_pi else 0
        terms[m] = random_fraction(rng)
    return Scalar(terms)


def random_cscalar(rng, allow_pi=True):
    return CScalar(random_scalar(rng, allow_pi), random_scalar(rng, allow_pi))


def random_poly(space: ChartSpace, rng, max_deg=3, n_terms=4):
    total = ChartFunction.zero(space)
    for _ in range(n_terms):
        exps = {}
        budget = max_deg
        for name in space.names:
            e = rng.randint(0, budget)
            budget -= e
            if e:
                exps[name] = e
        total = total + ChartFunction.monomial(space, exps, random_fraction(rng))
    return total


def random_trig(space: ChartSpace, rng, max_freq=2, n_terms=3, real=True):
    total = ChartFunction.zero(space)
    for _ in range(n_terms):
        freqs = {n: rng.randint(-max_freq, max_freq) for n in space.names}
        coeff = random_cscalar(rng, allow_pi=False)
        mode = ChartFunction.fourier(space, freqs, coeff)
        if real:
            mode = mode + mode.conj()
        total = total + mode
    return total


def random_form(manifold, degree, rng, trig=False, max_deg=2, max_freq=2):
    import itertools

    space = manifold.space
    ncov = len(manifold.covectors)
    terms = {}
    for idx in itertools.combinations(range(ncov), degree):
        if rng.random() < 0.4:
            continue
        coeff = (
            random_trig(space, rng, max_freq=max_freq, n_terms=2)
            if trig
            else random_poly(space, rng, max_deg=max_deg, n_terms=2)
        )
        terms[idx] = coeff
    return DifferentialForm(manifold, terms)


@pytest.fixture
def rng():
    return random.Random(20260811)

"""
Shared fixtures and builders for the qfib test suite.
"""
import random

import pytest
from sympy import Rational

from qfib.services.exactmath import UniPoly
from qfib.services.fibration import FibrationSpec
from qfib.utils.parsers import parse_poly


def poly(text):
    return parse_poly(text)


def diagonal(*entries):
    """Diagonal fibration from polynomial texts or rationals."""
    return FibrationSpec.diagonal(*(poly(e) if isinstance(e, str) else UniPoly.constant(e) for e in entries))


def random_rational(rng, bound=9, denominator=4):
    return Rational(rng.randint(-bound, bound), rng.randint(1, denominator))


def random_nonzero_rational(rng, bound=9, denominator=4):
    value = Rational(0)
    while value == 0:
        value = random_rational(rng, bound, denominator)
    return value


def random_positive_separable(rng, max_degree=6):
    """Monic product of distinct irreducible-over-R quadratics (u - c)^2 + d, d > 0."""
    while True:
        result = UniPoly.one()
        for _ in range(rng.randint(1, max_degree // 2)):
            c = random_rational(rng)
            d = Rational(rng.randint(1, 9), rng.randint(1, 4))
            result = result * (UniPoly.from_coeffs([c * c + d, -2 * c, 1]))
        if result.gcd(result.derivative()).degree == 0:
            return result


def random_poly(rng, max_degree=3):
    """Random nonzero polynomial: a constant times a product of linear and quadratic factors."""
    result = UniPoly.constant(random_nonzero_rational(rng))
    for _ in range(rng.randint(0, max_degree)):
        if rng.random() < 0.6:
            result = result * UniPoly.from_coeffs([random_rational(rng), 1])
        else:
            result = result * UniPoly.from_coeffs([random_rational(rng), random_rational(rng), 1])
    return result


@pytest.fixture
def rng():
    return random.Random(20240611)

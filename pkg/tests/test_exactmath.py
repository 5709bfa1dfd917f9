import pytest
from sympy import Poly, Rational, oo

from qfib.exceptions import InvalidInput
from qfib.services.exactmath import (
    BiPoly,
    RationalFunction,
    U,
    V,
    UniPoly,
    exact_div_u_plus_v,
    is_nonnegative,
    is_positive,
    is_rational_square,
    isolate_real_roots,
    real_roots_of_irreducible,
    separability_check,
    sign_at,
    sturm_root_count,
    to_rational,
)
from tests.conftest import poly, random_nonzero_rational, random_rational


def dense_poly(rng, max_degree, min_degree=0):
    coefficients = [random_rational(rng) for _ in range(rng.randint(min_degree, max_degree))]
    coefficients.append(random_nonzero_rational(rng))
    return UniPoly.from_coeffs(coefficients)


@pytest.mark.parametrize("value, expected", [
    ("3/4", Rational(3, 4)),
    ("-6/4", Rational(-3, 2)),
    ("7", Rational(7)),
    (5, Rational(5)),
])
def test_to_rational(value, expected):
    assert to_rational(value) == expected


@pytest.mark.parametrize("value", ["1.5", "1/0", "x", True, 0.5])
def test_to_rational_rejects(value):
    with pytest.raises(InvalidInput):
        to_rational(value)


def test_coefficients_are_ascending():
    p = UniPoly.from_coeffs([1, 0, 2])
    assert p.degree == 2
    assert p.coeff(0) == 1
    assert p.leading_coefficient == 2
    assert p(2) == 9
    assert UniPoly.zero().degree == -1


@pytest.mark.parametrize("text, separable, witness_degree", [
    ("u^2+1", True, 0),
    ("(u^2+u+1)^2", False, 2),
    ("u(u^2+1)", True, 0),
])
def test_separability(text, separable, witness_degree):
    result = separability_check(poly(text))
    assert result.separable is separable
    assert result.witness.degree == witness_degree


def test_separability_of_zero_is_invalid():
    with pytest.raises(InvalidInput):
        separability_check(UniPoly.zero())


@pytest.mark.parametrize("text, count", [
    ("u^2+1", 0),
    ("u(u^2+1)", 1),
    ("u^2-3u+3", 0),
    ("u^2-2", 2),
])
def test_sturm_root_count(text, count):
    assert sturm_root_count(poly(text), -oo, oo) == count


def test_sturm_root_count_half_open_interval():
    f = poly("u(u-1)")
    assert sturm_root_count(f, 0, 1) == 1
    assert sturm_root_count(f, -1, 0) == 1


def test_isolate_two_irrational_roots():
    roots = isolate_real_roots(poly("u^2-2"))
    assert len(roots) == 2
    (negative, m1), (positive, m2) = roots
    assert m1 == m2 == 1
    assert negative.hi <= positive.lo
    assert negative.hi < 0 < positive.lo
    assert positive.lo ** 2 <= 2 <= positive.hi ** 2


def test_isolate_no_real_roots():
    assert isolate_real_roots(poly("u^2+1")) == []


def test_isolate_multiple_root():
    roots = isolate_real_roots(poly("u^3"))
    assert len(roots) == 1
    root, multiplicity = roots[0]
    assert root.is_rational and root.rational() == 0
    assert multiplicity == 3


def _sqrt2(positive):
    roots = real_roots_of_irreducible(poly("u^2-2"))
    return max(roots, key=lambda r: r.lo) if positive else min(roots, key=lambda r: r.lo)


@pytest.mark.parametrize("g, positive, expected", [
    ("u-1", True, 1),
    ("u-1", False, -1),
    ("u^2-2", True, 0),
    ("u-3/2", True, -1),
    ("u-7/5", True, 1),
])
def test_sign_at_real_algebraic(g, positive, expected):
    assert sign_at(poly(g), _sqrt2(positive)) == expected


@pytest.mark.parametrize("p, r", [
    ("u^2+1", "u**2 - u*v + v**2 + 1"),
    ("u^2-3u+3", "u**2 - u*v + v**2 - 3*u + 3*v + 3"),
    ("1", "1"),
])
def test_exact_div_u_plus_v(p, r):
    assert exact_div_u_plus_v(poly(p)) == BiPoly.from_expr(r)


def test_homogeneous_components():
    parts = exact_div_u_plus_v(poly("u^2+1")).homogeneous_components()
    assert parts[0] == UniPoly.one()
    assert parts[1].is_zero
    assert parts[2] == poly("u^2-u+1")


@pytest.mark.parametrize("text, nonnegative, positive", [
    ("u^2+1", True, True),
    ("u^2", True, False),
    ("u^2-1", False, False),
    ("(u-1)^2(u^2+1)", True, False),
    ("-u^2-1", False, False),
])
def test_positivity_predicates(text, nonnegative, positive):
    assert is_nonnegative(poly(text)) is nonnegative
    assert is_positive(poly(text)) is positive


def test_rational_function_lowest_terms():
    h = RationalFunction(poly("2u^2-2"), poly("2u-2"))
    assert h.num == poly("u+1")
    assert h.den == UniPoly.one()


def test_rational_function_valuations():
    h = RationalFunction(poly("u^2(u+1)"), poly("u-2"))
    assert h.valuation(poly("u")) == 2
    assert h.valuation(poly("u-2")) == -1
    assert h.valuation_at_infinity == -2
    assert h.leading_ratio == 1


def test_irreducible_factors_are_monic():
    content, factors = poly("2u^3+2u").irreducible_factors()
    assert content == 2
    assert factors == [(poly("u"), 1), (poly("u^2+1"), 1)]


def test_multiplicity():
    k, rest = poly("u^3(u+1)").multiplicity(poly("u"))
    assert k == 3
    assert rest == poly("u+1")


@pytest.mark.parametrize("value, square", [(Rational(9, 4), True), (Rational(2, 3), False), (Rational(-1), False), (0, True)])
def test_is_rational_square(value, square):
    assert is_rational_square(value) is square


def test_exact_div_u_plus_v_identity(rng):
    for _ in range(100):
        p = dense_poly(rng, 10)
        dividend = BiPoly.from_expr(U * p.as_expr() + V * p.negated_argument().as_expr(V))
        assert (BiPoly.from_expr(U + V) * exact_div_u_plus_v(p) - dividend).is_zero


def test_sturm_count_matches_distinct_real_roots(rng):
    for _ in range(100):
        f = dense_poly(rng, 8)
        assert sturm_root_count(f) == len(set(Poly(f.as_expr(), U).real_roots()))


def test_sign_at_is_stable_under_refinement(rng):
    for _ in range(40):
        g = dense_poly(rng, 5, min_degree=1)
        h = dense_poly(rng, 4)
        for alpha, _ in isolate_real_roots(g):
            expected = sign_at(h, alpha)
            assert sign_at(h, alpha.refined()) == expected
            assert sign_at(h, alpha.refined().refined().refined()) == expected


def test_square_is_never_separable(rng):
    for _ in range(50):
        f = dense_poly(rng, 5, min_degree=1)
        assert not separability_check(f * f).separable

import pytest
from sympy import Rational

from qfib.exceptions import InvalidInput
from qfib.services.exactmath import RationalFunction, UniPoly
from qfib.services.symbols import (
    REAL_PLACE,
    ClosedPointR,
    FaddeevKind,
    QuaternionSymbol,
    ResidueClass,
    faddeev_decide,
    hilbert_product,
    hilbert_symbol,
    normalize_place,
    residue_profile,
    same_class,
    tame_residue,
)
from tests.conftest import poly, random_nonzero_rational, random_poly, random_positive_separable


def symbol(f, g):
    return QuaternionSymbol(RationalFunction.of(poly(f)), RationalFunction.of(poly(g)))


def agree_everywhere(first, second):
    points = list(first.points) + [point for point in second.points if point not in first.points]
    return all(first.get(point) == second.get(point) for point in points)


@pytest.mark.parametrize("f, g, point, expected", [
    ("-u(u^2+1)", "u+1", 0, ResidueClass.TRIVIAL),
    ("-u(u^2+1)", "u+1", -1, ResidueClass.TRIVIAL),
    ("-1", "u", 0, ResidueClass.NONTRIVIAL),
    ("u", "1-u", 0, ResidueClass.TRIVIAL),
    ("u", "1-u", 1, ResidueClass.TRIVIAL),
])
def test_tame_residue(f, g, point, expected):
    assert tame_residue(symbol(f, g), ClosedPointR.rational(point)) == expected


def test_tame_residue_at_infinity():
    assert tame_residue(symbol("-1", "u"), ClosedPointR.infinity()) == ResidueClass.NONTRIVIAL
    assert tame_residue(symbol("u", "1-u"), ClosedPointR.infinity()) == ResidueClass.TRIVIAL


@pytest.mark.parametrize("f, g, expected", [
    ("-1", "u", {"0": "nontrivial", "inf": "nontrivial"}),
    ("u", "u", {"0": "nontrivial", "inf": "nontrivial"}),
])
def test_residue_profile(f, g, expected):
    assert residue_profile(symbol(f, g)).as_dict() == expected


def test_residue_profile_of_local_global_symbol_is_trivial():
    profile = residue_profile(symbol("-u(u^2+1)", "u+1"))
    assert profile.is_trivial
    assert set(profile.as_dict()) == {"-1", "0", "inf"}


def test_residue_at_irrational_point():
    profile = residue_profile(symbol("-1", "u^2-2"))
    assert len(profile.nontrivial_points()) == 2
    assert ClosedPointR.infinity() not in profile.nontrivial_points()


def test_steinberg_symbol_is_everywhere_trivial():
    for shift in range(-3, 4):
        f = poly("u").translated(shift)
        assert residue_profile(QuaternionSymbol(f, 1 - f)).is_trivial


def test_steinberg_symbols_on_random_functions(rng):
    for _ in range(100):
        f = RationalFunction(random_poly(rng), random_poly(rng, 2))
        if (1 - f).is_zero:
            continue
        assert residue_profile(QuaternionSymbol(f, 1 - f)).is_trivial


@pytest.mark.parametrize("f, g, kind, ramified", [
    ("-u(u^2+1)", "u+1", FaddeevKind.TRIVIAL, []),
    ("-1", "-1", FaddeevKind.CONSTANT_NONTRIVIAL, []),
    ("-1", "u", FaddeevKind.RAMIFIED, ["0", "inf"]),
])
def test_faddeev_decide(f, g, kind, ramified):
    result = faddeev_decide(symbol(f, g))
    assert result.kind == kind
    assert [point.label for point in result.profile.nontrivial_points()] == ramified


def test_faddeev_local_global_family(rng):
    for _ in range(50):
        p = random_positive_separable(rng)
        a = abs(random_nonzero_rational(rng))
        f = -(poly("u") * p)
        g = poly("u") + a
        assert faddeev_decide(QuaternionSymbol(f, g)).kind == FaddeevKind.TRIVIAL


def test_residue_parity_on_random_symbols(rng):
    for _ in range(500):
        f = RationalFunction(random_poly(rng), random_poly(rng, 1))
        g = random_poly(rng)
        assert residue_profile(QuaternionSymbol(f, g)).parity_ok


def test_combine_is_pointwise_product():
    first = residue_profile(symbol("-1", "u"))
    second = residue_profile(symbol("u", "u"))
    assert first.combine(second).is_trivial
    assert first.combine(residue_profile(symbol("-1", "u-1"))).as_dict() == {
        "0": "nontrivial", "1": "nontrivial", "inf": "trivial",
    }


def test_residues_are_bimultiplicative(rng):
    for _ in range(60):
        f1, f2, g = random_poly(rng), random_poly(rng), random_poly(rng)
        product = residue_profile(QuaternionSymbol(f1 * f2, g))
        combined = residue_profile(QuaternionSymbol(f1, g)).combine(residue_profile(QuaternionSymbol(f2, g)))
        assert agree_everywhere(product, combined)


def test_residues_ignore_squares(rng):
    for _ in range(60):
        f, g, h = random_poly(rng), random_poly(rng), random_poly(rng, 2)
        assert agree_everywhere(
            residue_profile(QuaternionSymbol(f * h * h, g)),
            residue_profile(QuaternionSymbol(f, g)),
        )


@pytest.mark.parametrize("first, second, expected", [
    (("-(1+u^2)", "u(u^2+2)"), ("-1", "u"), True),
    (("-(1+u^2)", "-u(u^2+2)"), ("-1", "u"), False),
    (("u", "1-u"), ("1", "1"), True),
    (("-1", "u"), ("-1", "u-1"), False),
])
def test_same_class(first, second, expected):
    assert same_class(symbol(*first), symbol(*second)) is expected


def test_zero_entry_is_rejected():
    with pytest.raises(InvalidInput):
        QuaternionSymbol(UniPoly.zero(), UniPoly.one())


@pytest.mark.parametrize("a, b, place, expected", [
    (-1, -3, 3, -1),
    (-1, -1, REAL_PLACE, -1),
    (2, 3, 5, 1),
    (-1, -1, 2, -1),
    (2, 5, 5, -1),
    (Rational(1, 3), -1, 3, -1),
    (3, 7, REAL_PLACE, 1),
])
def test_hilbert_symbol(a, b, place, expected):
    assert hilbert_symbol(a, b, place) == expected


@pytest.mark.parametrize("place, expected", [("real", REAL_PLACE), ("inf", REAL_PLACE), ("3", 3), (7, 7)])
def test_normalize_place(place, expected):
    assert normalize_place(place) == expected


@pytest.mark.parametrize("place", ["4", 1, "x", True])
def test_normalize_place_rejects(place):
    with pytest.raises(InvalidInput):
        normalize_place(place)


def test_hilbert_zero_argument():
    with pytest.raises(InvalidInput):
        hilbert_symbol(0, 1, 3)


def test_hilbert_product_formula(rng):
    for _ in range(500):
        a = random_nonzero_rational(rng, 60, 12)
        b = random_nonzero_rational(rng, 60, 12)
        product = 1
        for value in hilbert_product(a, b).values():
            product *= value
        assert product == 1


def test_hilbert_bimultiplicative(rng):
    places = [REAL_PLACE, 2, 3, 5, 7]
    for _ in range(200):
        a = random_nonzero_rational(rng, 30, 6)
        a2 = random_nonzero_rational(rng, 30, 6)
        b = random_nonzero_rational(rng, 30, 6)
        for place in places:
            assert hilbert_symbol(a * a2, b, place) == hilbert_symbol(a, b, place) * hilbert_symbol(a2, b, place)
            assert hilbert_symbol(a, b, place) == hilbert_symbol(b, a, place)


def test_hilbert_symbol_of_norm_is_trivial(rng):
    for _ in range(100):
        a = random_nonzero_rational(rng, 30, 6)
        for place in (REAL_PLACE, 2, 3, 5):
            if a != 1:
                assert hilbert_symbol(a, 1 - a, place) == 1
            assert hilbert_symbol(a, -a, place) == 1


def test_hilbert_values_are_plain_integers():
    assert type(hilbert_symbol(-1, -3, 3)) is int
    assert all(type(value) is int for value in hilbert_product(-1, -3).values())
    assert all(type(value) is int for value in hilbert_product(Rational(5, 7), 6).values())

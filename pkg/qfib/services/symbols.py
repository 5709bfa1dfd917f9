"""
Quaternion symbols over R(u): tame residues at real points of P^1, the
Faddeev decision between trivial, constant and ramified classes, and
Hilbert symbols over R and Q_p.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import count

from sympy import factorint, isprime, legendre_symbol, multiplicity

from qfib.config.settings import REFINE_LIMIT
from qfib.exceptions import InternalInvariantError, InvalidInput
from qfib.services.exactmath import (
    RationalFunction,
    RealAlgebraic,
    UniPoly,
    real_roots_of_irreducible,
    sign,
    sign_at,
    to_rational,
)

logger = logging.getLogger(__name__)

REAL_PLACE = "real"


class ResidueClass(str, Enum):
    TRIVIAL = "trivial"
    NONTRIVIAL = "nontrivial"

    @classmethod
    def of_sign(cls, value):
        return cls.TRIVIAL if value > 0 else cls.NONTRIVIAL

    def __mul__(self, other):
        return ResidueClass.TRIVIAL if self == other else ResidueClass.NONTRIVIAL


class PointKind(str, Enum):
    RATIONAL = "rational"
    ALGEBRAIC = "algebraic"
    INFINITY = "infinity"


@dataclass(frozen=True)
class ClosedPointR:
    """
    A real point of P^1: a rational number, a real root of an irreducible
    polynomial of degree >= 2 (identified by the index among its real roots),
    or infinity.
    """

    kind: PointKind
    minpoly: UniPoly = None
    index: int = 0
    root: RealAlgebraic = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind == PointKind.ALGEBRAIC and self.minpoly.degree < 2:
            raise InvalidInput("An algebraic point needs a minimal polynomial of degree >= 2")

    @classmethod
    def rational(cls, value):
        root = RealAlgebraic.rational(value)
        return cls(PointKind.RATIONAL, root.minpoly, 0, root)

    @classmethod
    def infinity(cls):
        return cls(PointKind.INFINITY)

    @classmethod
    def from_root(cls, minpoly, index, root):
        if minpoly.degree == 1:
            return cls.rational(root.lo)
        return cls(PointKind.ALGEBRAIC, minpoly, index, root)

    @property
    def is_infinity(self):
        return self.kind == PointKind.INFINITY

    @property
    def value(self):
        """The rational coordinate of a rational point."""
        if self.kind != PointKind.RATIONAL:
            raise InvalidInput(f"{self.label} is not a rational point")
        return self.root.lo

    @property
    def label(self):
        if self.is_infinity:
            return "inf"
        return str(self.root)

    @property
    def sort_key(self):
        if self.is_infinity:
            return (1, 0, 0)
        return (0, self.root.lo, self.root.hi)

    def __str__(self):
        return self.label


def real_points_of(factor):
    """Real points cut out by a monic irreducible polynomial."""
    return [
        ClosedPointR.from_root(factor, index, root)
        for index, root in enumerate(real_roots_of_irreducible(factor))
    ]


def local_data(h, point, refine_limit=REFINE_LIMIT):
    """
    Valuation of h at a real point and the sign of its unit part there.

    At infinity the coordinate is 1/u, so the valuation is deg(den) - deg(num)
    and the unit sign is the sign of the leading coefficient ratio.

    Args:
        h: A nonzero UniPoly or RationalFunction
        point: A ClosedPointR

    Returns:
        tuple: (valuation, unit sign in {-1, +1})
    """
    h = RationalFunction.of(h)
    if h.is_zero:
        raise InvalidInput("Local data of the zero function is undefined")
    if point.is_infinity:
        return h.valuation_at_infinity, sign(h.leading_ratio)
    valuation = h.valuation(point.minpoly)
    num, den = h.unit_parts(point.minpoly)
    return valuation, sign_at(num, point.root, refine_limit) * sign_at(den, point.root, refine_limit)


@dataclass(frozen=True)
class QuaternionSymbol:
    """The quaternion algebra (f, g) over R(u), f and g nonzero rational functions."""

    f: RationalFunction
    g: RationalFunction

    def __post_init__(self):
        object.__setattr__(self, "f", RationalFunction.of(self.f))
        object.__setattr__(self, "g", RationalFunction.of(self.g))
        if self.f.is_zero or self.g.is_zero:
            raise InvalidInput("Quaternion symbol entries must be nonzero")

    def ramification_factors(self):
        """Monic irreducible factors of the numerators and denominators of f and g."""
        factors = {}
        for poly in (*self.f.polynomials(), *self.g.polynomials()):
            if poly.is_constant:
                continue
            for factor, _ in poly.irreducible_factors()[1]:
                factors[factor] = None
        return list(factors)

    def ramification_points(self):
        """Real points where f or g has nonzero valuation, ordered left to right, infinity last."""
        points = [point for factor in self.ramification_factors() for point in real_points_of(factor)]
        if self.f.valuation_at_infinity or self.g.valuation_at_infinity:
            points.append(ClosedPointR.infinity())
        return sorted(points, key=lambda point: point.sort_key)

    def unramified_rational_point(self):
        """First of 0, 1, -1, 2, -2, ... where f and g are regular units."""
        polys = [*self.f.polynomials(), *self.g.polynomials()]
        for candidate in _rational_candidates():
            if all(poly(candidate) != 0 for poly in polys):
                return candidate
        raise InternalInvariantError("No unramified rational point found")

    def __str__(self):
        return f"({self.f}, {self.g})"


def _rational_candidates():
    yield to_rational(0)
    for n in count(1):
        yield to_rational(n)
        yield to_rational(-n)


def tame_residue(symbol, point, refine_limit=REFINE_LIMIT):
    """
    Residue of a quaternion symbol at a real point of P^1.

    The residue is the square class of (-1)^(v(f)v(g)) f^v(g) g^(-v(f)) at the
    point; over a real point it is trivial exactly when that value is positive.

    Args:
        symbol: The QuaternionSymbol
        point: A ClosedPointR

    Returns:
        ResidueClass: TRIVIAL or NONTRIVIAL
    """
    vf, sf = local_data(symbol.f, point, refine_limit)
    vg, sg = local_data(symbol.g, point, refine_limit)
    value = (-1) ** ((vf * vg) % 2) * sf ** (vg % 2) * sg ** (vf % 2)
    return ResidueClass.of_sign(value)


@dataclass(frozen=True)
class ResidueProfile:
    """Residues at the real ramification points; points not listed are unramified."""

    entries: tuple = ()

    def get(self, point):
        for candidate, residue in self.entries:
            if candidate == point:
                return residue
        return ResidueClass.TRIVIAL

    __getitem__ = get

    @property
    def points(self):
        return [point for point, _ in self.entries]

    def nontrivial_points(self):
        return [point for point, residue in self.entries if residue == ResidueClass.NONTRIVIAL]

    @property
    def is_trivial(self):
        return not self.nontrivial_points()

    @property
    def parity_ok(self):
        return len(self.nontrivial_points()) % 2 == 0

    def combine(self, other):
        """Pointwise product with another profile."""
        points = list(self.points)
        points += [point for point in other.points if point not in points]
        points.sort(key=lambda point: point.sort_key)
        return ResidueProfile(tuple((point, self.get(point) * other.get(point)) for point in points))

    def as_dict(self):
        return {point.label: residue.value for point, residue in self.entries}


def residue_profile(symbol, refine_limit=REFINE_LIMIT):
    """
    Residues of a symbol at every real point where f or g is ramified.

    Args:
        symbol: The QuaternionSymbol

    Returns:
        ResidueProfile: with an even number of nontrivial entries
    """
    entries = tuple(
        (point, tame_residue(symbol, point, refine_limit)) for point in symbol.ramification_points()
    )
    profile = ResidueProfile(entries)
    if not profile.parity_ok:
        raise InternalInvariantError(f"Odd number of nontrivial residues for {symbol}: {profile.as_dict()}")
    logger.debug(f"Residue profile of {symbol}: {profile.as_dict()}")
    return profile


class FaddeevKind(str, Enum):
    TRIVIAL = "Trivial"
    CONSTANT_NONTRIVIAL = "ConstantNontrivial"
    RAMIFIED = "Ramified"


@dataclass(frozen=True)
class FaddeevResult:
    kind: FaddeevKind
    profile: ResidueProfile
    evaluation_point: object = None


def faddeev_decide(symbol, refine_limit=REFINE_LIMIT):
    """
    Decide whether a symbol is trivial, the constant class (-1, -1), or ramified.

    With every residue trivial the class comes from Br(R); its value is read off
    at a rational point where f and g are regular units.

    Args:
        symbol: The QuaternionSymbol

    Returns:
        FaddeevResult: the kind, the residue profile and the evaluation point used (if any)
    """
    profile = residue_profile(symbol, refine_limit)
    if not profile.is_trivial:
        return FaddeevResult(FaddeevKind.RAMIFIED, profile)
    point = symbol.unramified_rational_point()
    if symbol.f(point) < 0 and symbol.g(point) < 0:
        return FaddeevResult(FaddeevKind.CONSTANT_NONTRIVIAL, profile, point)
    return FaddeevResult(FaddeevKind.TRIVIAL, profile, point)


def same_class(first, second, refine_limit=REFINE_LIMIT):
    """
    Whether two symbols define the same class in Br(R(u)).

    Equal residues leave a constant difference, decided by evaluating both at a
    common unramified rational point.
    """
    difference = residue_profile(first, refine_limit).combine(residue_profile(second, refine_limit))
    if not difference.is_trivial:
        return False
    polys = [*first.f.polynomials(), *first.g.polynomials(), *second.f.polynomials(), *second.g.polynomials()]
    point = next(c for c in _rational_candidates() if all(poly(c) != 0 for poly in polys))
    value = hilbert_symbol(first.f(point), first.g(point), REAL_PLACE)
    value *= hilbert_symbol(second.f(point), second.g(point), REAL_PLACE)
    return value == 1


def normalize_place(place):
    """Accept "real"/"inf" for the real place and a prime (int or digit string) otherwise."""
    if isinstance(place, str):
        text = place.strip().lower()
        if text in ("real", "inf", "infinity", "oo"):
            return REAL_PLACE
        if not text.isdigit():
            raise InvalidInput(f"Unknown place {place!r}")
        place = int(text)
    if isinstance(place, bool) or not isinstance(place, int) or not isprime(place):
        raise InvalidInput(f"Place must be a prime or 'real', got {place!r}")
    return place


def _square_class_integer(value):
    """An integer in the same square class as a nonzero rational n/d, namely n*d."""
    return int(value.p) * int(value.q)


def _split(n, p):
    alpha = multiplicity(p, abs(n))
    return alpha, n // p ** alpha


def hilbert_symbol(a, b, place):
    """
    Hilbert symbol (a, b) at a place of Q.

    Args:
        a: Nonzero rational
        b: Nonzero rational
        place: A prime p, or REAL_PLACE

    Returns:
        int: +1 if z^2 = a x^2 + b y^2 has a nontrivial solution over the completion, else -1
    """
    a, b = to_rational(a), to_rational(b)
    if a == 0 or b == 0:
        raise InvalidInput("Hilbert symbol arguments must be nonzero")
    place = normalize_place(place)
    if place == REAL_PLACE:
        return -1 if a < 0 and b < 0 else 1
    p = place
    alpha, u = _split(_square_class_integer(a), p)
    beta, v = _split(_square_class_integer(b), p)
    if p == 2:
        def eps(x):
            return ((x - 1) // 2) % 2

        def omega(x):
            return ((x * x - 1) // 8) % 2

        exponent = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
        return -1 if exponent % 2 else 1
    eps_p = (p - 1) // 2
    value = (-1) ** ((alpha * beta * eps_p) % 2)
    if beta % 2:
        value *= int(legendre_symbol(u % p, p))
    if alpha % 2:
        value *= int(legendre_symbol(v % p, p))
    return int(value)


def hilbert_product(a, b):
    """
    Hilbert symbols of (a, b) at every place where they can be nontrivial.

    Returns:
        dict: {"2": ..., "3": ..., ..., "real": ...}; the product of the values is +1
    """
    a, b = to_rational(a), to_rational(b)
    if a == 0 or b == 0:
        raise InvalidInput("Hilbert symbol arguments must be nonzero")
    primes = {2}
    for n in (a.p, a.q, b.p, b.q):
        primes.update(factorint(abs(int(n))).keys())
    table = {str(p): hilbert_symbol(a, b, p) for p in sorted(primes)}
    table[REAL_PLACE] = hilbert_symbol(a, b, REAL_PLACE)
    return table

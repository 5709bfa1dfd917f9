"""
Diagonal quadric-surface bundles <q1, q2, q3, q4>(u) over P^1.

Type (I) classification, the discriminant curve, real component counts,
the Witt rationality shortcut and the Brauer obstruction driven by the set T
of real points with split-parity definite local models.
"""
import logging
from dataclasses import dataclass
from itertools import combinations

from sympy import Rational

from qfib.config.settings import REFINE_LIMIT
from qfib.exceptions import InvalidInput, NotAdmissible, PreconditionViolation
from qfib.services.exactmath import (
    UniPoly,
    V,
    is_rational_square,
    isolate_real_roots,
    separability_check,
    sign,
    to_rational,
)
from qfib.services.symbols import ClosedPointR, local_data, real_points_of

logger = logging.getLogger(__name__)

STANDARD = "standard"
DIAGONAL = "diagonal"


@dataclass(frozen=True)
class FibrationSpec:
    """
    The family of quadric surfaces q1 x^2 + q2 y^2 + q3 z^2 + q4 t^2 = 0 over P^1.

    A standard form also remembers (a, b, p) with q = <1, -a, -b, -u p(u)>.
    """

    q: tuple
    form: str = DIAGONAL
    a: Rational = None
    b: Rational = None
    p: UniPoly = None

    def __post_init__(self):
        if len(self.q) != 4:
            raise InvalidInput(f"A diagonal fibration has 4 entries, got {len(self.q)}")
        if any(entry.is_zero for entry in self.q):
            raise InvalidInput("Diagonal entries must be nonzero")

    @classmethod
    def standard(cls, a, b, p):
        a, b = to_rational(a), to_rational(b)
        if a == 0 or b == 0:
            raise InvalidInput("a and b must be nonzero")
        if p.is_zero:
            raise InvalidInput("p must be nonzero")
        q = (UniPoly.one(), UniPoly.constant(-a), UniPoly.constant(-b), -(UniPoly.variable() * p))
        return cls(q, STANDARD, a, b, p)

    @classmethod
    def diagonal(cls, *entries):
        return cls(tuple(entries), DIAGONAL)

    @property
    def is_standard(self):
        return self.form == STANDARD

    @property
    def is_real_standard(self):
        """Standard form with a < 0 and b < 0, isomorphic over R to x^2 + y^2 + z^2 = u p(u)."""
        return bool(self.is_standard and self.a < 0 and self.b < 0)

    @property
    def discriminant(self):
        result = UniPoly.one()
        for entry in self.q:
            result = result * entry
        return result

    def irreducible_factors(self):
        """Distinct monic irreducible factors of the entries."""
        factors = {}
        for entry in self.q:
            if not entry.is_constant:
                for factor, _ in entry.irreducible_factors()[1]:
                    factors[factor] = None
        return list(factors)

    def __str__(self):
        return "<" + ", ".join(str(entry) for entry in self.q) + ">"


@dataclass(frozen=True)
class HyperellipticCurve:
    """The curve w^2 = rhs(v)."""

    rhs: UniPoly
    genus: int

    @classmethod
    def from_rhs(cls, rhs):
        if rhs.is_zero or not separability_check(rhs).separable:
            raise PreconditionViolation(f"w^2 = {rhs} is singular: right-hand side not squarefree")
        return cls(rhs, max((rhs.degree - 1) // 2, 0))

    @property
    def equation(self):
        return f"w^2 = {self.rhs.as_expr(V)}"


@dataclass(frozen=True)
class DegeneratePoint:
    label: str
    factor: UniPoly
    corank: int


@dataclass(frozen=True)
class TypeClassification:
    is_type_I: bool
    degenerate_points: tuple
    admissible: bool


def _corank(valuations):
    odd = sum(1 for v in valuations if v % 2)
    return min(odd, len(valuations) - odd)


def check_admissible(fib, strict=True):
    """
    Raise NotAdmissible for a non-squarefree entry, and in strict mode for entries sharing a factor.

    Returns:
        bool: True when the entries are also pairwise coprime
    """
    for index, entry in enumerate(fib.q, start=1):
        if not entry.is_constant and not separability_check(entry).separable:
            raise NotAdmissible(f"q{index} = {entry} is not squarefree")
    coprime = True
    for (i, first), (j, second) in combinations(enumerate(fib.q, start=1), 2):
        if first.gcd(second).degree > 0:
            if strict:
                raise NotAdmissible(f"q{i} and q{j} share the factor {first.gcd(second)}")
            coprime = False
    return coprime


def classify_type(fib, strict=True):
    """
    Locate degenerate fibres and decide whether every one is a cone over a smooth conic.

    The corank at a point is the smaller of the numbers of even- and odd-valuation
    entries there, i.e. the number of vanishing entries once the uniformizer is
    scaled out. The point at infinity is included.

    Args:
        fib: The FibrationSpec
        strict: Reject entries sharing a factor; with strict=False such entries are
            accepted and classified through their local valuations

    Returns:
        TypeClassification: type (I) flag, (point, corank) list, admissibility flag
    """
    admissible = check_admissible(fib, strict)
    points = []
    for factor in fib.irreducible_factors():
        corank = _corank([entry.multiplicity(factor)[0] for entry in fib.q])
        if corank:
            points.append(DegeneratePoint(str(factor), factor, corank))
    corank_at_infinity = _corank([-entry.degree for entry in fib.q])
    if corank_at_infinity:
        points.append(DegeneratePoint("inf", None, corank_at_infinity))
    is_type_I = admissible and all(point.corank <= 1 for point in points)
    logger.debug(f"Classified {fib}: type I={is_type_I}, coranks={[(p.label, p.corank) for p in points]}")
    return TypeClassification(is_type_I, tuple(points), admissible)


def discriminant_curve(fib):
    """
    The discriminant double cover w^2 = a b v p(-v) of a standard form.

    Args:
        fib: A standard FibrationSpec

    Returns:
        HyperellipticCurve: with genus floor((deg rhs - 1) / 2)
    """
    if not fib.is_standard:
        raise PreconditionViolation("The discriminant curve is defined for standard forms only")
    p = fib.p
    if not separability_check(p).separable:
        raise PreconditionViolation(f"p = {p} is not separable")
    if p(0) == 0:
        raise PreconditionViolation("p(0) must be nonzero")
    rhs = UniPoly.variable() * p.negated_argument() * (fib.a * fib.b)
    return HyperellipticCurve.from_rhs(rhs)


def _sample_points(fib):
    """One rational point in each open arc cut out by the real roots of the entries, left to right."""
    product = UniPoly.one()
    for entry in fib.q:
        if not entry.is_constant:
            product = product * entry.squarefree_part()
    roots = [root for root, _ in isolate_real_roots(product)] if not product.is_constant else []
    if not roots:
        return [Rational(0)]
    samples = [roots[0].lo - 1]
    samples += [(left.hi + right.lo) / 2 for left, right in zip(roots, roots[1:])]
    samples.append(roots[-1].hi + 1)
    return samples


def _is_indefinite(fib, point):
    signs = {sign(entry(point)) for entry in fib.q}
    return len(signs) > 1


def real_components_of(fib):
    """
    Number of connected components of X(R).

    Counts maximal arcs of P^1(R) over which the fibre form is indefinite; the
    two unbounded arcs meet through infinity. A degenerate fibre between two
    indefinite arcs joins them.

    Args:
        fib: The FibrationSpec

    Returns:
        int: component count, 0 when X(R) is empty
    """
    qualifies = [_is_indefinite(fib, point) for point in _sample_points(fib)]
    if all(qualifies):
        return 1
    runs = sum(1 for i, flag in enumerate(qualifies) if flag and (i == 0 or not qualifies[i - 1]))
    if len(qualifies) > 1 and qualifies[0] and qualifies[-1]:
        runs -= 1
    return runs


def real_components(g):
    """Component count of x^2 + y^2 + z^2 = g(u)."""
    if g.is_zero:
        raise InvalidInput("g must be nonzero")
    one = UniPoly.one()
    return real_components_of(FibrationSpec.diagonal(one, one, one, -g))


def a0_real_rank(components):
    """Rank over Z/2 of the group of degree-0 zero-cycle classes on X_R."""
    return max(components - 1, 0)


def witt_rational(fib):
    """
    True iff the fibre form is indefinite over every open arc of P^1(R).

    Then the generic fibre has points over every real completion of the function
    field of the base, a section exists and X is R-rational.
    """
    return all(_is_indefinite(fib, point) for point in _sample_points(fib))


@dataclass(frozen=True)
class LocalType:
    point: ClosedPointR
    valuations: tuple
    unit_signs: tuple

    @property
    def even_indices(self):
        return tuple(i for i, v in enumerate(self.valuations) if v % 2 == 0)

    @property
    def odd_indices(self):
        return tuple(i for i, v in enumerate(self.valuations) if v % 2)

    @property
    def in_T(self):
        """Both residue forms binary and definite: the local model (x^2 + y^2) - t(z^2 + w^2)."""
        if len(self.even_indices) != 2 or len(self.odd_indices) != 2:
            return False
        return all(
            len({self.unit_signs[i] for i in group}) == 1
            for group in (self.even_indices, self.odd_indices)
        )

    def as_dict(self):
        return {
            "point": self.point.label,
            "valuations": list(self.valuations),
            "unit_signs": list(self.unit_signs),
            "in_T": self.in_T,
        }


def local_type_at(fib, point, refine_limit=REFINE_LIMIT):
    """Valuations and unit signs of the four entries at a real point."""
    data = [local_data(entry, point, refine_limit) for entry in fib.q]
    return LocalType(point, tuple(v for v, _ in data), tuple(s for _, s in data))


def disc_is_square(fib):
    """Whether q1 q2 q3 q4 is a square in Q(u)."""
    content, factors = fib.discriminant.squarefree_factors()
    return all(multiplicity % 2 == 0 for _, multiplicity in factors) and is_rational_square(content)


@dataclass(frozen=True)
class BrauerObstruction:
    obstructed: bool
    T: tuple
    disc_is_square: bool
    local_types: tuple

    def as_dict(self):
        return {
            "obstructed": self.obstructed,
            "T": [point.label for point in self.T],
            "disc_is_square": self.disc_is_square,
            "local_types": [local.as_dict() for local in self.local_types],
        }


def brauer_obstruction(fib, refine_limit=REFINE_LIMIT):
    """
    Decide the unramified Brauer obstruction from the size of T.

    With non-square discriminant two points of T already give a class of Br(X)
    outside the image of Br(R); with square discriminant four are needed.

    Args:
        fib: A FibrationSpec that is not of type (I)

    Returns:
        BrauerObstruction: obstructed flag, T, the discriminant branch and the local data examined
    """
    if classify_type(fib, strict=False).is_type_I:
        raise PreconditionViolation("Type (I) fibrations carry no Brauer obstruction of this kind")
    points = [point for factor in fib.irreducible_factors() for point in real_points_of(factor)]
    points.append(ClosedPointR.infinity())
    points.sort(key=lambda point: point.sort_key)
    local_types = tuple(local_type_at(fib, point, refine_limit) for point in points)
    T = tuple(local.point for local in local_types if local.in_T)
    square = disc_is_square(fib)
    obstructed = len(T) >= (4 if square else 2)
    logger.debug(f"Brauer data for {fib}: T={[p.label for p in T]}, square={square}, obstructed={obstructed}")
    return BrauerObstruction(obstructed, T, square, local_types)

"""
Exact rational polynomial arithmetic.

Univariate and bivariate polynomials over QQ, Sturm root counting, real root
isolation and signs of polynomials at real algebraic numbers. Everything is
backed by sympy's Poly over QQ, so no floating point is ever involved.
"""
import logging
import re
from dataclasses import dataclass
from fractions import Fraction

import sympy
from sympy import QQ, Poly, Rational, oo

from qfib.config.settings import REFINE_LIMIT
from qfib.exceptions import InternalInvariantError, InvalidInput

logger = logging.getLogger(__name__)

U, V = sympy.symbols("u v")

_RATIONAL_TEXT = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


def to_rational(value):
    """
    Coerce an int, Fraction, sympy Rational or "n"/"n/d" text into a sympy Rational.

    Args:
        value: The value to convert

    Returns:
        Rational: The exact value, in lowest terms with positive denominator
    """
    if isinstance(value, bool):
        raise InvalidInput(f"Not a rational number: {value!r}")
    if isinstance(value, Rational):
        return value
    if isinstance(value, int):
        return Rational(value)
    if isinstance(value, Fraction):
        return Rational(value.numerator, value.denominator)
    if isinstance(value, str):
        if not _RATIONAL_TEXT.match(value):
            raise InvalidInput(f"Not a rational number: {value!r}")
        numerator, _, denominator = value.replace(" ", "").partition("/")
        if denominator and int(denominator) == 0:
            raise InvalidInput(f"Zero denominator in {value!r}")
        return Rational(int(numerator), int(denominator or 1))
    raise InvalidInput(f"Not a rational number: {value!r}")


def sign(value):
    """Sign of an exact rational as -1, 0 or +1."""
    return int(sympy.sign(value))


def is_rational_square(value):
    """True iff a rational number is the square of a rational number."""
    value = to_rational(value)
    if value < 0:
        return False
    return sympy.sqrt(value).is_Rational


@dataclass(frozen=True)
class UniPoly:
    """A polynomial in u with rational coefficients. The zero polynomial has degree -1."""

    poly: Poly

    def __post_init__(self):
        if self.poly.gens != (U,) or self.poly.get_domain() != QQ:
            object.__setattr__(self, "poly", Poly(self.poly.as_expr(), U, domain=QQ))

    @classmethod
    def from_coeffs(cls, coefficients):
        """Build from ascending coefficients (constant term first)."""
        terms = [to_rational(c) for c in coefficients]
        return cls(Poly(list(reversed(terms)) or [0], U, domain=QQ))

    @classmethod
    def from_expr(cls, expr):
        expr = sympy.sympify(expr)
        extra = expr.free_symbols - {U}
        if extra:
            raise InvalidInput(f"Unexpected symbols {sorted(map(str, extra))} in univariate polynomial")
        return cls(Poly(expr, U, domain=QQ))

    @classmethod
    def constant(cls, value):
        return cls(Poly(to_rational(value), U, domain=QQ))

    @classmethod
    def zero(cls):
        return cls.constant(0)

    @classmethod
    def one(cls):
        return cls.constant(1)

    @classmethod
    def variable(cls):
        return cls(Poly(U, U, domain=QQ))

    @property
    def coeffs(self):
        """Ascending coefficients with no trailing zeros; [] for the zero polynomial."""
        if self.is_zero:
            return []
        return [Rational(c) for c in reversed(self.poly.all_coeffs())]

    @property
    def degree(self):
        return -1 if self.is_zero else int(self.poly.degree())

    @property
    def is_zero(self):
        return self.poly.is_zero

    @property
    def is_constant(self):
        return self.degree <= 0

    @property
    def leading_coefficient(self):
        return Rational(self.poly.LC())

    def coeff(self, k):
        return Rational(self.poly.nth(k)) if k >= 0 else Rational(0)

    def __call__(self, x):
        return Rational(self.poly.eval(to_rational(x)))

    def as_expr(self, var=U):
        expr = self.poly.as_expr()
        return expr if var == U else expr.subs(U, var)

    def __str__(self):
        return str(self.as_expr())

    def _coerce(self, other):
        if isinstance(other, UniPoly):
            return other
        return UniPoly.constant(other)

    def __add__(self, other):
        return UniPoly(self.poly + self._coerce(other).poly)

    __radd__ = __add__

    def __sub__(self, other):
        return UniPoly(self.poly - self._coerce(other).poly)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        return UniPoly(self.poly * self._coerce(other).poly)

    __rmul__ = __mul__

    def __neg__(self):
        return UniPoly(-self.poly)

    def __pow__(self, exponent):
        return UniPoly(self.poly ** exponent)

    def __divmod__(self, other):
        other = self._coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        quotient, remainder = self.poly.div(other.poly)
        return UniPoly(quotient), UniPoly(remainder)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def divides(self, other):
        """True iff self divides other."""
        return (other % self).is_zero

    def derivative(self):
        return UniPoly(self.poly.diff(U))

    def gcd(self, other):
        """Monic gcd (zero only when both are zero)."""
        return UniPoly(self.poly.gcd(self._coerce(other).poly))

    def monic(self):
        if self.is_zero:
            return self
        return UniPoly(self.poly.monic())

    def compose(self, other):
        """self(other(u))."""
        return UniPoly(self.poly.compose(self._coerce(other).poly))

    def negated_argument(self):
        """p(-u)."""
        return self.compose(-UniPoly.variable())

    def scaled_argument(self, factor):
        """p(c*u)."""
        return self.compose(UniPoly.variable() * to_rational(factor))

    def translated(self, shift):
        """p(u + q)."""
        return self.compose(UniPoly.variable() + to_rational(shift))

    def multiplicity(self, factor):
        """
        Largest k with factor^k dividing self, together with self / factor^k.

        Args:
            factor: A nonconstant polynomial

        Returns:
            tuple: (k, cofactor)
        """
        if self.is_zero:
            raise InvalidInput("Multiplicity in the zero polynomial is undefined")
        if factor.is_constant:
            raise InvalidInput("Multiplicity of a constant factor is undefined")
        count, rest = 0, self
        while True:
            quotient, remainder = divmod(rest, factor)
            if not remainder.is_zero:
                return count, rest
            count, rest = count + 1, quotient

    def irreducible_factors(self):
        """
        Factor over QQ.

        Returns:
            tuple: (content, [(monic irreducible UniPoly, multiplicity), ...]) sorted by degree then coefficients
        """
        if self.is_zero:
            raise InvalidInput("Cannot factor the zero polynomial")
        content, factors = self.poly.factor_list()
        result = []
        for factor, multiplicity in factors:
            lc = factor.LC()
            content *= lc ** multiplicity
            result.append((UniPoly(factor.monic()), int(multiplicity)))
        result.sort(key=lambda pair: (pair[0].degree, [str(c) for c in pair[0].coeffs]))
        return Rational(content), result

    def squarefree_factors(self):
        """Squarefree decomposition: (content, [(squarefree UniPoly, multiplicity), ...])."""
        if self.is_zero:
            raise InvalidInput("Cannot decompose the zero polynomial")
        content, factors = self.poly.sqf_list()
        return Rational(content), [(UniPoly(f), int(k)) for f, k in factors]

    def squarefree_part(self):
        _, factors = self.squarefree_factors()
        result = UniPoly.one()
        for factor, _ in factors:
            result = result * factor
        return result.monic()

    @property
    def is_irreducible(self):
        return self.degree >= 1 and bool(self.poly.is_irreducible)

    def count_roots(self, lo, hi):
        """Number of distinct real roots in the closed interval [lo, hi]."""
        if self.is_zero:
            raise InvalidInput("The zero polynomial has infinitely many roots")
        if self.is_constant:
            return 0
        return int(self.poly.count_roots(lo, hi))

    def sign_at_infinity(self, positive=True):
        """Sign of p(u) as u -> +oo (or -oo)."""
        if self.is_zero:
            return 0
        s = sign(self.leading_coefficient)
        if not positive and self.degree % 2 == 1:
            s = -s
        return s


def _require_nonzero(f, what="polynomial"):
    if f.is_zero:
        raise InvalidInput(f"The {what} must be nonzero")


@dataclass(frozen=True)
class SeparabilityResult:
    separable: bool
    witness: UniPoly


def separability_check(f):
    """
    Decide whether f has no repeated complex root.

    Args:
        f: A nonzero UniPoly

    Returns:
        SeparabilityResult: separable flag and the witness gcd(f, f')
    """
    _require_nonzero(f)
    witness = f.gcd(f.derivative())
    return SeparabilityResult(separable=witness.degree == 0, witness=witness)


def _sign_at_extended(poly, x):
    if x == oo:
        return sign(poly.LC())
    if x == -oo:
        s = sign(poly.LC())
        return -s if poly.degree() % 2 == 1 else s
    return sign(poly.eval(x))


def _variations(signs):
    nonzero = [s for s in signs if s != 0]
    return sum(1 for left, right in zip(nonzero, nonzero[1:]) if left != right)


def _extended(x):
    if x in (oo, -oo):
        return x
    return to_rational(x)


def sturm_root_count(f, a=-oo, b=oo):
    """
    Count the distinct real roots of f in (a, b] with a Sturm sequence.

    Args:
        f: A nonzero UniPoly
        a: Lower end, a Rational or -oo
        b: Upper end, a Rational or +oo

    Returns:
        int: Number of distinct real roots in (a, b]
    """
    _require_nonzero(f)
    a, b = _extended(a), _extended(b)
    if not a < b:
        raise InvalidInput(f"Empty interval ({a}, {b}]")
    if f.is_constant:
        return 0
    sequence = f.poly.sturm()
    at_a = _variations([_sign_at_extended(s, a) for s in sequence])
    at_b = _variations([_sign_at_extended(s, b) for s in sequence])
    return at_a - at_b


@dataclass(frozen=True)
class RealAlgebraic:
    """
    A real root of an irreducible polynomial, pinned by an isolating interval.

    A rational root is stored with lo == hi; otherwise minpoly changes sign on (lo, hi)
    and has no other root in [lo, hi].
    """

    minpoly: UniPoly
    lo: Rational
    hi: Rational

    def __post_init__(self):
        if self.lo > self.hi:
            raise InvalidInput(f"Isolating interval ({self.lo}, {self.hi}) is empty")
        if self.lo == self.hi:
            if self.minpoly.degree != 1 or self.minpoly(self.lo) != 0:
                raise InvalidInput("A degenerate interval must hold the root of a linear minpoly")
        elif self.minpoly(self.lo) * self.minpoly(self.hi) >= 0:
            raise InvalidInput(f"{self.minpoly} does not change sign on ({self.lo}, {self.hi})")

    @classmethod
    def rational(cls, value):
        value = to_rational(value)
        return cls(UniPoly.from_coeffs([-value, 1]), value, value)

    @property
    def is_rational(self):
        return self.lo == self.hi

    @property
    def midpoint(self):
        return (self.lo + self.hi) / 2

    def refined(self):
        """Halve the isolating interval."""
        if self.is_rational:
            return self
        mid = self.midpoint
        if sign(self.minpoly(mid)) == sign(self.minpoly(self.lo)):
            return RealAlgebraic(self.minpoly, mid, self.hi)
        return RealAlgebraic(self.minpoly, self.lo, mid)

    def __str__(self):
        if self.is_rational:
            return str(self.lo)
        return f"root({self.minpoly},({self.lo},{self.hi}))"


def real_roots_of_irreducible(factor):
    """Real roots of a monic irreducible polynomial, ascending."""
    if factor.degree == 1:
        return [RealAlgebraic.rational(-factor.coeff(0) / factor.coeff(1))]
    roots = []
    for (lo, hi), _ in factor.poly.intervals():
        roots.append(RealAlgebraic(factor, Rational(lo), Rational(hi)))
    roots.sort(key=lambda root: root.lo)
    return roots


def _separate(roots, refine_limit):
    """Refine intervals until no two overlap."""
    roots = list(roots)
    for _ in range(refine_limit * max(len(roots), 1)):
        roots.sort(key=lambda pair: (pair[0].lo, pair[0].hi))
        clash = next(
            (i for i in range(len(roots) - 1) if roots[i][0].hi >= roots[i + 1][0].lo),
            None,
        )
        if clash is None:
            return roots
        left, right = roots[clash], roots[clash + 1]
        if left[0].hi - left[0].lo >= right[0].hi - right[0].lo:
            roots[clash] = (left[0].refined(), left[1])
        else:
            roots[clash + 1] = (right[0].refined(), right[1])
    raise InternalInvariantError("Could not separate the isolating intervals of distinct roots")


def isolate_real_roots(f, refine_limit=REFINE_LIMIT):
    """
    Isolate every real root of f.

    Args:
        f: A nonzero UniPoly
        refine_limit: Bisection budget per root used to make intervals disjoint

    Returns:
        list: (RealAlgebraic, multiplicity) pairs with pairwise disjoint intervals, ascending
    """
    _require_nonzero(f)
    if f.is_constant:
        return []
    _, factors = f.irreducible_factors()
    roots = [
        (root, multiplicity)
        for factor, multiplicity in factors
        for root in real_roots_of_irreducible(factor)
    ]
    return _separate(roots, refine_limit)


def sign_at(g, alpha, refine_limit=REFINE_LIMIT):
    """
    Sign of g at a real algebraic number.

    Args:
        g: A UniPoly
        alpha: The RealAlgebraic point
        refine_limit: Maximum number of interval bisections

    Returns:
        int: -1, 0 or +1; 0 exactly when minpoly(alpha) divides g
    """
    if alpha.is_rational:
        return sign(g(alpha.lo))
    remainder = g % alpha.minpoly
    if remainder.is_zero:
        return 0
    root = alpha
    for _ in range(refine_limit):
        if remainder.count_roots(root.lo, root.hi) == 0:
            return sign(remainder(root.lo))
        root = root.refined()
    raise InternalInvariantError(f"sign_at did not separate {alpha} from the roots of {g}")


def is_nonnegative(f):
    """True iff f(t) >= 0 for every real t."""
    if f.is_zero:
        return True
    content, factors = f.squarefree_factors()
    for factor, multiplicity in factors:
        if multiplicity % 2 == 1 and sturm_root_count(factor) > 0:
            return False
    return bool(f.leading_coefficient > 0)


def is_positive(f):
    """True iff f(t) > 0 for every real t."""
    return bool(not f.is_zero and sturm_root_count(f) == 0 and f.leading_coefficient > 0)


@dataclass(frozen=True)
class BiPoly:
    """A polynomial in u and v with rational coefficients."""

    poly: Poly

    def __post_init__(self):
        if self.poly.gens != (U, V) or self.poly.get_domain() != QQ:
            object.__setattr__(self, "poly", Poly(self.poly.as_expr(), U, V, domain=QQ))

    @classmethod
    def from_expr(cls, expr):
        expr = sympy.sympify(expr)
        extra = expr.free_symbols - {U, V}
        if extra:
            raise InvalidInput(f"Unexpected symbols {sorted(map(str, extra))} in bivariate polynomial")
        return cls(Poly(expr, U, V, domain=QQ))

    @classmethod
    def from_terms(cls, terms):
        """Build from a {(i, j): coefficient} map, i the u-degree and j the v-degree."""
        expr = sum((to_rational(c) * U ** i * V ** j for (i, j), c in terms.items()), Rational(0))
        return cls.from_expr(expr)

    @property
    def terms(self):
        """Sparse {(i, j): Rational} map with no zero coefficients."""
        if self.poly.is_zero:
            return {}
        return {(int(i), int(j)): Rational(c) for (i, j), c in self.poly.terms()}

    @property
    def is_zero(self):
        return self.poly.is_zero

    @property
    def total_degree(self):
        return -1 if self.is_zero else int(self.poly.total_degree())

    def evaluate(self, u, v):
        u, v = to_rational(u), to_rational(v)
        return sum((c * u ** i * v ** j for (i, j), c in self.terms.items()), Rational(0))

    def homogeneous_components(self):
        """
        Split into homogeneous parts, each dehomogenized as h_e(t) = h_e(t, 1).

        Returns:
            dict: {e: UniPoly in t} for every total degree e up to the total degree
        """
        parts = {e: Rational(0) * U for e in range(self.total_degree + 1)}
        for (i, j), c in self.terms.items():
            parts[i + j] = parts[i + j] + c * U ** i
        return {e: UniPoly.from_expr(expr) for e, expr in parts.items()}

    def as_expr(self):
        return self.poly.as_expr()

    def __str__(self):
        return str(self.as_expr())

    def __add__(self, other):
        return BiPoly(self.poly + other.poly)

    def __sub__(self, other):
        return BiPoly(self.poly - other.poly)

    def __mul__(self, other):
        return BiPoly(self.poly * other.poly)


def exact_div_u_plus_v(p):
    """
    Divide u*p(u) + v*p(-v) by u + v.

    The dividend vanishes on u = -v, so the division is exact for every p.

    Args:
        p: A UniPoly

    Returns:
        BiPoly: r(u, v) with (u + v) * r = u*p(u) + v*p(-v)
    """
    dividend = U * p.as_expr() + V * p.negated_argument().as_expr(V)
    quotient, remainder = Poly(dividend, U, V, domain=QQ).div(Poly(U + V, U, V, domain=QQ))
    if not remainder.is_zero:
        raise InternalInvariantError(f"u + v does not divide u*p(u) + v*p(-v) for p = {p}")
    return BiPoly(quotient)


@dataclass(frozen=True)
class RationalFunction:
    """A quotient num/den of polynomials in u, kept in lowest terms with monic den."""

    num: UniPoly
    den: UniPoly

    def __post_init__(self):
        if self.den.is_zero:
            raise InvalidInput("Rational function with zero denominator")
        common = self.num.gcd(self.den)
        if self.num.is_zero:
            common = self.den
        num, den = self.num // common, self.den // common
        lc = den.leading_coefficient
        object.__setattr__(self, "num", num * (1 / lc))
        object.__setattr__(self, "den", den * (1 / lc))

    @classmethod
    def of(cls, value):
        """Lift a UniPoly or a rational constant."""
        if isinstance(value, RationalFunction):
            return value
        if isinstance(value, UniPoly):
            return cls(value, UniPoly.one())
        return cls(UniPoly.constant(value), UniPoly.one())

    @property
    def is_zero(self):
        return self.num.is_zero

    def __mul__(self, other):
        other = RationalFunction.of(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        other = RationalFunction.of(other)
        return RationalFunction(self.num * other.den - other.num * self.den, self.den * other.den)

    def __rsub__(self, other):
        return RationalFunction.of(other) - self

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def polynomials(self):
        """Numerator and denominator, the polynomials whose factors carry all zeros and poles."""
        return self.num, self.den

    def valuation(self, factor):
        """Order of vanishing along a monic irreducible factor."""
        k_num, _ = self.num.multiplicity(factor)
        k_den, _ = self.den.multiplicity(factor)
        return k_num - k_den

    def unit_parts(self, factor):
        """Numerator and denominator with every power of factor removed."""
        _, num = self.num.multiplicity(factor)
        _, den = self.den.multiplicity(factor)
        return num, den

    @property
    def valuation_at_infinity(self):
        return self.den.degree - self.num.degree

    @property
    def leading_ratio(self):
        return self.num.leading_coefficient / self.den.leading_coefficient

    def __str__(self):
        if self.den.degree == 0:
            return str(self.num)
        return f"({self.num})/({self.den})"

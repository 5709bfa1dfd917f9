"""
Sum-of-squares certificates and their exact verification.

A certificate lists entries e_i and nonnegative rational weights c_i with
sum c_i e_i^2 = target, either as an identity of rational functions in u, v
or in the function field of W: x^2 + y^2 + z^2 = u p(u), w^2 = v p(-v).
"""
import logging
from dataclasses import dataclass, replace

import sympy
from sympy import Rational
from sympy.solvers.diophantine.diophantine import sum_of_four_squares

from qfib.exceptions import (
    DivisionByZeroDenominator,
    InternalInvariantError,
    InvalidInput,
    PreconditionViolation,
    ZeroDivisor,
)
from qfib.services.exactmath import U, V, UniPoly, exact_div_u_plus_v, is_rational_square, to_rational

logger = logging.getLogger(__name__)

X, Y, Z, W = sympy.symbols("x y z w")

CERT_SYMBOLS = {"x": X, "y": Y, "z": Z, "w": W, "u": U, "v": V}


@dataclass(frozen=True)
class PlainBivariate:
    """Rational functions in u and v with no relations."""

    name = "plain"

    def normal_form(self, expr, order=None):
        return sympy.expand(expr)


@dataclass(frozen=True)
class QuotientWRing:
    """Polynomials in x, y, z, w, u, v modulo z^2 = u p(u) - x^2 - y^2 and w^2 = v p(-v)."""

    p: UniPoly
    name = "W"

    @property
    def relations(self):
        return {
            Z: U * self.p.as_expr() - X ** 2 - Y ** 2,
            W: V * self.p.negated_argument().as_expr(V),
        }

    def normal_form(self, expr, order=(Z, W)):
        """
        Reduce to degree <= 1 in z and in w.

        Each relation solves for the square of its own variable and its right-hand
        side involves neither z nor w, so one pass per variable suffices in any order.
        """
        result = sympy.expand(expr)
        relations = self.relations
        for var in order:
            result = _reduce_square(result, var, relations[var])
        return result


def _reduce_square(expr, var, replacement):
    if not expr.has(var):
        return expr
    poly = sympy.Poly(expr, var)
    reduced = sum(
        (coeff * var ** (k % 2) * replacement ** (k // 2) for (k,), coeff in poly.terms()),
        sympy.Integer(0),
    )
    return sympy.expand(reduced)


def _is_zero(expr):
    expr = sympy.expand(expr)
    if expr == 0:
        return True
    radicals = [atom for atom in expr.atoms(sympy.Pow) if not atom.exp.is_Integer]
    if not radicals:
        return False
    return sympy.simplify(expr) == 0


@dataclass(frozen=True)
class SOSCertificate:
    """
    sum(weights[i] * entries[i]**2) == target in ring.

    Unit weights give a plain sum of squares; criterion A certificates carry the
    rational weight 3/4 and a nonnegative constant.
    """

    entries: tuple
    target: object
    ring: object = PlainBivariate()
    weights: tuple = None

    def __post_init__(self):
        entries = tuple(sympy.sympify(entry) for entry in self.entries)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "target", sympy.sympify(self.target))
        weights = self.weights
        if weights is None:
            weights = (Rational(1),) * len(entries)
        weights = tuple(to_rational(w) for w in weights)
        if len(weights) != len(entries):
            raise InvalidInput("A certificate needs one weight per entry")
        if any(w < 0 for w in weights):
            raise InvalidInput("Certificate weights must be nonnegative")
        object.__setattr__(self, "weights", weights)

    @property
    def is_unit_weighted(self):
        return all(w == 1 for w in self.weights)

    def with_ring(self, ring):
        return replace(self, ring=ring)

    def as_real_squares(self):
        """Fold each weight into its entry as an exact square root, dropping zero weights."""
        pairs = [(w, e) for w, e in zip(self.weights, self.entries) if w != 0]
        return SOSCertificate(
            tuple(sympy.sqrt(w) * e for w, e in pairs), self.target, self.ring,
        )

    def rationalized(self):
        """Unit-weighted certificate with rational coefficients; each weight becomes at most 4 squares."""
        entries = []
        for w, e in zip(self.weights, self.entries):
            if w == 0:
                continue
            if is_rational_square(w):
                entries.append(sympy.sqrt(w) * e)
            else:
                entries.extend(part * e for part in lagrange_squares(w))
        return SOSCertificate(tuple(entries), self.target, self.ring)


def lagrange_squares(value):
    """
    A nonnegative rational as a sum of at most 4 squares of rationals.

    n/d = (n*d)/d^2, and the integer n*d is a sum of four squares.

    Returns:
        tuple: the nonzero rationals whose squares sum to value
    """
    value = to_rational(value)
    if value < 0:
        raise InvalidInput(f"{value} is negative and not a sum of squares")
    if value == 0:
        return ()
    denominator = int(value.q)
    parts = sum_of_four_squares(int(value.p) * denominator)
    return tuple(Rational(part, denominator) for part in parts if part)


def verify(cert):
    """
    Check sum(c_i e_i^2) == target exactly in the certificate's ring.

    Args:
        cert: The SOSCertificate

    Returns:
        bool: True iff the identity holds
    """
    difference = sum((w * e ** 2 for w, e in zip(cert.weights, cert.entries)), sympy.Integer(0))
    difference = sympy.together(difference - cert.target)
    numerator, denominator = sympy.fraction(difference)
    if _is_zero(cert.ring.normal_form(denominator)):
        raise DivisionByZeroDenominator(f"Denominator {denominator} vanishes in the {cert.ring.name} ring")
    return _is_zero(cert.ring.normal_form(numerator))


def _padded(cert):
    if not cert.is_unit_weighted:
        raise InvalidInput("Euler composition needs unit weights; fold them with as_real_squares()")
    if len(cert.entries) > 4:
        raise InvalidInput(f"Euler composition takes at most 4 entries, got {len(cert.entries)}")
    return list(cert.entries) + [sympy.Integer(0)] * (4 - len(cert.entries))


def euler_compose(first, second):
    """
    Certificate for s*t from 4-square certificates of s and t (Euler's identity).

    Returns:
        SOSCertificate: the four bilinear combinations, in the common ring
    """
    if first.ring != second.ring:
        raise InvalidInput("Certificates live in different rings")
    a1, a2, a3, a4 = _padded(first)
    b1, b2, b3, b4 = _padded(second)
    entries = (
        a1 * b1 - a2 * b2 - a3 * b3 - a4 * b4,
        a1 * b2 + a2 * b1 + a3 * b4 - a4 * b3,
        a1 * b3 - a2 * b4 + a3 * b1 + a4 * b2,
        a1 * b4 + a2 * b3 - a3 * b2 + a4 * b1,
    )
    return SOSCertificate(
        tuple(sympy.expand(entry) for entry in entries),
        sympy.expand(first.target * second.target),
        first.ring,
    )


def divide_cert(numerator_cert, denominator_cert):
    """
    Certificate for s/t: compose the certificates and scale by 1/t^2.

    Raises:
        ZeroDivisor: when t is zero in the ring
    """
    t = denominator_cert.target
    t_numerator, _ = sympy.fraction(sympy.together(t))
    if _is_zero(denominator_cert.ring.normal_form(t_numerator)):
        raise ZeroDivisor(f"Cannot divide by {t}: it is zero in the {denominator_cert.ring.name} ring")
    composed = euler_compose(numerator_cert, denominator_cert)
    return SOSCertificate(
        tuple(entry / t for entry in composed.entries),
        sympy.cancel(numerator_cert.target / t),
        composed.ring,
    )


def three_square_certificate(p):
    """
    Weighted three-square certificate for r(u, v) when p = u^2 + a u + b with b >= a^2/3:

        r = (u + (a - v)/2)^2 + 3/4 (v - a/3)^2 + (b - a^2/3).

    Returns:
        SOSCertificate or None: in the plain ring, None when the shape does not apply
    """
    if p.degree != 2 or p.leading_coefficient != 1:
        return None
    a, b = p.coeff(1), p.coeff(0)
    constant = b - a ** 2 / 3
    if constant < 0:
        return None
    entries = [U + (a - V) / 2, V - a / 3]
    weights = [Rational(1), Rational(3, 4)]
    if constant > 0:
        if is_rational_square(constant):
            entries.append(sympy.sqrt(constant))
            weights.append(Rational(1))
        else:
            entries.append(sympy.Integer(1))
            weights.append(constant)
    cert = SOSCertificate(tuple(entries), exact_div_u_plus_v(p).as_expr(), PlainBivariate(), tuple(weights))
    if not verify(cert):
        raise InternalInvariantError(f"Three-square certificate for p = {p} does not expand to r(u, v)")
    return cert


def certify_u_plus_v(p):
    """
    Four-square certificate for u + v in the function field of W.

    x^2 + y^2 + z^2 + w^2 = (u + v) r(u, v) on W, and r is a sum of at most
    three squares, so Euler division by r leaves four squares summing to u + v.

    Args:
        p: A UniPoly with b >= a^2/3

    Returns:
        SOSCertificate: verified, with 4 entries, target u + v, ring QuotientWRing(p)
    """
    r_cert = three_square_certificate(p)
    if r_cert is None:
        raise PreconditionViolation(f"p = {p} does not satisfy b >= a^2/3; no certificate for u + v")
    ring = QuotientWRing(p)
    r_cert = r_cert.as_real_squares().with_ring(ring)
    norm_cert = SOSCertificate((X, Y, Z, W), U * p.as_expr() + V * p.negated_argument().as_expr(V), ring)
    cert = divide_cert(norm_cert, r_cert)
    if sympy.expand(cert.target - (U + V)) != 0 or not verify(cert):
        raise InternalInvariantError(f"Certificate for u + v with p = {p} does not verify")
    logger.debug(f"Certified u + v as 4 squares on W for p = {p}")
    return cert

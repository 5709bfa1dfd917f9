"""
Pencils of two quadrics in P^5: the binary sextic det(lambda f + mu g), its
separability, and the genus-2 curve w^2 = -det attached to it.
"""
import logging
from dataclasses import dataclass

import sympy
from sympy import ImmutableMatrix, Poly, QQ, Rational

from qfib.exceptions import DegeneratePencil, InvalidInput, PreconditionViolation
from qfib.services.exactmath import U, UniPoly, separability_check, to_rational
from qfib.services.fibration import HyperellipticCurve

logger = logging.getLogger(__name__)

LAMBDA, MU = sympy.symbols("lambda mu")

SIZE = 6


def _symmetric(matrix):
    matrix = ImmutableMatrix(matrix).applyfunc(to_rational)
    if matrix.shape != (SIZE, SIZE):
        raise InvalidInput(f"Quadric matrices are {SIZE}x{SIZE}, got {matrix.shape}")
    if matrix != matrix.T:
        raise InvalidInput("Quadric matrix is not symmetric")
    return matrix


@dataclass(frozen=True)
class QuadricPencil:
    """The pencil lambda f + mu g of two quadratic forms in 6 variables."""

    f: ImmutableMatrix
    g: ImmutableMatrix

    def __post_init__(self):
        object.__setattr__(self, "f", _symmetric(self.f))
        object.__setattr__(self, "g", _symmetric(self.g))

    @classmethod
    def from_upper_triangles(cls, f_entries, g_entries):
        """Build from 21 rationals per quadric: the upper triangle, row by row."""
        return cls(_from_upper_triangle(f_entries), _from_upper_triangle(g_entries))

    @classmethod
    def from_forms(cls, f_expr, g_expr, variables):
        """Build from two quadratic forms given as sympy expressions in 6 variables."""
        return cls(_gram_matrix(f_expr, variables), _gram_matrix(g_expr, variables))


def _from_upper_triangle(entries):
    values = [to_rational(entry) for entry in entries]
    expected = SIZE * (SIZE + 1) // 2
    if len(values) != expected:
        raise InvalidInput(f"Expected {expected} upper-triangle entries, got {len(values)}")
    rows = [[Rational(0)] * SIZE for _ in range(SIZE)]
    position = 0
    for i in range(SIZE):
        for j in range(i, SIZE):
            rows[i][j] = rows[j][i] = values[position]
            position += 1
    return ImmutableMatrix(rows)


def _gram_matrix(expr, variables):
    if len(variables) != SIZE:
        raise InvalidInput(f"Expected {SIZE} variables, got {len(variables)}")
    hessian = sympy.hessian(sympy.expand(expr), variables)
    return ImmutableMatrix(hessian / 2)


@dataclass(frozen=True)
class BinarySextic:
    """sum_i coefficients[i] * lambda^(6 - i) * mu^i."""

    coefficients: tuple

    def as_expr(self):
        return sum(
            (c * LAMBDA ** (SIZE - i) * MU ** i for i, c in enumerate(self.coefficients)),
            sympy.Integer(0),
        )

    def evaluate(self, lam, mu):
        lam, mu = to_rational(lam), to_rational(mu)
        return sum((c * lam ** (SIZE - i) * mu ** i for i, c in enumerate(self.coefficients)), Rational(0))

    @property
    def is_zero(self):
        return all(c == 0 for c in self.coefficients)

    def dehomogenized(self):
        """F(u) = form(u, 1)."""
        return UniPoly.from_expr(self.as_expr().subs({LAMBDA: U, MU: 1}))

    @property
    def multiplicity_at_infinity(self):
        """Order of vanishing at (lambda : mu) = (1 : 0)."""
        if self.is_zero:
            raise DegeneratePencil("det(lambda f + mu g) vanishes identically")
        return SIZE - self.dehomogenized().degree


def pencil_sextic(pencil):
    """
    The binary sextic det(lambda f + mu g), by exact expansion.

    Returns:
        BinarySextic
    """
    det = (LAMBDA * pencil.f + MU * pencil.g).det(method="berkowitz")
    form = Poly(sympy.expand(det), LAMBDA, MU, domain=QQ)
    coefficients = tuple(Rational(form.coeff_monomial(LAMBDA ** (SIZE - i) * MU ** i)) for i in range(SIZE + 1))
    return BinarySextic(coefficients)


def pencil_separable(pencil):
    """
    Whether the sextic has 6 distinct roots on P^1.

    Separability stands in for smoothness of the intersection f = g = 0; a
    failure means singular or degenerate.

    Raises:
        DegeneratePencil: when the sextic vanishes identically
    """
    sextic = pencil_sextic(pencil)
    if sextic.is_zero:
        raise DegeneratePencil("det(lambda f + mu g) vanishes identically")
    separable = separability_check(sextic.dehomogenized()).separable and sextic.multiplicity_at_infinity <= 1
    logger.debug(f"Pencil sextic {sextic.as_expr()}: separable={separable}")
    return separable


def pencil_delta(pencil):
    """
    The genus-2 curve w^2 = -det(u f + g) of a separable pencil.

    Returns:
        HyperellipticCurve
    """
    if not pencil_separable(pencil):
        raise PreconditionViolation("The pencil sextic is not separable: singular or degenerate intersection")
    return HyperellipticCurve.from_rhs(-pencil_sextic(pencil).dehomogenized())

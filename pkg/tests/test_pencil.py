import pytest
import sympy
from sympy import ImmutableMatrix, Rational

from qfib.exceptions import DegeneratePencil, InvalidInput, PreconditionViolation
from qfib.services.exactmath import UniPoly
from qfib.services.pencil import (
    LAMBDA,
    MU,
    QuadricPencil,
    pencil_delta,
    pencil_separable,
    pencil_sextic,
)


def diag(*values):
    return ImmutableMatrix(sympy.diag(*values))


def upper_triangle(matrix):
    return [matrix[i, j] for i in range(6) for j in range(i, 6)]


@pytest.fixture
def diagonal_pencil():
    return QuadricPencil(diag(1, 1, 1, 1, 1, 1), diag(0, 1, 2, 3, 4, 5))


@pytest.fixture
def singular_pencil():
    x, y, z, t, u, w = sympy.symbols("x y z t u w")
    return QuadricPencil.from_forms(x ** 2 + y ** 2 + u ** 2 - u * w, w * y - z ** 2 - t ** 2, [x, y, z, t, u, w])


def test_diagonal_pencil_sextic(diagonal_pencil):
    sextic = pencil_sextic(diagonal_pencil)
    expected = sympy.prod([LAMBDA + i * MU for i in range(6)])
    assert sympy.expand(sextic.as_expr() - expected) == 0
    assert sextic.coefficients[0] == 1
    assert pencil_separable(diagonal_pencil)


def test_diagonal_pencil_delta(diagonal_pencil):
    curve = pencil_delta(diagonal_pencil)
    expected = -UniPoly.from_expr(sympy.prod([sympy.Symbol("u") + i for i in range(6)]))
    assert curve.rhs == expected
    assert curve.genus == 2


def test_scaled_pencil(diagonal_pencil):
    f = diag(1, 2, 3, 4, 5, 6)
    sextic = pencil_sextic(QuadricPencil(f, f))
    assert sympy.expand(sextic.as_expr() - 720 * (LAMBDA + MU) ** 6) == 0
    assert not pencil_separable(QuadricPencil(f, f))


def test_singular_pencil_is_not_separable(singular_pencil):
    sextic = pencil_sextic(singular_pencil)
    assert not sextic.is_zero
    assert not pencil_separable(singular_pencil)
    with pytest.raises(PreconditionViolation):
        pencil_delta(singular_pencil)


def test_degenerate_pencil():
    zero = diag(0, 0, 0, 0, 0, 0)
    with pytest.raises(DegeneratePencil):
        pencil_separable(QuadricPencil(zero, diag(1, 1, 1, 0, 0, 0)))


def test_gl2_equivariance(diagonal_pencil):
    f, g = diagonal_pencil.f, diagonal_pencil.g
    a, b, c, d = 2, 1, -1, 3
    transformed = QuadricPencil(a * f + b * g, c * f + d * g)
    original = pencil_sextic(diagonal_pencil).as_expr()
    substituted = original.subs({LAMBDA: a * LAMBDA + c * MU, MU: b * LAMBDA + d * MU}, simultaneous=True)
    assert sympy.expand(pencil_sextic(transformed).as_expr() - substituted) == 0


def test_upper_triangle_round_trip(diagonal_pencil):
    rebuilt = QuadricPencil.from_upper_triangles(
        upper_triangle(diagonal_pencil.f), upper_triangle(diagonal_pencil.g),
    )
    assert rebuilt == diagonal_pencil


def test_upper_triangle_length():
    with pytest.raises(InvalidInput):
        QuadricPencil.from_upper_triangles([1] * 20, [1] * 21)


def test_non_symmetric_matrix_is_rejected():
    matrix = sympy.eye(6).as_mutable()
    matrix[0, 1] = 1
    with pytest.raises(InvalidInput):
        QuadricPencil(ImmutableMatrix(matrix), diag(1, 1, 1, 1, 1, 1))


def test_sextic_evaluation(diagonal_pencil):
    sextic = pencil_sextic(diagonal_pencil)
    assert sextic.evaluate(1, 1) == 720
    assert sextic.evaluate(Rational(1, 2), 0) == Rational(1, 64)
    assert sextic.multiplicity_at_infinity == 0

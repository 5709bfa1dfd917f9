import pytest
import sympy
from sympy import Rational

from qfib.exceptions import DivisionByZeroDenominator, InvalidInput, PreconditionViolation, ZeroDivisor
from qfib.services.exactmath import U, V, UniPoly, exact_div_u_plus_v
from qfib.services.soscert import (
    W,
    X,
    Y,
    Z,
    PlainBivariate,
    QuotientWRing,
    SOSCertificate,
    certify_u_plus_v,
    divide_cert,
    euler_compose,
    lagrange_squares,
    three_square_certificate,
    verify,
)
from tests.conftest import poly, random_nonzero_rational


def weighted_sum(cert):
    return sympy.expand(sum(w * e ** 2 for w, e in zip(cert.weights, cert.entries)))


def has_radicals(expr):
    return any(not atom.exp.is_Integer for atom in sympy.sympify(expr).atoms(sympy.Pow))


def test_three_squares_for_u2_plus_1():
    cert = three_square_certificate(poly("u^2+1"))
    assert cert.entries == (U - V / 2, V, sympy.Integer(1))
    assert cert.weights == (1, Rational(3, 4), 1)
    assert weighted_sum(cert) == sympy.expand(exact_div_u_plus_v(poly("u^2+1")).as_expr())
    assert verify(cert)


def test_three_squares_on_the_boundary():
    cert = three_square_certificate(poly("u^2-3u+3"))
    assert len(cert.entries) == 2
    assert sympy.expand(cert.entries[0] - (U + (-3 - V) / 2)) == 0
    assert sympy.expand(cert.entries[1] - (V + 1)) == 0
    assert weighted_sum(cert) == sympy.expand(exact_div_u_plus_v(poly("u^2-3u+3")).as_expr())


@pytest.mark.parametrize("text", ["u^2+4u+5", "u^4+1", "2u^2+1", "u+1"])
def test_three_squares_does_not_apply(text):
    assert three_square_certificate(poly(text)) is None


def test_three_squares_random_family(rng):
    for _ in range(200):
        a = random_nonzero_rational(rng, 12, 5) if rng.random() < 0.9 else Rational(0)
        slack = Rational(rng.randint(0, 20), rng.randint(1, 6))
        b = a * a / 3 + slack
        if b == 0:
            b = Rational(1)
        cert = three_square_certificate(UniPoly.from_coeffs([b, a, 1]))
        assert cert is not None
        assert verify(cert)


def test_three_squares_rejected_below_threshold(rng):
    for _ in range(200):
        a = random_nonzero_rational(rng, 12, 5)
        t = Rational(rng.randint(1, 99), 100)
        b = a * a / 4 + t * a * a / 12
        assert three_square_certificate(UniPoly.from_coeffs([b, a, 1])) is None


@pytest.mark.parametrize("text", ["u^2+1", "u^2-3u+3", "u^2+u+1"])
def test_certify_u_plus_v(text):
    p = poly(text)
    cert = certify_u_plus_v(p)
    assert len(cert.entries) <= 4
    assert cert.ring == QuotientWRing(p)
    assert sympy.expand(cert.target - (U + V)) == 0
    assert verify(cert)


def test_certify_u_plus_v_needs_the_threshold():
    with pytest.raises(PreconditionViolation):
        certify_u_plus_v(poly("u^2+4u+5"))


def test_verify_norm_identity_on_w():
    p = poly("u^2+1")
    target = U * p.as_expr() + V * p.negated_argument().as_expr(V)
    assert verify(SOSCertificate((X, Y, Z, W), target, QuotientWRing(p)))


def test_verify_rejects_wrong_identity():
    assert not verify(SOSCertificate((1, 0, 0, 0), 2))


def test_verify_rejects_vanishing_denominator():
    ring = QuotientWRing(poly("u^2+1"))
    entry = 1 / (X ** 2 + Y ** 2 + Z ** 2 - U * (U ** 2 + 1))
    with pytest.raises(DivisionByZeroDenominator):
        verify(SOSCertificate((entry,), 1, ring))


def test_normal_form_is_confluent(rng):
    ring = QuotientWRing(poly("u^2+u+1"))
    monomials = [X, Y, Z, W, U, V, Z ** 2, W ** 3, Z ** 3 * W ** 2, X * Z * W]
    for _ in range(30):
        expr = sum(rng.randint(-5, 5) * rng.choice(monomials) * rng.choice(monomials) for _ in range(6))
        first = ring.normal_form(expr, order=(Z, W))
        second = ring.normal_form(expr, order=(W, Z))
        assert sympy.expand(first - second) == 0


def test_euler_compose_integers():
    composed = euler_compose(SOSCertificate((1, 1), 2), SOSCertificate((1, 1, 1), 3))
    assert composed.entries == (0, 2, 1, 1)
    assert composed.target == 6
    assert verify(composed)


def test_euler_compose_with_identity():
    s = SOSCertificate((U, V, 1, 2), U ** 2 + V ** 2 + 5)
    composed = euler_compose(s, SOSCertificate((1,), 1))
    assert [abs(e) for e in composed.entries] == [abs(e) for e in s.entries]


def test_euler_compose_symbolic_two_squares():
    s = SOSCertificate((U, 1), U ** 2 + 1)
    t = SOSCertificate((V, 1), V ** 2 + 1)
    composed = euler_compose(s, t)
    assert len(composed.entries) == 4
    assert verify(composed)


def test_euler_compose_rejects_weights_and_length():
    with pytest.raises(InvalidInput):
        euler_compose(SOSCertificate((1,), 2, weights=(2,)), SOSCertificate((1,), 1))
    with pytest.raises(InvalidInput):
        euler_compose(SOSCertificate((1, 1, 1, 1, 1), 5), SOSCertificate((1,), 1))


def test_euler_compose_rejects_mixed_rings():
    w_cert = SOSCertificate((1,), 1, QuotientWRing(poly("u^2+1")))
    with pytest.raises(InvalidInput):
        euler_compose(w_cert, SOSCertificate((1,), 1))


@pytest.mark.parametrize("s, t, target", [
    (SOSCertificate((2, 1, 1), 6), SOSCertificate((1, 1, 1), 3), 2),
    (SOSCertificate((1, 1, 1), 3), SOSCertificate((1, 1, 1), 3), 1),
])
def test_divide_cert(s, t, target):
    quotient = divide_cert(s, t)
    assert quotient.target == target
    assert verify(quotient)


def test_divide_by_zero_target():
    with pytest.raises(ZeroDivisor):
        divide_cert(SOSCertificate((1,), 1), SOSCertificate((0,), 0))


def test_euler_fuzz(rng):
    for _ in range(1000):
        first = tuple(rng.randint(-9, 9) for _ in range(rng.randint(1, 4)))
        second = tuple(rng.randint(-9, 9) for _ in range(rng.randint(1, 4)))
        s = SOSCertificate(first, sum(e * e for e in first))
        t = SOSCertificate(second, sum(e * e for e in second))
        assert verify(euler_compose(s, t))
        if t.target != 0:
            assert verify(divide_cert(s, t))


@pytest.mark.parametrize("value", [Rational(2, 3), Rational(7), Rational(1, 4), Rational(15, 8), Rational(0)])
def test_lagrange_squares(value):
    parts = lagrange_squares(value)
    assert len(parts) <= 4
    assert sum(part ** 2 for part in parts) == value


def test_lagrange_squares_rejects_negative():
    with pytest.raises(InvalidInput):
        lagrange_squares(Rational(-1, 2))


def test_rationalized_certificate():
    cert = three_square_certificate(poly("u^2+u+1")).rationalized()
    assert cert.is_unit_weighted
    assert not any(has_radicals(entry) for entry in cert.entries)
    assert verify(cert)


def test_real_squares_fold_the_weights():
    cert = three_square_certificate(poly("u^2+u+1")).as_real_squares()
    assert cert.is_unit_weighted
    assert verify(cert)


def test_negative_weight_is_rejected():
    with pytest.raises(InvalidInput):
        SOSCertificate((U,), U ** 2, weights=(-1,))


def test_plain_ring_is_default():
    assert SOSCertificate((1,), 1).ring == PlainBivariate()

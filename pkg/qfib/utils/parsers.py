"""
Helper functions for reading qfib inputs.

Polynomials come either in the ascending coefficient format ("1,0,1" is
1 + 0*u + 1*u^2) or as expressions in u using integers, rationals, + - * ^
and parentheses ("1+u^2", "-(u-1)", "2u(u^2+1)/3").
"""
import json
import re

import sympy
from sympy.parsing.sympy_parser import parse_expr

from qfib.exceptions import InvalidInput
from qfib.services.exactmath import RationalFunction, UniPoly, to_rational
from qfib.services.fibration import FibrationSpec
from qfib.services.pencil import QuadricPencil
from qfib.services.soscert import CERT_SYMBOLS, PlainBivariate, QuotientWRing, SOSCertificate

COEFFICIENT_LIST = re.compile(r"^\s*[+-]?\d+(/\d+)?(\s*,\s*[+-]?\d+(/\d+)?)*\s*$")
TOKEN = re.compile(r"\s*(?:(\d+)|(u)|(.))")
CERT_TEXT = re.compile(r"^[0-9xyzwuv+\-*/()\s]*$")


def parse_rational(text):
    return to_rational(text)


def parse_coefficients(text):
    """
    Parse the ascending coefficient format.

    Args:
        text: Comma-separated rationals, constant term first

    Returns:
        UniPoly
    """
    if not isinstance(text, str) or not COEFFICIENT_LIST.match(text):
        raise InvalidInput(f"Not a coefficient list: {text!r}")
    return UniPoly.from_coeffs(part.strip() for part in text.split(","))


class _ExpressionParser:
    """
    Recursive descent over:

        expr    := term (('+' | '-') term)*
        term    := factor (['*' | '/'] factor)*
        factor  := ('+' | '-') factor | power
        power   := atom ('^' integer)?
        atom    := integer | 'u' | '(' expr ')'

    Juxtaposition multiplies ("2u", "u(u+1)"); division is by nonzero constants only.
    """

    def __init__(self, text):
        self.text = text
        self.tokens = []
        for number, var, other in TOKEN.findall(text):
            if number:
                self.tokens.append(("num", int(number)))
            elif var:
                self.tokens.append(("u", None))
            elif other.strip():
                self.tokens.append(("op", other))
        self.position = 0

    def _peek(self):
        return self.tokens[self.position] if self.position < len(self.tokens) else (None, None)

    def _take(self):
        token = self._peek()
        self.position += 1
        return token

    def _expect(self, op):
        kind, value = self._take()
        if kind != "op" or value != op:
            raise InvalidInput(f"Expected {op!r} in {self.text!r}")

    def parse(self):
        if not self.tokens:
            raise InvalidInput("Empty polynomial expression")
        result = self._expr()
        if self.position != len(self.tokens):
            raise InvalidInput(f"Unexpected trailing input in {self.text!r}")
        return result

    def _expr(self):
        result = self._term()
        while self._peek() in (("op", "+"), ("op", "-")):
            _, op = self._take()
            right = self._term()
            result = result + right if op == "+" else result - right
        return result

    def _starts_atom(self):
        kind, value = self._peek()
        return kind in ("num", "u") or (kind == "op" and value == "(")

    def _term(self):
        result = self._factor()
        while True:
            kind, value = self._peek()
            if kind == "op" and value in ("*", "/"):
                self._take()
                right = self._factor()
                if value == "*":
                    result = result * right
                else:
                    if not right.is_constant or right.is_zero:
                        raise InvalidInput(f"Division by a non-constant or zero in {self.text!r}")
                    result = result * (1 / right.coeff(0))
            elif self._starts_atom():
                result = result * self._factor()
            else:
                return result

    def _factor(self):
        kind, value = self._peek()
        if kind == "op" and value in ("+", "-"):
            self._take()
            inner = self._factor()
            return -inner if value == "-" else inner
        return self._power()

    def _power(self):
        base = self._atom()
        if self._peek() == ("op", "^"):
            self._take()
            kind, exponent = self._take()
            if kind != "num":
                raise InvalidInput(f"Exponent must be a nonnegative integer in {self.text!r}")
            base = base ** exponent
        return base

    def _atom(self):
        kind, value = self._take()
        if kind == "num":
            return UniPoly.constant(value)
        if kind == "u":
            return UniPoly.variable()
        if kind == "op" and value == "(":
            inner = self._expr()
            self._expect(")")
            return inner
        raise InvalidInput(f"Unexpected {value or 'end of input'!r} in {self.text!r}")


def parse_expression(text):
    """Parse a polynomial expression in u."""
    if not isinstance(text, str):
        raise InvalidInput(f"Not a polynomial expression: {text!r}")
    return _ExpressionParser(text).parse()


def parse_poly(text):
    """A polynomial in either the coefficient format or the expression syntax."""
    if isinstance(text, str) and COEFFICIENT_LIST.match(text):
        return parse_coefficients(text)
    return parse_expression(text)


def parse_rational_function(text):
    """ "num|den" or just "num", each part a polynomial."""
    if not isinstance(text, str):
        raise InvalidInput(f"Not a rational function: {text!r}")
    numerator, bar, denominator = text.partition("|")
    num = parse_poly(numerator)
    den = parse_poly(denominator) if bar else UniPoly.one()
    if den.is_zero:
        raise InvalidInput(f"Zero denominator in {text!r}")
    return RationalFunction(num, den)


def parse_diagonal(text):
    """Four polynomials separated by ';', e.g. "1;1+u^2;-u;-u"."""
    parts = text.split(";") if isinstance(text, str) else []
    if len(parts) != 4:
        raise InvalidInput(f"A diagonal form has 4 entries separated by ';': {text!r}")
    return FibrationSpec.diagonal(*(parse_poly(part) for part in parts))


def parse_fibration(data):
    """
    Parse fibration JSON.

    Args:
        data: {"form": "standard", "a": ..., "b": ..., "p": ...} or
            {"form": "diagonal", "q": [q1, q2, q3, q4]}, as a dict or JSON text

    Returns:
        FibrationSpec
    """
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise InvalidInput(f"Fibration is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise InvalidInput("Fibration must be a JSON object")
    form = data.get("form")
    if form == "standard":
        return FibrationSpec.standard(
            parse_rational(str(data.get("a", "-1"))),
            parse_rational(str(data.get("b", "-1"))),
            parse_poly(data.get("p")),
        )
    if form == "diagonal":
        q = data.get("q")
        if not isinstance(q, list) or len(q) != 4:
            raise InvalidInput("A diagonal fibration needs a list q of 4 polynomials")
        return FibrationSpec.diagonal(*(parse_poly(entry) for entry in q))
    raise InvalidInput(f"Unknown fibration form {form!r}")


def parse_matrix_entries(data):
    """21 rationals given as a list or as whitespace/comma separated text."""
    if isinstance(data, str):
        data = data.replace(",", " ").split()
    if not isinstance(data, list):
        raise InvalidInput("Matrix entries must be a list or text")
    return [parse_rational(str(entry)) for entry in data]


def parse_pencil(f_data, g_data):
    return QuadricPencil.from_upper_triangles(parse_matrix_entries(f_data), parse_matrix_entries(g_data))


def parse_cert_expr(text):
    """
    Parse a certificate entry over x, y, z, w, u, v.

    Only digits, the six variable names, + - * / ( ) and sqrt(...) are accepted.
    """
    if not isinstance(text, str) or not CERT_TEXT.match(text.replace("sqrt", "")):
        raise InvalidInput(f"Illegal characters in certificate expression {text!r}")
    try:
        return parse_expr(text, local_dict={**CERT_SYMBOLS, "sqrt": sympy.sqrt}, global_dict={
            "__builtins__": {}, "Integer": sympy.Integer, "Rational": sympy.Rational, "Symbol": sympy.Symbol,
        })
    except (SyntaxError, TypeError, ValueError, sympy.SympifyError) as e:
        raise InvalidInput(f"Cannot parse certificate expression {text!r}: {e}") from e


def parse_certificate(data):
    """
    Parse certificate JSON as written by the formatter.

    Args:
        data: {"ring": "W" | "plain", "p": coefficients (W only), "target": ..., "entries": [...], "weights": [...]}

    Returns:
        SOSCertificate
    """
    if not isinstance(data, dict):
        raise InvalidInput("Certificate must be a JSON object")
    ring_name = data.get("ring")
    if ring_name == "W":
        ring = QuotientWRing(parse_poly(data.get("p")))
    elif ring_name == "plain":
        ring = PlainBivariate()
    else:
        raise InvalidInput(f"Unknown certificate ring {ring_name!r}")
    entries = data.get("entries")
    if not isinstance(entries, list) or not entries:
        raise InvalidInput("Certificate entries must be a nonempty list")
    weights = data.get("weights")
    if weights is not None:
        weights = tuple(parse_rational(str(w)) for w in weights)
    return SOSCertificate(
        tuple(parse_cert_expr(entry) for entry in entries),
        parse_cert_expr(str(data.get("target", ""))),
        ring,
        weights,
    )

"""
Helper functions for rendering qfib values as JSON-ready data and as text.
"""
import json
from enum import Enum

import sympy
from sympy.logic.boolalg import BooleanAtom

from qfib.services.exactmath import U


def to_json_native(value):
    """
    Convert nested result data to plain JSON types.

    sympy booleans become bool and sympy integers int; other sympy values are
    written as strings, enums as their value and tuples as lists.
    """
    if isinstance(value, Enum):
        return to_json_native(value.value)
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, BooleanAtom):
        return bool(value)
    if isinstance(value, sympy.Integer):
        return int(value)
    if isinstance(value, dict):
        return {key.value if isinstance(key, Enum) else str(key): to_json_native(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_json_native(item) for item in value]
    if isinstance(value, sympy.Basic):
        return str(value)
    return value


def format_rational(value):
    """Rational as "n" or "n/d"."""
    return str(value)


def format_poly(poly):
    """
    Format a univariate polynomial in the ascending coefficient format.

    Args:
        poly: UniPoly

    Returns:
        Comma-separated coefficients, constant term first ("0" for the zero polynomial)
    """
    if poly.is_zero:
        return "0"
    return ",".join(format_rational(c) for c in poly.coeffs)


def format_poly_expr(poly, var=U):
    return str(poly.as_expr(var))


def format_bipoly(bipoly):
    """Sparse "(i,j):c" terms, i the degree in u and j the degree in v."""
    return [f"({i},{j}):{format_rational(c)}" for (i, j), c in sorted(bipoly.terms.items())]


def format_point(point):
    return point.label


def format_profile(profile):
    return profile.as_dict()


def format_certificate(cert):
    """
    Format a sum-of-squares certificate so that the verify-cert command can re-read it.

    Args:
        cert: SOSCertificate

    Returns:
        dict with ring, p (for the W ring), target, entries and weights
    """
    ring = cert.ring.name
    return {
        "ring": ring,
        "p": format_poly(cert.ring.p) if ring == "W" else None,
        "target": str(cert.target),
        "entries": [str(entry) for entry in cert.entries],
        "weights": [format_rational(w) for w in cert.weights],
    }


def format_curve(curve):
    return {
        "equation": curve.equation,
        "rhs": format_poly(curve.rhs),
        "genus": curve.genus,
    }


def format_classification(classification):
    return {
        "is_type_I": classification.is_type_I,
        "admissible": classification.admissible,
        "degenerate_points": [
            {"factor": point.label, "corank": point.corank}
            for point in classification.degenerate_points
        ],
    }


def format_fibration(fib):
    """Format a fibration in the same JSON shape the parser accepts."""
    if fib.is_standard:
        return {
            "form": "standard",
            "a": format_rational(fib.a),
            "b": format_rational(fib.b),
            "p": format_poly(fib.p),
        }
    return {"form": "diagonal", "q": [format_poly(entry) for entry in fib.q]}


def format_sextic(sextic):
    return {
        "form": str(sextic.as_expr()),
        "coefficients": [format_rational(c) for c in sextic.coefficients],
    }


def format_report_text(report):
    """
    Human-readable rendering of a report.

    Args:
        report: Report

    Returns:
        Multi-line text: command, result fields, then one line per evidence record
    """
    lines = []
    command = report.request.command if report.request else "?"
    if report.error:
        return f"{command}: error (exit {report.exit_code}): {report.error}"
    lines.append(f"{command}:")
    for key, value in report.result.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value)
        lines.append(f"  {key}: {value}")
    for evidence in report.evidence:
        lines.append(f"  [{evidence.outcome.value}] {evidence.criterion} ({evidence.anchor})")
    return "\n".join(lines)


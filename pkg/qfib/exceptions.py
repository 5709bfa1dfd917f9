"""
Error hierarchy for qfib and the mapping from errors to CLI exit codes.
"""


class QfibError(Exception):
    """Base class for every error raised by qfib."""


class InvalidInput(QfibError, ValueError):
    """Malformed text, a schema mismatch, or a zero polynomial where a nonzero one is required."""


class PreconditionViolation(QfibError, ValueError):
    """Well-formed input that fails a mathematical precondition."""


class NotAdmissible(PreconditionViolation):
    """A diagonal entry is not squarefree, or two entries share a factor."""


class DegeneratePencil(PreconditionViolation):
    """det(lambda*f + mu*g) vanishes identically."""


class ZeroDivisor(PreconditionViolation):
    """Division by a certificate whose target is zero in its ring."""


class DivisionByZeroDenominator(PreconditionViolation):
    """A certificate denominator reduces to zero in the quotient ring."""


class InternalInvariantError(QfibError, RuntimeError):
    """A self-check failed; this is a bug, not bad input."""


EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_INTERNAL = 4


def exit_code_for(exc):
    """
    Map an exception to the exit code reported by the CLI.

    Args:
        exc: The exception raised while executing a request

    Returns:
        int: 2 for invalid input, 3 for precondition violations, 4 otherwise
    """
    if isinstance(exc, InvalidInput):
        return EXIT_INVALID_INPUT
    if isinstance(exc, PreconditionViolation):
        return EXIT_PRECONDITION
    return EXIT_INTERNAL

"""
Handlers for qfib commands.

Each handler takes a validated payload and returns the result dict and the
evidence records of a report.
"""
import logging
import time

from qfib.exceptions import InternalInvariantError, PreconditionViolation, exit_code_for
from qfib.models.report import Evidence, Outcome, Report
from qfib.models.request import parse_request
from qfib.services.ch0 import (
    PENCIL_NOTE,
    analyze,
    cm_criterion,
    cm_tau_admissible,
    compare_methods,
    criterion_A,
    elliptic_invariants,
    enumerate_tau_family,
    zarhin_sn_certificate,
)
from qfib.services.fibration import FibrationSpec, a0_real_rank, real_components, real_components_of
from qfib.services.pencil import pencil_delta, pencil_separable, pencil_sextic
from qfib.services.soscert import certify_u_plus_v, verify
from qfib.services.symbols import QuaternionSymbol, faddeev_decide, hilbert_product, hilbert_symbol, residue_profile
from qfib.utils.formatters import (
    format_certificate,
    format_curve,
    format_fibration,
    format_rational,
    format_sextic,
)
from qfib.utils.parsers import (
    parse_certificate,
    parse_diagonal,
    parse_fibration,
    parse_pencil,
    parse_poly,
    parse_rational,
    parse_rational_function,
)

logger = logging.getLogger(__name__)


def _fibration_from(payload):
    if payload.p is not None:
        return FibrationSpec.standard(parse_rational(payload.a), parse_rational(payload.b), parse_poly(payload.p))
    if payload.diagonal is not None:
        return parse_diagonal(payload.diagonal)
    return parse_fibration(payload.fibration)


def _symbol_from(payload):
    return QuaternionSymbol(parse_rational_function(payload.f), parse_rational_function(payload.g))


def handle_analyze(payload):
    """
    Run the analysis pipeline on one fibration.

    Args:
        payload: AnalyzePayload

    Returns:
        tuple: (result dict, evidence list)
    """
    fib = _fibration_from(payload)
    verdict = analyze(fib)
    result = {
        "status": verdict.status.value,
        "fibration": format_fibration(fib),
        "notes": verdict.notes,
    }
    return result, verdict.reasons


def handle_residues(payload):
    symbol = _symbol_from(payload)
    profile = residue_profile(symbol)
    result = {
        "symbol": str(symbol),
        "residues": profile.as_dict(),
        "nontrivial": [point.label for point in profile.nontrivial_points()],
    }
    evidence = Evidence(criterion="residues", anchor="tame-residue", data={"parity_ok": profile.parity_ok})
    return result, [evidence]


def handle_faddeev(payload):
    symbol = _symbol_from(payload)
    decision = faddeev_decide(symbol)
    result = {
        "symbol": str(symbol),
        "kind": decision.kind.value,
        "residues": decision.profile.as_dict(),
        "evaluation_point": format_rational(decision.evaluation_point) if decision.evaluation_point is not None else None,
    }
    return result, [Evidence(criterion="faddeev", anchor="faddeev-sequence", data={"kind": decision.kind.value})]


def handle_hilbert(payload):
    a, b = parse_rational(payload.a), parse_rational(payload.b)
    value = hilbert_symbol(a, b, payload.place)
    table = hilbert_product(a, b)
    result = {"a": format_rational(a), "b": format_rational(b), "place": str(payload.place), "value": value, "places": table}
    product = 1
    for local in table.values():
        product *= local
    return result, [Evidence(criterion="hilbert", anchor="hilbert-reciprocity", data={"product": product})]


def handle_jinv(payload):
    p = parse_poly(payload.p)
    invariants = elliptic_invariants(p)
    comparison = compare_methods(p)
    result = {
        "disc": format_rational(invariants.disc),
        "j": format_rational(invariants.j),
        "real_locus_connected": invariants.real_locus_connected,
        "ratio": format_rational(comparison.ratio),
        "j_interval": comparison.j_interval,
        "sums_of_squares": comparison.sums_of_squares,
        "odd_cm": comparison.odd_cm,
    }
    return result, [Evidence(criterion="jinv", anchor="elliptic-j-invariant")]


def handle_cm(payload):
    verdict = cm_criterion(parse_poly(payload.p))
    result = {
        "j": format_rational(verdict.j),
        "is_cm_rational_j": verdict.is_cm_rational_j,
        "order_disc": verdict.order_disc,
        "parity_pass": verdict.parity_pass,
    }
    outcome = Outcome.PASS if verdict.parity_pass else Outcome.FAIL
    return result, [Evidence(criterion="CM", anchor="odd-cm-order", outcome=outcome)]


def handle_certify(payload):
    """
    Emit the criterion A certificate for r(u, v) and the four-square certificate for u + v on W.

    Raises:
        PreconditionViolation: when p is outside the situation or b < a^2/3
    """
    p = parse_poly(payload.p)
    r_cert = criterion_A(p)
    if r_cert is None:
        raise PreconditionViolation(f"Criterion A does not apply to p = {p}: deg p != 2 or b < a^2/3")
    result = {
        "r_certificate": format_certificate(r_cert),
        "u_plus_v_certificate": format_certificate(certify_u_plus_v(p)),
    }
    if payload.rational:
        result["r_certificate_rational"] = format_certificate(r_cert.rationalized())
    return result, [Evidence(criterion="A", anchor="three-squares-r", outcome=Outcome.PASS)]


def handle_verify_cert(payload):
    cert = parse_certificate(payload.certificate)
    valid = verify(cert)
    logger.info(f"Certificate in the {cert.ring.name} ring with {len(cert.entries)} entries: valid={valid}")
    outcome = Outcome.PASS if valid else Outcome.FAIL
    return {"valid": valid, "ring": cert.ring.name}, [Evidence(criterion="verify", anchor="exact-identity", outcome=outcome)]


def handle_components(payload):
    if payload.g is not None:
        components = real_components(parse_poly(payload.g))
    else:
        components = real_components_of(parse_diagonal(payload.diagonal))
    result = {"components": components, "a0_real_rank": a0_real_rank(components)}
    outcome = Outcome.INFO if components == 1 else Outcome.OBSTRUCTS
    return result, [Evidence(criterion="components", anchor="real-components", outcome=outcome)]


def handle_pencil(payload):
    pencil = parse_pencil(payload.f, payload.g)
    separable = pencil_separable(pencil)
    result = {"sextic": format_sextic(pencil_sextic(pencil)), "separable": separable, "notes": []}
    if separable:
        result["delta"] = format_curve(pencil_delta(pencil))
    if payload.fibration is not None:
        fib = parse_fibration(payload.fibration)
        if fib.is_real_standard:
            result["notes"].append(PENCIL_NOTE)
    return result, [Evidence(criterion="pencil", anchor="pencil-sextic", data={"separable": separable})]


def handle_zarhin(payload):
    certificate = zarhin_sn_certificate(parse_poly(payload.f), payload.prime_budget)
    return certificate.as_dict(), [Evidence(criterion="zarhin", anchor="galois-sn")]


def _tau_record(admissibility):
    y = admissibility.y
    return {
        "D": admissibility.D,
        "k": admissibility.k,
        "beta": admissibility.beta,
        "admissible": admissibility.admissible,
        "y": str(y) if y is not None else None,
    }


def handle_tau(payload):
    if payload.D is not None:
        result = _tau_record(cm_tau_admissible(payload.D, payload.k, payload.beta))
    else:
        members = enumerate_tau_family(payload.n_max, payload.k_max)
        result = {"family": [{"n": member.n, **_tau_record(member.admissibility)} for member in members]}
    return result, [Evidence(criterion="tau", anchor="cm-tau-shape")]


COMMAND_HANDLERS = {
    "analyze": handle_analyze,
    "residues": handle_residues,
    "faddeev": handle_faddeev,
    "hilbert": handle_hilbert,
    "jinv": handle_jinv,
    "cm": handle_cm,
    "certify": handle_certify,
    "verify-cert": handle_verify_cert,
    "components": handle_components,
    "pencil": handle_pencil,
    "zarhin": handle_zarhin,
    "tau": handle_tau,
}


def execute_request(data):
    """
    Validate and execute one request.

    Args:
        data: Request dict or JSON text {"command": ..., "payload": {...}}

    Returns:
        Report: with timing in wall-clock seconds

    Raises:
        QfibError: on invalid input, a failed precondition or an internal check
    """
    start = time.perf_counter()
    request, payload = parse_request(data)
    logger.debug(f"Executing {request.command} with {request.payload}")
    result, evidence = COMMAND_HANDLERS[request.command](payload)
    return Report(
        request=request,
        result=result,
        evidence=evidence,
        timing=time.perf_counter() - start,
    )


def error_report(exc, request=None):
    """Report carrying the exit code and message of a failed request."""
    return Report(request=request, exit_code=exit_code_for(exc), error=str(exc))


def execute_safely(data):
    """
    Execute a request, turning any failure into an error report.

    Args:
        data: Request dict or JSON text

    Returns:
        Report
    """
    request = None
    try:
        request, _ = parse_request(data)
        return execute_request(data)
    except Exception as e:
        logger.error(f"Request failed: {e}", exc_info=exit_code_for(e) == 4)
        return error_report(e, request)


def execute_to_json(data):
    """
    Execute a request and serialize its report as one JSON line.

    A report that cannot be serialized is replaced by an internal error report.

    Args:
        data: Request dict or JSON text

    Returns:
        str: JSON text of the report
    """
    report = execute_safely(data)
    try:
        return report.model_dump_json()
    except Exception as e:
        logger.error(f"Report for {report.request.command if report.request else '?'} is not serializable: {e}", exc_info=True)
        return error_report(InternalInvariantError(f"report is not serializable: {e}"), report.request).model_dump_json()

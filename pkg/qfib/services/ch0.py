"""
Universal CH0-triviality of x^2 + y^2 + z^2 = u p(u) and the verdict pipeline.

Constructive criteria (three squares for r(u, v), even p with nonnegative even
coefficients, a Sturm-certified positivity pattern for r, odd CM order of the
elliptic curve w^2 = v p(-v)), the Galois S_n certificate, and `analyze`,
which combines them with the rationality and obstruction checks of the
fibration module.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from itertools import product

import sympy
from sympy import Poly, Rational, isprime, nextprime

from qfib.config.settings import PRIME_BUDGET, SEARCH_RADIUS, SEARCH_STEP
from qfib.exceptions import InternalInvariantError, NotAdmissible, PreconditionViolation
from qfib.models.report import Evidence, Outcome, Verdict, VerdictStatus
from qfib.services.exactmath import (
    U,
    UniPoly,
    exact_div_u_plus_v,
    is_nonnegative,
    is_rational_square,
    separability_check,
    sturm_root_count,
    to_rational,
)
from qfib.services.fibration import (
    a0_real_rank,
    brauer_obstruction,
    classify_type,
    real_components_of,
    witt_rational,
)
from qfib.services.soscert import three_square_certificate
from qfib.utils.formatters import format_certificate, format_classification, format_poly

logger = logging.getLogger(__name__)

# Rational j-invariants with complex multiplication, keyed by j, valued by the
# discriminant of the endomorphism order (class number one orders).
CM_J_INVARIANTS = {
    Rational(0): -3,
    Rational(1728): -4,
    Rational(-3375): -7,
    Rational(8000): -8,
    Rational(-32768): -11,
    Rational(54000): -12,
    Rational(287496): -16,
    Rational(-884736): -19,
    Rational(-12288000): -27,
    Rational(16581375): -28,
    Rational(-884736000): -43,
    Rational(-147197952000): -67,
    Rational(-262537412640768000): -163,
}


@dataclass(frozen=True)
class SituationCheck:
    ok: bool
    violations: tuple = ()


def situation_check(p):
    """
    Check that p is separable, monic, nonconstant, of even degree, with p(0) != 0 and positive on R.

    Returns:
        SituationCheck: ok flag and the list of violated conditions (never raises)
    """
    if p.is_zero:
        return SituationCheck(False, ("zero",))
    violations = []
    if p.is_constant:
        violations.append("constant")
    elif not separability_check(p).separable:
        violations.append("not_separable")
    if p.leading_coefficient != 1:
        violations.append("not_monic")
    if p.degree % 2:
        violations.append("odd_degree")
    if p(0) == 0:
        violations.append("vanishes_at_zero")
    elif sturm_root_count(p) > 0 or p(0) < 0:
        violations.append("not_positive")
    return SituationCheck(not violations, tuple(violations))


def _require_situation(p):
    check = situation_check(p)
    if not check.ok:
        raise PreconditionViolation(f"p = {p} violates: {', '.join(check.violations)}")


def criterion_A(p):
    """
    Three-square certificate for r(u, v) when deg p = 2 and b >= a^2/3.

    Returns:
        SOSCertificate or None
    """
    _require_situation(p)
    return three_square_certificate(p)


@dataclass(frozen=True)
class CriterionResult:
    passed: bool
    reason: str = ""


def criterion_B(p):
    """
    Pass iff p is even and monic with a_0 > 0 and every a_2i >= 0.

    Then r(u, v) >= 0 on R^2 and u + v is a sum of 4 squares on W by Pfister's
    theorem; no certificate is produced.
    """
    _require_situation(p)
    odd = [k for k in range(1, p.degree + 1, 2) if p.coeff(k) != 0]
    if odd:
        return CriterionResult(False, f"p is not even: a_{odd[0]} != 0")
    negative = [k for k in range(0, p.degree, 2) if p.coeff(k) < 0]
    if negative:
        return CriterionResult(False, f"a_{negative[0]} < 0")
    if p.coeff(0) <= 0:
        return CriterionResult(False, "a_0 <= 0")
    return CriterionResult(True, "even p with nonnegative even coefficients")


class PositivityKind(str, Enum):
    PATTERN_CERTIFIED = "PatternCertified"
    COUNTEREXAMPLE = "Counterexample"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class PositivityResult:
    kind: PositivityKind
    point: tuple = None
    value: Rational = None
    checks: tuple = ()


def _pattern_checks(r):
    """
    Sturm checks covering r(tv, v) = sum_e v^e h_e(t) by nonnegative quadratics in v.

    Every odd e with h_e != 0 borrows a share of h_{e-1} and h_{e+1}; the block
    A + h_e v + B v^2 is nonnegative when A, B >= 0 and 4AB - h_e^2 >= 0 on R.

    Returns:
        tuple: (certified, list of (description, passed))
    """
    parts = r.homogeneous_components()
    top = max(parts) if parts else -1

    def h(e):
        return parts.get(e, UniPoly.zero())

    odd = [e for e in range(1, top + 1, 2) if not h(e).is_zero]
    shares = Counter()
    for e in odd:
        shares[e - 1] += 1
        shares[e + 1] += 1
    checks = []
    for e in odd:
        below = h(e - 1) * Rational(1, shares[e - 1])
        above = h(e + 1) * Rational(1, shares[e + 1])
        checks.append((f"h_{e - 1}/{shares[e - 1]} >= 0", is_nonnegative(below)))
        checks.append((f"h_{e + 1}/{shares[e + 1]} >= 0", is_nonnegative(above)))
        checks.append((f"4*h_{e - 1}*h_{e + 1}/{shares[e - 1] * shares[e + 1]} - h_{e}^2 >= 0",
                       is_nonnegative(below * above * 4 - h(e) * h(e))))
    for e in range(0, top + 1, 2):
        if not shares[e]:
            checks.append((f"h_{e} >= 0", is_nonnegative(h(e))))
    return all(passed for _, passed in checks), checks


def _search_counterexample(r, radius, step, refinements=40):
    """Exact grid scan of r over [-radius, radius]^2, then a pattern search from the lowest point."""
    terms = list(r.terms.items())

    def evaluate(u, v):
        return sum((c * u ** i * v ** j for (i, j), c in terms), Rational(0))

    n = int(radius / step)
    grid = [k * step for k in range(-n, n + 1)]
    best_point, best_value = None, None
    for u, v in product(grid, grid):
        value = evaluate(u, v)
        if best_value is None or value < best_value:
            best_point, best_value = (u, v), value
    if best_value < 0:
        return best_point, best_value
    delta = step
    for _ in range(refinements):
        u0, v0 = best_point
        moves = [(du, dv) for du in (-delta, 0, delta) for dv in (-delta, 0, delta) if du or dv]
        candidates = [((u0 + du, v0 + dv), evaluate(u0 + du, v0 + dv)) for du, dv in moves]
        point, value = min(candidates, key=lambda pair: pair[1])
        if value < best_value:
            best_point, best_value = point, value
            if best_value < 0:
                return best_point, best_value
        else:
            delta = delta / 2
    return None


def positivity_rtv(p, radius=None, step=None):
    """
    Sound but incomplete test of r(u, v) >= 0 on R^2.

    Args:
        p: A polynomial passing situation_check
        radius: Half-width of the counterexample grid (default from settings)
        step: Grid spacing (default from settings)

    Returns:
        PositivityResult: PatternCertified, Counterexample((u, v), r(u, v) < 0), or Unknown
    """
    _require_situation(p)
    r = exact_div_u_plus_v(p)
    certified, checks = _pattern_checks(r)
    checks = tuple(checks)
    if certified:
        return PositivityResult(PositivityKind.PATTERN_CERTIFIED, checks=checks)
    radius = to_rational(radius if radius is not None else SEARCH_RADIUS)
    step = to_rational(step if step is not None else SEARCH_STEP)
    found = _search_counterexample(r, radius, step)
    if found:
        point, value = found
        logger.debug(f"r(u, v) < 0 at {point} for p = {p}")
        return PositivityResult(PositivityKind.COUNTEREXAMPLE, point, value, checks)
    return PositivityResult(PositivityKind.UNKNOWN, checks=checks)


@dataclass(frozen=True)
class EllipticInvariants:
    a: Rational
    b: Rational
    disc: Rational
    j: Rational

    @property
    def real_locus_connected(self):
        return bool(self.disc < 0)


def elliptic_invariants(p):
    """
    Discriminant and j-invariant of the elliptic curve w^2 = v p(-v), p = u^2 + a u + b.

    Returns:
        EllipticInvariants: disc = -16 b^3 (4 - a^2/b), j = 256 (3 - a^2/b)^3 / (4 - a^2/b)
    """
    if p.degree != 2:
        raise PreconditionViolation(f"p = {p} must have degree 2")
    if p.leading_coefficient != 1:
        raise PreconditionViolation(f"p = {p} must be monic")
    if not separability_check(p).separable:
        raise PreconditionViolation(f"p = {p} is not separable")
    a, b = p.coeff(1), p.coeff(0)
    if b == 0:
        raise PreconditionViolation("p(0) must be nonzero")
    ratio = a ** 2 / b
    disc = -16 * b ** 3 * (4 - ratio)
    j = 256 * (3 - ratio) ** 3 / (4 - ratio)
    return EllipticInvariants(a, b, disc, j)


@dataclass(frozen=True)
class CMVerdict:
    is_cm_rational_j: bool
    order_disc: int
    parity_pass: bool
    j: Rational


def cm_criterion(p):
    """
    Match j against the rational CM j-invariants; pass iff the CM order discriminant is odd.

    An odd order discriminant (equivalently D = 1 mod 4) gives A_0(X_F) = 0 over every
    field F containing R.
    """
    invariants = elliptic_invariants(p)
    order_disc = CM_J_INVARIANTS.get(invariants.j)
    is_cm = order_disc is not None
    return CMVerdict(is_cm, order_disc, is_cm and order_disc % 4 == 1, invariants.j)


@dataclass(frozen=True)
class MethodComparison:
    ratio: Rational
    j: Rational
    sums_of_squares: bool
    odd_cm: bool

    @property
    def j_interval(self):
        return "j >= 0" if self.ratio <= 3 else "j <= 0"


def compare_methods(p):
    """
    Which of the two degree-2 methods applies.

    With 0 <= a^2/b < 4: three squares work iff a^2/b <= 3 iff j >= 0, while the
    odd CM route needs a CM j, which is <= 0 beyond a^2/b = 3.
    """
    invariants = elliptic_invariants(p)
    ratio = invariants.a ** 2 / invariants.b
    return MethodComparison(ratio, invariants.j, bool(ratio <= 3), cm_criterion(p).parity_pass)


@dataclass(frozen=True)
class TauAdmissibility:
    admissible: bool
    D: int
    k: int
    beta: int

    @property
    def y(self):
        """k/(2 beta) sqrt(|D|), the imaginary part of tau - 1/2."""
        if not self.admissible:
            return None
        return Rational(self.k, 2 * self.beta) * sympy.sqrt(-self.D)


def cm_tau_admissible(D, k, beta):
    """
    Whether tau = 1/2 + (k / 2 beta) sqrt(D) has the required shape.

    Admissible iff D < 0, D = 1 mod 4, k and beta are positive odd, and beta divides k^2 D.
    """
    admissible = (
        D < 0 and D % 4 == 1
        and k > 0 and k % 2 == 1
        and beta > 0 and beta % 2 == 1
        and (k * k * D) % beta == 0
    )
    return TauAdmissibility(admissible, D, k, beta)


@dataclass(frozen=True)
class TauFamilyMember:
    n: int
    k: int
    admissibility: TauAdmissibility

    @property
    def y(self):
        return self.admissibility.y


def enumerate_tau_family(n_max, k_max):
    """The family D = -(n^2 + 2), beta = n^2 + 2, odd n, odd k > n, with y = k / (2 sqrt(n^2 + 2))."""
    members = []
    for n in range(1, n_max + 1, 2):
        for k in range(n + 2, k_max + 1, 2):
            beta = n * n + 2
            members.append(TauFamilyMember(n, k, cm_tau_admissible(-beta, k, beta)))
    return members


class SnStatus(str, Enum):
    CERTIFIED_SN = "CertifiedSn"
    NOT_SN = "NotSn"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class SnCertificate:
    status: SnStatus
    discriminant: Rational = None
    witnesses: dict = field(default_factory=dict)
    reason: str = ""
    primes_tried: int = 0

    def as_dict(self):
        return {
            "status": self.status.value,
            "discriminant": str(self.discriminant) if self.discriminant is not None else None,
            "witnesses": {name: {"prime": p, "cycle_type": list(t)} for name, (p, t) in self.witnesses.items()},
            "reason": self.reason,
            "primes_tried": self.primes_tried,
        }


def _cycle_type(integral, p):
    _, factors = Poly(integral.as_expr(), U, modulus=p).factor_list()
    return tuple(sorted(int(f.degree()) for f, k in factors for _ in range(k)))


def zarhin_sn_certificate(f, prime_budget=None):
    """
    Certify that the Galois group of f over Q is the full symmetric group.

    Dedekind: modulo a prime not dividing the discriminant the factor degrees are
    a cycle type of the Galois group. An n-cycle, a type powering to a
    transposition, and a q-cycle for a prime q > n/2 together force S_n.

    Args:
        f: Squarefree UniPoly of degree >= 5
        prime_budget: Number of good primes to scan (default from settings)

    Returns:
        SnCertificate: CertifiedSn with witness primes, NotSn for a square discriminant, or Inconclusive
    """
    n = f.degree
    if n < 5:
        raise PreconditionViolation(f"degree {n} < 5")
    if not separability_check(f).separable:
        raise PreconditionViolation(f"f = {f} is not squarefree")
    budget = prime_budget or PRIME_BUDGET
    if not f.is_irreducible:
        return SnCertificate(SnStatus.INCONCLUSIVE, reason=f"f = {f} is reducible over Q")
    discriminant = Rational(f.poly.discriminant())
    if is_rational_square(discriminant):
        return SnCertificate(SnStatus.NOT_SN, discriminant, reason="discriminant is a square: group inside A_n")

    _, integral = f.poly.clear_denoms(convert=True)
    bad = int(integral.discriminant()) * int(integral.LC())
    tests = {
        "n_cycle": lambda t: t == (n,),
        "transposition": lambda t: t.count(2) == 1 and all(d % 2 for d in t if d != 2),
        "prime_cycle": lambda t: any(isprime(d) and 2 * d > n for d in t),
    }
    witnesses = {}
    tried, p = 0, 1
    while tried < budget and len(witnesses) < len(tests):
        p = nextprime(p)
        if bad % p == 0:
            continue
        tried += 1
        cycle_type = _cycle_type(integral, p)
        for name, test in tests.items():
            if name not in witnesses and test(cycle_type):
                witnesses[name] = (p, cycle_type)
    if len(witnesses) == len(tests):
        return SnCertificate(SnStatus.CERTIFIED_SN, discriminant, witnesses, primes_tried=tried)
    missing = sorted(set(tests) - set(witnesses))
    return SnCertificate(
        SnStatus.INCONCLUSIVE, discriminant, witnesses,
        reason=f"no {', '.join(missing)} within {budget} good primes", primes_tried=tried,
    )


PENCIL_NOTE = (
    "(a, b) is nontrivial in Br(R): such a fibration never arises, over P^1, from a smooth "
    "intersection of two quadrics in P^5 with a rational point"
)


def _verdict(status, evidence, notes):
    univ = [e.criterion for e in evidence if e.supports_univ]
    not_univ = [e.criterion for e in evidence if e.supports_not_univ]
    if univ and not_univ:
        raise InternalInvariantError(f"Contradictory evidence: {univ} against {not_univ}")
    logger.info(f"Verdict {status.value} from {[e.criterion for e in evidence]}")
    return Verdict(status=status, reasons=evidence, notes=notes)


def _criteria_evidence(p):
    """Run the constructive criteria in order A, B, positivity, CM; every result is recorded."""
    evidence = []
    cert = criterion_A(p)
    evidence.append(Evidence(
        criterion="A", anchor="three-squares-r",
        outcome=Outcome.PASS if cert else Outcome.FAIL,
        data={"certificate": format_certificate(cert)} if cert else {"reason": "deg p != 2 or b < a^2/3"},
    ))
    b_result = criterion_B(p)
    evidence.append(Evidence(
        criterion="B", anchor="even-p-nonnegative-coefficients",
        outcome=Outcome.PASS if b_result.passed else Outcome.FAIL,
        data={"reason": b_result.reason},
    ))
    positivity = positivity_rtv(p)
    data = {"result": positivity.kind.value, "checks": [[d, ok] for d, ok in positivity.checks]}
    if positivity.kind == PositivityKind.COUNTEREXAMPLE:
        data["point"] = [str(c) for c in positivity.point]
        data["value"] = str(positivity.value)
    evidence.append(Evidence(
        criterion="positivity", anchor="r-nonnegative-pattern",
        outcome=Outcome.PASS if positivity.kind == PositivityKind.PATTERN_CERTIFIED else Outcome.FAIL,
        data=data,
    ))
    if p.degree == 2:
        cm = cm_criterion(p)
        evidence.append(Evidence(
            criterion="CM", anchor="odd-cm-order",
            outcome=Outcome.PASS if cm.parity_pass else Outcome.FAIL,
            data={"j": str(cm.j), "is_cm_rational_j": cm.is_cm_rational_j, "order_disc": cm.order_disc},
        ))
    return evidence


def analyze(fib):
    """
    Decide what the computable criteria say about a fibration.

    Order: Witt section (RATIONAL), real components and the Brauer obstruction
    (NOT_UNIV_CH0_TRIVIAL), the constructive criteria for the real standard form
    (UNIV_CH0_TRIVIAL), else UNKNOWN with the S_n certificate of p attached
    when deg p >= 5.

    Args:
        fib: FibrationSpec

    Returns:
        Verdict: status, evidence records and notes
    """
    evidence, notes = [], []
    if fib.is_real_standard:
        notes.append(PENCIL_NOTE)

    if witt_rational(fib):
        evidence.append(Evidence(criterion="witt", anchor="witt-section", outcome=Outcome.PASS))
        return _verdict(VerdictStatus.RATIONAL, evidence, notes)

    components = real_components_of(fib)
    evidence.append(Evidence(
        criterion="components", anchor="real-components",
        outcome=Outcome.INFO if components == 1 else Outcome.OBSTRUCTS,
        data={"components": components, "a0_real_rank": a0_real_rank(components)},
    ))
    if components != 1:
        return _verdict(VerdictStatus.NOT_UNIV_CH0_TRIVIAL, evidence, notes)

    try:
        classification = classify_type(fib)
    except NotAdmissible as e:
        classification = classify_type(fib, strict=False)
        evidence.append(Evidence(criterion="merged_model", anchor="admissible-model", data={"reason": str(e)}))
    evidence.append(Evidence(criterion="type", anchor="type-I-fibres", data=format_classification(classification)))

    if not classification.is_type_I:
        obstruction = brauer_obstruction(fib)
        evidence.append(Evidence(
            criterion="brauer", anchor="brauer-T-count",
            outcome=Outcome.OBSTRUCTS if obstruction.obstructed else Outcome.FAIL,
            data=obstruction.as_dict(),
        ))
        if obstruction.obstructed:
            return _verdict(VerdictStatus.NOT_UNIV_CH0_TRIVIAL, evidence, notes)
    elif fib.is_real_standard:
        check = situation_check(fib.p)
        evidence.append(Evidence(
            criterion="situation", anchor="positive-separable-p",
            outcome=Outcome.PASS if check.ok else Outcome.FAIL,
            data={"violations": list(check.violations)},
        ))
        if check.ok:
            evidence.extend(_criteria_evidence(fib.p))
            if any(e.supports_univ for e in evidence):
                return _verdict(VerdictStatus.UNIV_CH0_TRIVIAL, evidence, notes)

    if fib.is_standard and fib.p.degree >= 5 and separability_check(fib.p).separable:
        sn = zarhin_sn_certificate(fib.p)
        evidence.append(Evidence(
            criterion="zarhin", anchor="galois-sn",
            data={"polynomial": format_poly(fib.p), **sn.as_dict()},
        ))
    return _verdict(VerdictStatus.UNKNOWN, evidence, notes)


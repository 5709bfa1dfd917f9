"""
Command-line routes for qfib.
"""
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor

import click
from tqdm import tqdm

from qfib import __version__
from qfib.config.settings import BATCH_WORKERS, LOG_LEVEL
from qfib.exceptions import EXIT_INTERNAL, EXIT_INVALID_INPUT, EXIT_OK, InvalidInput, exit_code_for
from qfib.handlers.command_handlers import error_report, execute_request, execute_to_json
from qfib.utils.formatters import format_report_text

logger = logging.getLogger(__name__)

POLY_HELP = "Polynomial in u: ascending coefficients, constant first (\"1,0,1\" is 1 + u^2), or an expression like \"1+u^2\""

json_option = click.option("--json", "as_json", is_flag=True, help="Write the report as JSON.")


def _payload(**options):
    return {name: value for name, value in options.items() if value is not None}


def _emit(ctx, command, payload, as_json):
    """Execute one request and write its report; on failure write a JSON error report before re-raising."""
    as_json = as_json or ctx.obj.get("json", False)
    data = {"command": command, "payload": payload}
    try:
        report = execute_request(data)
    except Exception as e:
        if as_json:
            click.echo(error_report(e).model_dump_json())
        raise
    click.echo(report.model_dump_json() if as_json else format_report_text(report))
    return EXIT_OK


def _read_json(stream, what):
    try:
        return json.load(stream)
    except json.JSONDecodeError as e:
        raise InvalidInput(f"{what} is not valid JSON: {e}") from e


def register_cli_commands(cli):
    """
    Register the qfib subcommands with the command group.

    Args:
        cli: click Group
    """

    @cli.command()
    @click.option("--p", "p", help=POLY_HELP)
    @click.option("--a", "a", default="-1", show_default=True, help="Rational a of <1, -a, -b, -u p(u)>.")
    @click.option("--b", "b", default="-1", show_default=True, help="Rational b of <1, -a, -b, -u p(u)>.")
    @click.option("--diagonal", help="Four polynomials separated by ';', e.g. \"1;1+u^2;-u;-u\".")
    @click.option("--fibration", type=click.File("r"), help="Fibration JSON file ('-' for stdin).")
    @json_option
    @click.pass_context
    def analyze(ctx, p, a, b, diagonal, fibration, as_json):
        """Decide rationality and CH0 questions for a quadric surface bundle."""
        payload = _payload(p=p, diagonal=diagonal)
        if p is not None:
            payload.update(a=a, b=b)
        if fibration is not None:
            payload["fibration"] = _read_json(fibration, "Fibration")
        return _emit(ctx, "analyze", payload, as_json)

    @cli.command()
    @click.option("--f", "f", required=True, help="Rational function \"num|den\" in u.")
    @click.option("--g", "g", required=True, help="Rational function \"num|den\" in u.")
    @json_option
    @click.pass_context
    def residues(ctx, f, g, as_json):
        """Residues of the quaternion symbol (f, g) at its real ramification points."""
        return _emit(ctx, "residues", {"f": f, "g": g}, as_json)

    @cli.command()
    @click.option("--f", "f", required=True, help="Rational function \"num|den\" in u.")
    @click.option("--g", "g", required=True, help="Rational function \"num|den\" in u.")
    @json_option
    @click.pass_context
    def faddeev(ctx, f, g, as_json):
        """Classify (f, g) as trivial, the constant class (-1, -1), or ramified."""
        return _emit(ctx, "faddeev", {"f": f, "g": g}, as_json)

    @cli.command()
    @click.option("--a", "a", required=True)
    @click.option("--b", "b", required=True)
    @click.option("--place", default="real", show_default=True, help="A prime, or 'real'/'inf'.")
    @json_option
    @click.pass_context
    def hilbert(ctx, a, b, place, as_json):
        """Hilbert symbol (a, b) at a place of Q."""
        return _emit(ctx, "hilbert", {"a": a, "b": b, "place": place}, as_json)

    @cli.command()
    @click.option("--p", "p", required=True, help=POLY_HELP)
    @json_option
    @click.pass_context
    def jinv(ctx, p, as_json):
        """j-invariant of w^2 = v p(-v) for p = u^2 + a u + b."""
        return _emit(ctx, "jinv", {"p": p}, as_json)

    @cli.command()
    @click.option("--p", "p", required=True, help=POLY_HELP)
    @json_option
    @click.pass_context
    def cm(ctx, p, as_json):
        """Odd-order complex multiplication test for w^2 = v p(-v)."""
        return _emit(ctx, "cm", {"p": p}, as_json)

    @cli.command()
    @click.option("--p", "p", required=True, help=POLY_HELP)
    @click.option("--rational", is_flag=True, help="Also emit the certificate for r with rational coefficients only.")
    @json_option
    @click.pass_context
    def certify(ctx, p, rational, as_json):
        """Sum-of-squares certificates for r(u, v) and for u + v on W."""
        return _emit(ctx, "certify", {"p": p, "rational": rational}, as_json)

    @cli.command(name="verify-cert")
    @click.argument("certificate", type=click.File("r"))
    @json_option
    @click.pass_context
    def verify_cert(ctx, certificate, as_json):
        """Re-check a certificate JSON file exactly ('-' for stdin)."""
        return _emit(ctx, "verify-cert", {"certificate": _read_json(certificate, "Certificate")}, as_json)

    @cli.command()
    @click.option("--g", "g", help=POLY_HELP)
    @click.option("--diagonal", help="Four polynomials separated by ';'.")
    @json_option
    @click.pass_context
    def components(ctx, g, diagonal, as_json):
        """Number of connected components of the real locus."""
        return _emit(ctx, "components", _payload(g=g, diagonal=diagonal), as_json)

    @cli.command()
    @click.option("--f", "f", required=True, help="21 rationals: the upper triangle of the first 6x6 matrix, row by row.")
    @click.option("--g", "g", required=True, help="21 rationals: the upper triangle of the second 6x6 matrix.")
    @click.option("--fibration", type=click.File("r"), help="Fibration JSON file the pencil is meant to realize.")
    @json_option
    @click.pass_context
    def pencil(ctx, f, g, fibration, as_json):
        """Sextic, separability and genus-2 curve of a pencil of quadrics in P^5."""
        payload = {"f": f, "g": g}
        if fibration is not None:
            payload["fibration"] = _read_json(fibration, "Fibration")
        return _emit(ctx, "pencil", payload, as_json)

    @cli.command()
    @click.option("--f", "f", required=True, help=POLY_HELP)
    @click.option("--prime-budget", type=int, help="Good primes to scan (default QFIB_PRIME_BUDGET).")
    @json_option
    @click.pass_context
    def zarhin(ctx, f, prime_budget, as_json):
        """Certify that the Galois group of f is the full symmetric group."""
        return _emit(ctx, "zarhin", _payload(f=f, prime_budget=prime_budget), as_json)

    @cli.command()
    @click.option("--D", "D", type=int)
    @click.option("--k", "k", type=int)
    @click.option("--beta", type=int)
    @click.option("--n-max", type=int, help="Enumerate the family D = -(n^2 + 2) for odd n <= n-max.")
    @click.option("--k-max", type=int)
    @json_option
    @click.pass_context
    def tau(ctx, D, k, beta, n_max, k_max, as_json):
        """Admissibility of tau = 1/2 + (k / 2 beta) sqrt(D)."""
        return _emit(ctx, "tau", _payload(D=D, k=k, beta=beta, n_max=n_max, k_max=k_max), as_json)

    @cli.command()
    @click.argument("requests", type=click.File("r"))
    @click.option("--workers", type=int, default=BATCH_WORKERS, show_default=True)
    def batch(requests, workers):
        """Execute newline-delimited JSON requests; one JSON report per line, in input order."""
        lines = [line for line in requests.read().splitlines() if line.strip()]
        logger.info(f"Batch of {len(lines)} requests on {workers} workers")
        with ThreadPoolExecutor(max_workers=max(workers, 1)) as executor:
            reports = executor.map(execute_to_json, lines)
            for report in tqdm(reports, total=len(lines), file=sys.stderr, desc="qfib"):
                click.echo(report)
        return EXIT_OK


def build_cli():
    """
    Build the qfib command group with every subcommand registered.

    Returns:
        click.Group
    """

    @click.group()
    @click.option("--json", "as_json", is_flag=True, help="Write reports as JSON.")
    @click.version_option(__version__, prog_name="qfib")
    @click.pass_context
    def cli(ctx, as_json):
        """Exact analysis of quadric surface bundles over P^1 over the reals."""
        ctx.ensure_object(dict)
        ctx.obj["json"] = as_json

    register_cli_commands(cli)
    return cli


def run(argv=None):
    """
    Run the CLI and map failures to exit codes.

    Args:
        argv: Arguments without the program name (default sys.argv[1:])

    Returns:
        int: 0 on success, 2 on malformed input, 3 on a failed precondition, 4 on an internal error
    """
    logging.basicConfig(
        level=LOG_LEVEL,
        stream=sys.stderr,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    )
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        result = build_cli().main(args=args, prog_name="qfib", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_INVALID_INPUT
    except click.Abort:
        click.echo("Aborted.", err=True)
        return EXIT_INVALID_INPUT
    except Exception as e:
        code = exit_code_for(e)
        if code == EXIT_INTERNAL:
            logger.error(f"Internal error: {e}", exc_info=True)
        click.echo(f"Error: {e}", err=True)
        return code
    return result if isinstance(result, int) else EXIT_OK

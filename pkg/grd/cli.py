import argparse
import logging
import os
import re
import sys
from typing import List, Optional

from pydantic import BaseModel, ValidationError

from grd import __version__
from grd.algebra import parse_laurent
from grd.classify import canonical_form, equivalent, implies
from grd.exact import parse_rational
from grd.exceptions import DomainError, InputError
from grd.reports import (
    ResolvedReference,
    analyze,
    catalog_report,
    division_report,
    machine_record,
    render_machine,
    render_text,
    split_report,
    witness_report,
)
from grd.schemes import grd_profile, resolve_scheme
from grd.witness import (
    DEFAULT_SCALE_COUNT,
    Branch,
    FunctionKind,
    FunctionSpec,
    ProbeSequence,
    probe,
)


LOG_LEVELS = {
    "CRITICAL": logging.CRITICAL,
    "ERROR": logging.ERROR,
    "WARNING": logging.WARNING,
    "INFO": logging.INFO,
    "DEBUG": logging.DEBUG,
}

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DOMAIN = 3

# negative numbers and scheme literals that open with a negative coefficient
NEGATIVE_ARGUMENT = re.compile(r"^-\d+$|^-\d*\.\d+$|^-\d+(?:/\d+)?\s*@")


def configure_logging():
    logging.basicConfig(
        level=LOG_LEVELS.get(os.environ.get("LOG_LEVEL", "WARNING"), logging.WARNING),
        format="[%(asctime)s] %(levelname)s in %(module)s: %(message)s",
        datefmt="%Y-%m-%dT%H:%M:%S%z",
    )


def _analyze(args) -> BaseModel:
    return analyze(resolve_scheme(args.scheme))


def _split(args) -> BaseModel:
    return split_report(resolve_scheme(args.scheme))


def _implies(args) -> BaseModel:
    return implies(resolve_scheme(args.antecedent), resolve_scheme(args.consequent))


def _equiv(args) -> BaseModel:
    return equivalent(resolve_scheme(args.first), resolve_scheme(args.second))


def _canon(args) -> BaseModel:
    return canonical_form(resolve_scheme(args.scheme))


def _divides(args) -> BaseModel:
    return division_report(parse_laurent(args.numerator), parse_laurent(args.divisor), args.bound)


def _witness(args) -> BaseModel:
    return witness_report(
        resolve_scheme(args.antecedent),
        resolve_scheme(args.consequent),
        scale_count=args.scales,
        window_cap=args.window_cap,
    )


def _probe(args) -> BaseModel:
    coefficients = None
    if args.coefficients is not None:
        coefficients = [parse_rational(c) for c in args.coefficients.split(",")]
    function = FunctionSpec(kind=args.function, power=args.power, coefficients=coefficients)
    sequence = ProbeSequence(branch=args.branch, ratio=parse_rational(args.ratio), count=args.count)
    return probe(resolve_scheme(args.scheme), function, sequence)


def _catalog(args) -> BaseModel:
    if args.reference is None:
        return catalog_report()
    reference = args.reference
    if not reference.startswith("catalog:"):
        reference = f"catalog:{reference}"
    scheme = resolve_scheme(reference)
    profile = grd_profile(scheme)
    return ResolvedReference(
        reference=reference, scheme=scheme, order=profile.order, excess=profile.excess
    )


class SchemeArgumentParser(argparse.ArgumentParser):
    """Reads arguments such as ``-1@0,1@1`` as values, not as options."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = NEGATIVE_ARGUMENT


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format",
        choices=["text", "machine"],
        default="text",
        help="human-readable lines or a versioned JSON record",
    )

    parser = SchemeArgumentParser(
        prog="grd",
        description="Exact analysis and classification of generalized Riemann derivatives.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    scheme_help = 'scheme literal such as "1@1, -1@0" or a reference such as "catalog:riemann(2)"'

    sub = commands.add_parser("analyze", parents=[common], help="moments, order, excess and parity structure")
    sub.add_argument("scheme", help=scheme_help)
    sub.set_defaults(handler=_analyze)

    sub = commands.add_parser("split", parents=[common], help="even and odd components")
    sub.add_argument("scheme", help=scheme_help)
    sub.set_defaults(handler=_split)

    sub = commands.add_parser("implies", parents=[common], help="does --from differentiability imply --to?")
    sub.add_argument("--from", dest="antecedent", required=True, help=scheme_help)
    sub.add_argument("--to", dest="consequent", required=True, help=scheme_help)
    sub.set_defaults(handler=_implies)

    sub = commands.add_parser("equiv", parents=[common], help="equivalence with scaling constants")
    sub.add_argument("first", help=scheme_help)
    sub.add_argument("second", help=scheme_help)
    sub.set_defaults(handler=_equiv)

    sub = commands.add_parser("canon", parents=[common], help="canonical form of the equivalence class")
    sub.add_argument("scheme", help=scheme_help)
    sub.set_defaults(handler=_canon)

    sub = commands.add_parser("divides", parents=[common], help="exact Laurent polynomial division")
    sub.add_argument("numerator", help='Laurent polynomial such as "1*y2^2 - 4"')
    sub.add_argument("divisor", help='Laurent polynomial such as "1*y2^1 - 2"')
    sub.add_argument("--bound", type=int, default=None, help="also run the brute-force check with this padding")
    sub.set_defaults(handler=_divides)

    sub = commands.add_parser("witness", parents=[common], help="function differentiable for --from but not --to")
    sub.add_argument("--from", dest="antecedent", required=True, help=scheme_help)
    sub.add_argument("--to", dest="consequent", required=True, help=scheme_help)
    sub.add_argument("--scales", type=int, default=DEFAULT_SCALE_COUNT, help="number of scales M to verify")
    sub.add_argument("--window-cap", type=int, default=None, help="largest window radius L to try")
    sub.set_defaults(handler=_witness)

    sub = commands.add_parser("probe", parents=[common], help="exact difference quotients along an h-sequence")
    sub.add_argument("scheme", help=scheme_help)
    sub.add_argument("--function", choices=[k.value for k in FunctionKind if k is not FunctionKind.WITNESS_TABLE], required=True)
    sub.add_argument("--power", type=int, default=None, help="m for power_on_rationals")
    sub.add_argument("--coefficients", default=None, help="polynomial coefficients, constant first, comma separated")
    sub.add_argument("--branch", choices=[b.value for b in Branch], default=Branch.RATIONAL.value)
    sub.add_argument("--ratio", default="1/2", help="common ratio in (0, 1)")
    sub.add_argument("--count", type=int, default=8, help="number of samples, at least 3")
    sub.set_defaults(handler=_probe)

    sub = commands.add_parser("catalog", parents=[common], help="list named schemes or resolve one")
    sub.add_argument("reference", nargs="?", default=None, help='e.g. "symmetric(3)"')
    sub.set_defaults(handler=_catalog)
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit:
        return exit.code if isinstance(exit.code, int) else EXIT_INPUT
    try:
        report = args.handler(args)
    except (InputError, ValidationError) as e:
        message = str(e).splitlines()[0] if isinstance(e, InputError) else _validation_message(e)
        print(f"grd {args.command}: error: {message}", file=sys.stderr)
        return EXIT_INPUT
    except DomainError as e:
        print(f"grd {args.command}: error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    record = machine_record(args.command, report)
    print(render_machine(record) if args.format == "machine" else render_text(record))
    return EXIT_OK


def _validation_message(error: ValidationError) -> str:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"])
    return f"{location}: {first['msg']}" if location else first["msg"]


def main():
    configure_logging()
    sys.exit(run(sys.argv[1:]))

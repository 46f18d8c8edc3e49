"""Command-line surface: one handler per subcommand, each returning an exit code."""

import argparse
import asyncio
import logging
import sys
from typing import Optional

from pydantic import BaseModel, ValidationError

from normctl.config import settings
from normctl.core.exceptions import UsageError
from normctl.models.element import AlgebraElement
from normctl.models.pair import AlgebraPair
from normctl.repositories.element_repository import ElementRepository
from normctl.repositories.report_repository import ReportRepository
from normctl.schemas.bound import BoundInputs
from normctl.schemas.case import SunCheckConfig
from normctl.schemas.visibility import Rectangle, VisibilitySummary
from normctl.services.algebra_service import AlgebraService
from normctl.services.bound_service import BoundService
from normctl.services.case_service import CaseService
from normctl.services.inversion_service import InversionService
from normctl.services.sweep_service import SweepService
from normctl.services.visibility_service import VisibilityService

logger = logging.getLogger(__name__)

DEFAULT_DELTAS = [0.75, 0.8, 0.9]


# Shared helpers

def _emit(report: BaseModel, path: Optional[str]) -> None:
    text = ReportRepository.write_json(report, path)
    if path is None:
        sys.stdout.write(text)


def _pair(args: argparse.Namespace, element: Optional[AlgebraElement] = None) -> AlgebraPair:
    """Pair from --pair, else the default for ``element``; --grid overrides the oversampling."""
    if getattr(args, "pair", None):
        pair = ElementRepository.load_pair(args.pair)
    elif element is not None:
        pair = AlgebraPair.default_for(element)
    else:
        pair = AlgebraPair()
    if getattr(args, "grid", None) is not None:
        pair = AlgebraPair.model_validate({**pair.model_dump(), "grid_oversampling": args.grid})
    if element is not None and not isinstance(element, pair.element_type):
        raise UsageError(
            f"{element.kind} elements do not belong to {pair.kind}",
            {"element": element.kind, "pair": pair.kind}
        )
    return pair


def _rectangle(text: str) -> Rectangle:
    try:
        re_min, re_max, im_min, im_max = (float(part) for part in text.split(","))
        return Rectangle(re_min=re_min, re_max=re_max, im_min=im_min, im_max=im_max)
    except (ValueError, ValidationError) as e:
        raise argparse.ArgumentTypeError(f"expected re_min,re_max,im_min,im_max, got '{text}'") from e


# Handlers

def cmd_verify_diffnorm(args: argparse.Namespace) -> int:
    """Certify the structure constant of a differential pair."""
    pair = _pair(args)
    certificate = AlgebraService(pair).measure_diff_constant(
        args.samples, args.seed, args.max_degree, args.max_dimension
    )
    _emit(certificate, args.out)
    return 0


def cmd_invert(args: argparse.Namespace) -> int:
    """Neumann-series inverse of an element file."""
    element = ElementRepository.load_element(args.element)
    report = InversionService(_pair(args, element)).neumann_invert(element, args.tol, args.kmax)
    if args.emit:
        ElementRepository.save_element(report.inverse_element(), args.emit)
    _emit(report, args.out)
    return 0


def cmd_bound(args: argparse.Namespace) -> int:
    """Invert-and-bound for an element file, or f(u, v, c) for raw parameters."""
    service = BoundService()
    if args.element is None:
        if None in (args.u, args.v, args.c):
            raise UsageError("bound needs an element file or all of --u, --v, --c", {})
        _emit(service.product_report(BoundInputs(u=args.u, v=args.v, c=args.c)), args.out)
        return 0

    element = ElementRepository.load_element(args.element)
    inversion = InversionService(_pair(args, element))
    constant = args.constant
    if constant is None:
        constant = inversion.algebra.structure_constant(args.samples, args.seed)
    report = service.element_report(inversion, element, constant, args.tol, args.kmax)
    _emit(report, args.out)
    return 1 if report.dominated is False else 0


def cmd_sweep(args: argparse.Namespace) -> int:
    """Run a sweep config and write its CSV."""
    config = ElementRepository.load_sweep_config(args.config)
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.out is not None:
        updates["output"] = args.out
    if updates:
        config = config.model_copy(update=updates)
    rows = asyncio.run(SweepService(args.threads).run(config))
    text = ReportRepository.write_sweep_csv(rows, config.output)
    if config.output is None:
        sys.stdout.write(text)
    return 0


def cmd_visibility(args: argparse.Namespace) -> int:
    """Lower bounds for phi(delta); exit 1 when one exceeds a known closed form."""
    pair = _pair(args)
    service = VisibilityService(pair, args.max_degree, args.dimension)
    deltas = args.delta or DEFAULT_DELTAS
    estimates = [service.phi_lower_bound(delta, args.trials, args.seed) for delta in deltas]
    closed_form = None
    if pair.kind == "Wiener_in_C":
        closed_form = [service.nikolski_phi_wiener(delta) for delta in deltas]
    summary = VisibilitySummary(pair_kind=pair.kind, estimates=estimates, closed_form=closed_form)
    _emit(summary, args.out)
    if summary.ceiling_violations:
        logger.warning(f"Lower bounds above the closed form at delta={summary.ceiling_violations}")
        return 1
    return 0


def cmd_pseudospectrum(args: argparse.Namespace) -> int:
    """Resolvent-norm grid of a matrix as CSV."""
    element = ElementRepository.load_element(args.element)
    grid = VisibilityService.pseudospectrum(element, args.rect, args.resolution, args.delta)
    logger.info(f"0 {'outside' if grid.zero_excluded else 'inside'} the {args.delta}-pseudospectrum")
    text = ReportRepository.write_pseudospectrum_csv(grid, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def cmd_case_quotient(args: argparse.Namespace) -> int:
    report = CaseService().quotient_rule_check(ElementRepository.load_element(args.element))
    _emit(report, args.out)
    return 0 if report.holds else 1


def cmd_case_an_family(args: argparse.Namespace) -> int:
    report = CaseService().an_family_report(args.n)
    _emit(report, args.out)
    return 0 if report.consistent else 1


def cmd_case_baskakov(args: argparse.Namespace) -> int:
    report = CaseService().baskakov_bound(ElementRepository.load_element(args.element))
    _emit(report, args.out)
    return 0 if report.holds_ceiling else 1


def cmd_case_sun(args: argparse.Namespace) -> int:
    pair = _pair(args)
    certified = None
    if pair.is_differential:
        certified = AlgebraService(pair).measure_diff_constant(args.samples, args.seed).measured_C
    config = SunCheckConfig(theta=args.theta, samples=args.samples, seed=args.seed)
    report = CaseService().sun_theta_check(pair, config, certified)
    _emit(report, args.out)
    return 0 if report.nonincreasing else 1


# Parser

def _common(parser: argparse.ArgumentParser, pair: bool = True, seed: bool = True) -> None:
    parser.add_argument("--out", default=None, help="Output file (default: stdout)")
    if pair:
        parser.add_argument("--pair", default=None, help="Pair config JSON")
        parser.add_argument("--grid", type=int, default=None, help="Torus grid oversampling")
    if seed:
        parser.add_argument("--seed", type=int, default=settings.default_seed)


def _inversion_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tol", type=float, default=settings.default_tol)
    parser.add_argument("--kmax", type=int, default=settings.default_k_max)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="normctl",
        description="Norm-controlled inversion in differential subalgebras",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--log-level", default=None, help=f"Logging level (default: {settings.log_level})")
    sub = parser.add_subparsers(dest="command")

    verify = sub.add_parser("verify-diffnorm", help="Certify the differential-norm constant")
    _common(verify)
    verify.add_argument("--samples", type=int, default=1000)
    verify.add_argument("--max-degree", type=int, default=None)
    verify.add_argument("--max-dimension", type=int, default=None)
    verify.set_defaults(handler=cmd_verify_diffnorm)

    invert = sub.add_parser("invert", help="Neumann-series inverse of an element")
    invert.add_argument("element")
    _common(invert, seed=False)
    _inversion_flags(invert)
    invert.add_argument("--emit", default=None, help="Write the inverse as an element file")
    invert.set_defaults(handler=cmd_invert)

    bound = sub.add_parser("bound", help="Inversion bounds for an element or for (u, v, c)")
    bound.add_argument("element", nargs="?", default=None)
    _common(bound)
    _inversion_flags(bound)
    bound.add_argument("--constant", type=float, default=None, help="Structure constant; certified when unset")
    bound.add_argument("--samples", type=int, default=200, help="Pairs used to certify the constant")
    bound.add_argument("--u", type=float, default=None)
    bound.add_argument("--v", type=float, default=None)
    bound.add_argument("--c", type=float, default=None)
    bound.set_defaults(handler=cmd_bound)

    sweep = sub.add_parser("sweep", help="Run a sweep config to CSV")
    sweep.add_argument("config")
    sweep.add_argument("--out", default=None, help="Overrides the config's output path")
    sweep.add_argument("--seed", type=int, default=None, help="Overrides the config's seed")
    sweep.add_argument("--threads", type=int, default=None, help=f"Worker threads (default: {settings.threads})")
    sweep.set_defaults(handler=cmd_sweep)

    visibility = sub.add_parser("visibility", help="Seeded lower bounds for phi(delta)")
    _common(visibility)
    visibility.add_argument("--delta", type=float, action="append", default=None)
    visibility.add_argument("--trials", type=int, default=1000)
    visibility.add_argument("--max-degree", type=int, default=8)
    visibility.add_argument("--dimension", type=int, default=4)
    visibility.set_defaults(handler=cmd_visibility)

    pseudo = sub.add_parser("pseudospectrum", help="Resolvent-norm grid of a matrix")
    pseudo.add_argument("element")
    pseudo.add_argument("--out", default=None)
    pseudo.add_argument("--rect", type=_rectangle, default=_rectangle("-2,2,-2,2"))
    pseudo.add_argument("--resolution", type=int, default=64)
    pseudo.add_argument("--delta", type=float, default=0.1)
    pseudo.set_defaults(handler=cmd_pseudospectrum)

    cases = sub.add_parser("cases", help="Worked examples")
    case_sub = cases.add_subparsers(dest="case")

    quotient = case_sub.add_parser("quotient", help="Quotient rule for 1/f in C1")
    quotient.add_argument("element")
    _common(quotient, pair=False, seed=False)
    quotient.set_defaults(handler=cmd_case_quotient)

    an = case_sub.add_parser("an-family", help="a_n = 1 + cos(2 pi n t)/2")
    an.add_argument("--n", type=int, default=5)
    _common(an, pair=False, seed=False)
    an.set_defaults(handler=cmd_case_an_family)

    baskakov = case_sub.add_parser("baskakov", help="Tail-function bound in the Wiener algebra")
    baskakov.add_argument("element")
    _common(baskakov, pair=False, seed=False)
    baskakov.set_defaults(handler=cmd_case_baskakov)

    sun = case_sub.add_parser("sun", help="theta-differential constants")
    _common(sun)
    sun.add_argument("--theta", type=float, default=0.5)
    sun.add_argument("--samples", type=int, default=200)
    sun.set_defaults(handler=cmd_case_sun)

    return parser


def dispatch(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    handler = getattr(args, "handler", None)
    if handler is None:
        parser.print_help(sys.stderr)
        return 2
    return handler(args)

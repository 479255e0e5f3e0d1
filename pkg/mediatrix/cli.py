"""Command-line entry point.

    mediatrix run scenario.toml
    mediatrix fuzz --seed 7 --count 200 --da 2 --dg 3 --db 2 --max-steps 6
    mediatrix locc-verify --seed 7 --count 50 --rounds 2 --alphabet 2
    mediatrix demo bmv --mode quantum

Exit codes: 0 success, 1 input error, 2 violation found in a result.
"""

import argparse
import logging
import sys
from collections.abc import Sequence

from mediatrix import __version__
from mediatrix.config import settings
from mediatrix.core.exceptions import EXIT_INPUT_ERROR, EXIT_VIOLATION, MediatrixError
from mediatrix.domain.protocol import MediatorMode
from mediatrix.schemas.report import Report
from mediatrix.schemas.scenario import load_scenario
from mediatrix.services.campaign_service import campaign_service
from mediatrix.services.fuzz_service import FuzzConfig
from mediatrix.services.protocol_service import protocol_service
from mediatrix.services.reporting_service import ReportFormat, reporting_service

logger = logging.getLogger("mediatrix")

EXIT_OK = 0


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors (exit 1); exit 2 stays reserved for violations."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", metavar="PATH", help="Write the report to PATH instead of stdout")
    common.add_argument("--format", choices=["csv", "json"], help="Report format (default from settings)")
    common.add_argument("--quiet", action="store_true", help="Only log warnings and errors")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _Parser(
        prog="mediatrix",
        description="Entanglement mediation simulator: classical vs quantum mediators, LOCC compilation",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", parents=[common], help="Run a scenario file")
    run.add_argument("config", help="TOML scenario file")

    fuzz = commands.add_parser("fuzz", parents=[common], help="Classical-mode theorem sweep")
    fuzz.add_argument("--seed", type=int, default=0)
    fuzz.add_argument("--count", type=int, default=200)
    fuzz.add_argument("--da", type=int, default=2)
    fuzz.add_argument("--dg", type=int, default=3)
    fuzz.add_argument("--db", type=int, default=2)
    fuzz.add_argument("--max-steps", type=int, default=6)
    fuzz.add_argument("--env-dim", type=int, default=2, help="Max Stinespring environment dim")

    locc = commands.add_parser("locc-verify", parents=[common], help="LOCC compilation sweep")
    locc.add_argument("--seed", type=int, default=0)
    locc.add_argument("--count", type=int, default=50)
    locc.add_argument("--rounds", type=int, default=2)
    locc.add_argument("--alphabet", type=int, default=2)
    locc.add_argument("--generator", choices=["random", "identity"], default="random")

    demo = commands.add_parser("demo", help="Built-in scenarios")
    demos = demo.add_subparsers(dest="demo", required=True)
    bmv = demos.add_parser("bmv", parents=[common], help="Qubit-mediated two-party circuit")
    bmv.add_argument("--mode", choices=[m.value for m in MediatorMode], default=MediatorMode.QUANTUM.value)
    return parser


def configure_logging(quiet: bool) -> None:
    logging.basicConfig(
        level=logging.WARNING if quiet else settings.log_level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _emit(report: Report, path: str | None, fmt: ReportFormat | None) -> None:
    if path:
        reporting_service.write(report, path, fmt)
    else:
        sys.stdout.write(reporting_service.render(report, fmt))


def _dispatch(args: argparse.Namespace) -> Report:
    fmt: ReportFormat | None = args.format
    path: str | None = args.report
    if args.command == "run":
        config = load_scenario(args.config)
        protocol = protocol_service.build_from_config(config)
        report = protocol_service.run_report(config.name, protocol, config.seed)
        _emit(report, path or config.report.path, fmt or config.report.format)
        return report
    if args.command == "fuzz":
        fuzz_config = FuzzConfig(
            d_a=args.da,
            d_g=args.dg,
            d_b=args.db,
            max_steps=args.max_steps,
            count=args.count,
            env_dim=args.env_dim,
        )
        report = campaign_service.run_fuzz_campaign(args.seed, fuzz_config)
    elif args.command == "locc-verify":
        report = campaign_service.run_locc_campaign(
            args.seed, args.count, args.rounds, args.alphabet, args.generator
        )
    else:
        mode = MediatorMode(args.mode)
        report = protocol_service.run_report(f"bmv-{mode.value}", protocol_service.bmv_scenario(mode))
    _emit(report, path, fmt)
    return report


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(getattr(args, "quiet", False))
    try:
        report = _dispatch(args)
    except MediatrixError as exc:
        print(f"error: {exc.detail}", file=sys.stderr)
        return exc.exit_code
    if report.violation:
        logger.error(f"{report.kind}: violation found")
        return EXIT_VIOLATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

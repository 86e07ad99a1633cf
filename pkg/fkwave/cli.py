"""
Command-line entry point.

    fkwave diagram --fk-beta 2 --points 41 --jobs 4
    fkwave wave    --fk-beta 2 --sigma 1.8
    fkwave hull    --fk-beta 2 --p 0.5,0.25 --sigma -1,0,1,3
    fkwave branch  --fk-beta 1 --c auto+1 --p 0.4,0.2,0.1
    fkwave verify  --fk-beta 2

Exit codes: 0 success, 1 verification failure, 2 invalid input or spec,
3 numeric non-convergence.
"""

import argparse
import logging
import math
from pathlib import Path

from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from fkwave import __version__
from fkwave.core.config import get_settings
from fkwave.core.errors import FKWaveError, VerificationFailure
from fkwave.core.logging import setup_logging
from fkwave.repo.spec_repo import resolve_spec
from fkwave.schemas.run import RunConfig
from fkwave.services.diagram_service import DiagramService
from fkwave.services.hull_service import HullService
from fkwave.services.verification_service import VerificationService

logger = logging.getLogger(__name__)
console = Console()

EXIT_OK = 0
EXIT_INPUT = 2


def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values or not all(math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError(f"expected comma-separated finite numbers, got {text!r}")
    return values


def _range(text: str) -> tuple[float, float]:
    values = _float_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected lo,hi, got {text!r}")
    return values[0], values[1]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_argument_group("operator")
    source.add_argument("--fk-beta", type=float, help="classical FK operator with f(x) = -beta cos(2 pi x)")
    source.add_argument("--spec", type=Path, help="YAML nonlinearity spec file")

    numerics = common.add_argument_group("numerics")
    numerics.add_argument("--h", type=float, help="grid spacing")
    numerics.add_argument("--dt", type=float, help="time step (default: largest monotone step)")
    numerics.add_argument("--T", type=float, help="evolution horizon")
    numerics.add_argument("--half-width", type=float, help="half width of the lattice window")
    numerics.add_argument("--M", type=int, help="hull grid points per period")
    numerics.add_argument("--c-tol", type=float, help="|c| below which a front counts as pinned")
    numerics.add_argument("--window-fraction", type=float, help="trailing fraction of the trace used in the fit")
    numerics.add_argument("--initial", choices=("logistic", "ramp"), default="logistic")

    run = common.add_argument_group("run")
    run.add_argument("--out", type=Path, help="output directory (default: FKWAVE_OUT or ./out)")
    run.add_argument("--jobs", type=int, help="worker processes")
    run.add_argument("--seed", type=int, help="seed for randomized checks")
    run.add_argument("--log-level", choices=("DEBUG", "INFO", "WARNING", "ERROR"))

    parser = argparse.ArgumentParser(prog="fkwave", description="Traveling-wave velocity diagrams for lattice fronts")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    diagram = sub.add_parser("diagram", parents=[common], help="sweep c(sigma) and write diagram.csv/.svg")
    diagram.add_argument("--points", type=int, default=41)
    diagram.add_argument("--margin", type=float, default=0.025, help="fraction of sigma+ - sigma- kept off each end")
    diagram.add_argument("--range", type=_range, help="explicit sweep endpoints lo,hi")

    wave = sub.add_parser("wave", parents=[common], help="one front: profile.csv and trace.csv")
    wave.add_argument("--sigma", type=float, required=True)
    wave.add_argument("--c-hint", type=float, help="expected velocity, used to size the run")

    hull = sub.add_parser("hull", parents=[common], help="effective velocities lambda_p(sigma)")
    hull.add_argument("--p", type=_float_list, required=True)
    hull.add_argument("--sigma", type=_float_list, required=True)

    branch = sub.add_parser("branch", parents=[common], help="vertical branch along p -> 0")
    branch.add_argument("--c", required=True, help="velocity, or auto[+-offset] relative to c+/c-")
    branch.add_argument("--p", type=_float_list, required=True)
    branch.add_argument("--side", choices=("plus", "minus"), default="plus")

    verify = sub.add_parser("verify", parents=[common], help="run the verifier battery")
    verify.add_argument("--epsilon", type=float, default=0.01)
    verify.add_argument("--supersolution-M", type=float, help="override the supersolution constant M")
    return parser


def run_config(args: argparse.Namespace) -> RunConfig:
    """Flags over Settings defaults."""
    s = get_settings()

    def pick(value, default):
        return default if value is None else value

    fields = dict(
        fk_beta=args.fk_beta,
        spec_path=args.spec,
        h=pick(args.h, s.H),
        dt=args.dt,
        T=pick(args.T, s.T),
        domain_half_width=pick(args.half_width, s.DOMAIN_HALF_WIDTH),
        M=pick(args.M, s.HULL_M),
        c_tol=pick(args.c_tol, s.C_TOL),
        window_fraction=pick(args.window_fraction, s.WINDOW_FRACTION),
        initial=args.initial,
        out=pick(args.out, s.OUT),
        jobs=pick(args.jobs, s.JOBS),
        seed=pick(args.seed, s.SEED),
    )
    if args.command == "diagram":
        fields.update(points=args.points, margin=args.margin)
        if args.range is not None:
            fields.update(sigma_lo=args.range[0], sigma_hi=args.range[1])
    return RunConfig(**fields)


# ----------------- Subcommands -----------------


def cmd_diagram(config: RunConfig, args: argparse.Namespace) -> int:
    spec = resolve_spec(config.fk_beta, config.spec_path)
    diagram = DiagramService(spec, config).run_diagram()

    table = Table(title=f"velocity diagram {spec.label}")
    for col in ("sigma", "c", "stderr", "pinned"):
        table.add_column(col, justify="right")
    for p in diagram.points:
        if p.failed:
            table.add_row(f"{p.sigma:.4g}", "[red]failed[/red]", "", "")
        else:
            table.add_row(f"{p.sigma:.4g}", f"{p.c:.6g}", f"{p.stderr:.2g}", "yes" if p.pinned else "")
    console.print(table)
    if diagram.plateau is not None:
        console.print(f"plateau: [{diagram.plateau[0]:.6g}, {diagram.plateau[1]:.6g}]")
    crit = diagram.critical
    if crit is not None:
        console.print(
            f"c- = {diagram.c_minus:.6g} in [{crit.c_minus.bracket[0]:.6g}, {crit.c_minus.bracket[1]:.6g}], "
            f"c+ = {diagram.c_plus:.6g} in [{crit.c_plus.bracket[0]:.6g}, {crit.c_plus.bracket[1]:.6g}]"
        )
        console.print(f"c+ - c- = {crit.gap:.6g} +/- {crit.gap_uncertainty:.2g}")
    failed = sum(p.failed for p in diagram.points)
    if failed:
        console.print(f"[yellow]{failed} rows failed, see diagram.csv[/yellow]")
    return EXIT_OK


def cmd_wave(config: RunConfig, args: argparse.Namespace) -> int:
    spec = resolve_spec(config.fk_beta, config.spec_path)
    outcome = DiagramService(spec, config).run_wave(args.sigma, c_hint=args.c_hint)
    p = outcome.point
    console.print(f"sigma    = {p.sigma:.6g}")
    console.print(f"c        = {p.c:.10g}")
    console.print(f"stderr   = {p.stderr:.3g}")
    console.print(f"pinned   = {p.pinned}")
    console.print(f"max jump = {p.max_jump:.4g}")
    console.print(f"wrote {outcome.profile_csv} and {outcome.trace_csv}")
    return EXIT_OK


def cmd_hull(config: RunConfig, args: argparse.Namespace) -> int:
    spec = resolve_spec(config.fk_beta, config.spec_path)
    results = HullService(spec, config).run_hull(args.p, args.sigma)
    table = Table(title=f"hull {spec.label}")
    for col in ("p", "sigma", "lambda_p", "residual", "converged"):
        table.add_column(col, justify="right")
    for r in results:
        table.add_row(f"{r.p:g}", f"{r.sigma:g}", f"{r.lambda_p:.6g}", f"{r.fit_residual:.2g}", str(r.converged))
    console.print(table)
    return EXIT_OK


def cmd_branch(config: RunConfig, args: argparse.Namespace) -> int:
    spec = resolve_spec(config.fk_beta, config.spec_path)
    rows = HullService(spec, config).run_branch(args.c, args.p, args.side)
    table = Table(title=f"vertical branch {spec.label} ({args.side})")
    for col in ("p", "sigma_lo", "sigma_hi", "sigma_mid", "gap"):
        table.add_column(col, justify="right")
    for r in rows:
        table.add_row(f"{r.p:g}", f"{r.sigma_lo:.6g}", f"{r.sigma_hi:.6g}", f"{r.sigma_mid:.6g}", f"{r.gap:.4g}")
    console.print(table)
    return EXIT_OK


def cmd_verify(config: RunConfig, args: argparse.Namespace) -> int:
    spec = resolve_spec(config.fk_beta, config.spec_path)
    report = VerificationService(
        spec, config, epsilon=args.epsilon, supersolution_M=args.supersolution_M
    ).run()

    table = Table(title=f"verification {report.spec_id}")
    for col in ("check", "result", "value", "threshold", "detail"):
        table.add_column(col)
    for c in report.checks:
        table.add_row(
            c.name,
            "[green]pass[/green]" if c.passed else "[red]FAIL[/red]",
            "" if c.value is None else f"{c.value:.4g}",
            "" if c.threshold is None else f"{c.threshold:.4g}",
            escape(c.detail),
        )
    console.print(table)
    if not report.passed:
        names = ", ".join(c.name for c in report.failures)
        raise VerificationFailure(f"failed checks: {names}")
    return EXIT_OK


COMMANDS = {
    "diagram": cmd_diagram,
    "wave": cmd_wave,
    "hull": cmd_hull,
    "branch": cmd_branch,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.log_level:
        setup_logging(args.log_level)

    try:
        config = run_config(args)
    except ValidationError as e:
        console.print(f"[red]invalid configuration:[/red] {escape(e.errors()[0]['msg'])}")
        return EXIT_INPUT

    try:
        return COMMANDS[args.command](config, args)
    except FKWaveError as e:
        logger.error(f"{type(e).__name__}: {e}")
        console.print(f"[red]{type(e).__name__}:[/red] {escape(str(e))}")
        return e.exit_code

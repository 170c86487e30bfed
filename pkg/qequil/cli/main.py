"""
Main CLI interface for qequil.
"""

import os
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

import click
from rich.console import Console

from .. import __version__
from ..config.manager import ConfigManager
from ..constants import OUTPUT_FORMATS, SEPARATION_COLUMNS, SUPPORTED_SOLVERS
from ..exceptions import ConfigurationError
from ..models.run import RunConfig
from ..services import matkit
from ..services import reproduce as reproduction
from ..services import serialization
from ..services.corrcomp import UNTRUSTED_PROTOCOL_KINDS
from ..services.workflow import EMBEDDINGS, FAMILIES, VERIFY_MODES, WorkflowLogger, WorkflowOrchestrator
from ..utils.cli_errors import exit_for_verdict, handle_cli_errors


@click.group()
@click.version_option(version=__version__, prog_name="qequil")
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose output for debugging")
@click.option(
    "--log-file",
    type=click.Path(exists=False, dir_okay=False),
    help="Log file path for detailed logging",
)
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=False, dir_okay=False, path_type=Path),
    help="Configuration file (default: ~/.qequil/config.md)",
)
@click.option(
    "--solver",
    type=click.Choice(SUPPORTED_SOLVERS, case_sensitive=False),
    default=None,
    help="Semidefinite solver (default from configuration)",
)
@click.pass_context
def cli(
    ctx: click.Context,
    verbose: bool,
    log_file: Optional[str],
    config_path: Optional[Path],
    solver: Optional[str],
):
    """
    qequil - equilibria of strategic games under quantum strategies.

    Checks classical and quantum correlated equilibria, certifies the
    largest quantum incentive to deviate, builds the explicit game
    families, and bounds the classical and quantum cost of generating a
    correlation.

    Examples:

        # Is a distribution a correlated equilibrium?
        qequil verify game.json dist.json

        # Largest POVM incentive on the superposition of a CE
        qequil incentive game.json dist.json --mode mul

        # Separation rows for correlation instances
        qequil corr ed:8 hjmr:4 conj:4:2

        # Recompute every headline number
        qequil reproduce

    For more help on specific commands, use: qequil COMMAND --help
    """
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    ctx.obj["log_file"] = log_file
    ctx.obj["config_manager"] = ConfigManager(config_path)
    ctx.obj["solver"] = solver.upper() if solver else None


def _load_config(ctx: click.Context):
    if "config" not in ctx.obj:
        manager = ctx.obj.get("config_manager") or ConfigManager()
        config = manager.load_or_default()
        manager.validate_config(config)
        matkit.set_eigen_method(config.eigen_method)
        ctx.obj["verbose"] = ctx.obj.get("verbose", False) or config.verbose
        ctx.obj["config"] = config
    return ctx.obj["config"]


RUN_OPTIONS = (
    click.option("--tol", type=float, default=None, help="Verdict tolerance (default from configuration)"),
    click.option("--seed", type=click.IntRange(min=0), default=None, help="Seed for randomized searches"),
    click.option("--out", type=click.Path(path_type=Path), default=None, help="Write the report to this path"),
    click.option(
        "--format",
        "fmt",
        type=click.Choice(OUTPUT_FORMATS, case_sensitive=False),
        default=None,
        help="Report format",
    ),
    click.option("--jobs", type=click.IntRange(min=1), default=1, help="Parallel workers for independent instances"),
)


def run_options(func):
    """--tol, --seed, --out, --format and --jobs, shared by every computing command."""
    for option in reversed(RUN_OPTIONS):
        func = option(func)
    return func


def _run_config(
    ctx: click.Context,
    command: str,
    tol: Optional[float],
    seed: Optional[int],
    out: Optional[Path],
    fmt: Optional[str],
    jobs: int,
    inputs: Optional[Dict[str, Path]] = None,
    default_format: Optional[str] = None,
) -> RunConfig:
    config = _load_config(ctx)
    return RunConfig(
        command=command,
        inputs=inputs or {},
        output=out,
        tolerance=config.tolerance if tol is None else tol,
        ce_precheck_tolerance=config.ce_precheck_tolerance,
        povm_gap_tolerance=config.povm_gap_tolerance,
        channel_gap_tolerance=config.channel_gap_tolerance,
        seed=config.seed if seed is None else seed,
        output_format=(fmt or default_format or config.output_format).lower(),
        jobs=jobs,
        solver=ctx.obj.get("solver") or config.solver,
        nn_restarts=config.nn_restarts,
        max_local_dimension=config.max_local_dimension,
    )


def _logging_options(ctx: click.Context) -> Dict[str, Any]:
    config = _load_config(ctx)
    return {
        "verbose": ctx.obj["verbose"],
        "log_file": ctx.obj.get("log_file") or config.log_file,
        "log_level": config.log_level,
    }


def _orchestrator(ctx: click.Context, run: RunConfig) -> WorkflowOrchestrator:
    return WorkflowOrchestrator(run, **_logging_options(ctx))


def _emit(run: RunConfig, report: Any, columns: Optional[Sequence[str]] = None):
    """Print the report, or write it to --out and say where it went."""
    text = serialization.render(report, run.output_format, columns)
    if run.output is None:
        click.echo(text, nl=False)
    else:
        path = serialization.write_text(text, run.output)
        progress_echo(f"Report written to {path}")


@cli.command()
@click.argument("game_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("input_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--mode",
    type=click.Choice(VERIFY_MODES, case_sensitive=False),
    default="classical",
    help="classical CE, Nash on a product profile, or quantum CE (default: classical)",
)
@click.option(
    "--embedding",
    type=click.Choice(EMBEDDINGS, case_sensitive=False),
    default="mixture",
    help="Quantum state built from a distribution input (default: mixture)",
)
@run_options
@click.pass_context
@handle_cli_errors
def verify(ctx, game_file, input_file, mode, embedding, tol, seed, out, fmt, jobs):
    """
    Check whether a distribution, product profile or state is an equilibrium.

    INPUT_FILE holds a distribution ({shape, probabilities}), a state
    ({kind, dims, entries}) or, with --mode nash, a product profile
    ({factors}). Exits 0 when the verdict is true and 1 otherwise.

    Examples:

        qequil verify game.json dist.json
        qequil verify game.json state.json --mode quantum
        qequil verify game.json product.json --mode nash
    """
    run = _run_config(ctx, "verify", tol, seed, out, fmt, jobs, {"game": game_file, "input": input_file})
    verbose_echo(ctx, f"Verifying {input_file} against {game_file} ({mode})")
    report, verdict = _orchestrator(ctx, run).execute_verify(game_file, input_file, mode.lower(), embedding.lower())
    _emit(run, report)
    exit_for_verdict(verdict)


@cli.command()
@click.argument("game_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("dist_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--mode",
    type=click.Choice(["add", "mul", "additive", "multiplicative"], case_sensitive=False),
    default="add",
    help="Additive or multiplicative incentive (default: add)",
)
@run_options
@click.pass_context
@handle_cli_errors
def incentive(ctx, game_file, dist_file, mode, tol, seed, out, fmt, jobs):
    """
    Largest POVM incentive of player 1 on the superposition of a CE.

    The game is read as (A, J): player 1's matrix A is used and the
    distribution must be a correlated equilibrium. The report carries the
    optimal POVM, the dual matrix and the certified gap.

    Examples:

        qequil incentive game.json dist.json
        qequil incentive game.json dist.json --mode mul
    """
    run = _run_config(ctx, "incentive", tol, seed, out, fmt, jobs, {"game": game_file, "distribution": dist_file})
    report = _orchestrator(ctx, run).execute_incentive(game_file, dist_file, mode.lower())
    _emit(run, report)


def _parse_permutation(value: Optional[str]):
    if value is None:
        return None
    try:
        return [int(x) for x in value.split(",")]
    except ValueError:
        raise click.BadParameter("permutation must be comma-separated integers", param_hint="--permutation")


@cli.command()
@click.argument("family", type=click.Choice(FAMILIES, case_sensitive=False))
@click.option("--depth", "-d", type=click.IntRange(min=1), default=1, help="Tensor depth (epsilon, cyclic)")
@click.option("--epsilon", type=float, default=None, help="Rotation angle; solved from the depth when omitted")
@click.option("--size", "-n", type=click.IntRange(min=2), default=4, help="Strategies per player or cyclic base")
@click.option("--name", default="traffic_light", help="Canonical game name")
@click.option("--permutation", default=None, help="Fourier permutation, e.g. 1,0,3,2")
@run_options
@click.pass_context
@handle_cli_errors
def construct(ctx, family, depth, epsilon, size, name, permutation, tol, seed, out, fmt, jobs):
    """
    Build a game family and write its files with predicted values.

    With --out DIR the game, distribution, state and deviation files are
    written into DIR next to predictions.json; otherwise only the
    predictions are printed.

    Examples:

        qequil construct epsilon --depth 8 --out eps8/
        qequil construct cyclic --size 4 --depth 2
        qequil construct load_balancing --size 8 --out lb8/
        qequil construct fourier --size 4 --out fourier4/
    """
    run = _run_config(ctx, "construct", tol, seed, None, fmt, jobs)
    predictions = _orchestrator(ctx, run).execute_construct(
        family.lower(),
        out,
        depth=depth,
        epsilon=epsilon,
        size=size,
        name=name,
        permutation=_parse_permutation(permutation),
    )
    _emit(run, predictions)


@cli.command()
@click.argument("instances", nargs=-1, required=True)
@click.option("--restarts", type=click.IntRange(min=1), default=None, help="Factorization search restarts")
@run_options
@click.pass_context
@handle_cli_errors
def corr(ctx, instances, restarts, tol, seed, out, fmt, jobs):
    """
    Correlation complexity bounds, one row per instance.

    Instances: ed:N (Euclidean distance on 1..N), hjmr:n (n-bit agreement
    distribution), conj:n:r[:seed] (random zero-diagonal sample). Nonnegative
    rank is reported as a bound pair; notes mark conditional claims.

    Examples:

        qequil corr ed:3 ed:8
        qequil corr hjmr:4 conj:4:2 --format json --jobs 2
    """
    run = _run_config(ctx, "corr", tol, seed, out, fmt, jobs, default_format="csv")
    if restarts is not None:
        run.nn_restarts = restarts
    report = _orchestrator(ctx, run).execute_corr(list(instances))
    if run.output_format == "csv":
        _emit(run, report["rows"], SEPARATION_COLUMNS)
    else:
        _emit(run, report)


@cli.command()
@click.option("--size", "-n", type=click.IntRange(min=2, max=8), default=4, help="Load-balancing strategies")
@click.option(
    "--protocol",
    type=click.Choice(UNTRUSTED_PROTOCOL_KINDS, case_sensitive=False),
    default="quantum",
    help="Generation protocol to test (default: quantum)",
)
@run_options
@click.pass_context
@handle_cli_errors
def untrusted(ctx, size, protocol, tol, seed, out, fmt, jobs):
    """
    Check a load-balancing protocol when players may replace their local operations.

    Exits 0 when no player gains more than --tol by deviating, 1 otherwise.

    Examples:

        qequil untrusted --size 4
        qequil untrusted --protocol broken
    """
    run = _run_config(ctx, "untrusted", tol, seed, out, fmt, jobs)
    report, verdict = _orchestrator(ctx, run).execute_untrusted(size, protocol.lower())
    _emit(run, report)
    exit_for_verdict(verdict)


@cli.command()
@click.option("--samples", type=click.IntRange(min=1), default=reproduction.DEFAULT_SAMPLES, help="Random CE and non-CE instances")
@click.option(
    "--factorizations",
    type=click.IntRange(min=1),
    default=reproduction.DEFAULT_FACTORIZATIONS,
    help="Random certified factorizations",
)
@click.option("--only", default=None, help="Comma-separated check numbers to run")
@run_options
@click.pass_context
@handle_cli_errors
def reproduce(ctx, samples, factorizations, only, tol, seed, out, fmt, jobs):
    """
    Run the acceptance suite and print a pass/fail table.

    With --out the per-check results are also written as JSON or CSV.
    Exits 1 when any check fails.

    Examples:

        qequil reproduce
        qequil reproduce --only 1,2,3 --out checks.csv --format csv
    """
    run = _run_config(ctx, "reproduce", tol, seed, out, fmt, jobs)
    options = _logging_options(ctx)
    WorkflowLogger(options["verbose"], options["log_file"], options["log_level"])
    selected = None
    if only:
        try:
            selected = [int(x) for x in only.split(",")]
        except ValueError:
            raise click.BadParameter("expected comma-separated check numbers", param_hint="--only")
    report = reproduction.run_all(run.seed, samples, factorizations, selected, run.jobs)
    Console().print(reproduction.report_table(report))
    if run.output is not None:
        data = reproduction.report_rows(report) if run.output_format == "csv" else report
        path = serialization.write_report(data, run.output, run.output_format)
        progress_echo(f"Report written to {path}")
    exit_for_verdict(report.passed)


@cli.command()
@click.option("--force", "-f", is_flag=True, help="Overwrite existing configuration file")
@click.pass_context
@handle_cli_errors
def setup(ctx: click.Context, force: bool):
    """
    Create the default configuration file.

    Examples:

        qequil setup
        qequil setup --force  # Overwrite existing config
    """
    config_manager = ctx.obj["config_manager"]
    if config_manager.config_exists() and not force:
        click.echo("Configuration file already exists.")
        click.echo(f"Location: {config_manager.config_path}")
        click.echo("\nTo overwrite the existing configuration, use:")
        click.echo("  qequil setup --force")
        return

    progress_echo("Creating default configuration file...")
    try:
        config_manager.create_default_config()
    except OSError as e:
        raise ConfigurationError(f"Failed to create configuration: {e}")
    verbose_echo(ctx, f"Configuration created at: {config_manager.config_path}")
    click.echo("\nConfiguration file created.")
    click.echo(f"Location: {config_manager.config_path}")
    click.echo("\nCheck it with:")
    click.echo("  qequil config-status")


@cli.command("config-status")
@click.pass_context
@handle_cli_errors
def config_status(ctx: click.Context):
    """
    Check configuration status, solvers and dependencies.

    Examples:

        qequil config-status
    """
    config_manager = ctx.obj["config_manager"]
    status = config_manager.get_config_status()

    click.echo("Configuration Status")
    click.echo("=" * 50)
    if status["config_exists"]:
        click.echo(f"[OK] Configuration file: {status['config_path']}")
        click.echo("[OK] Configuration is valid" if status["is_valid"] else "[!!] Configuration has issues")
        for error in status["validation_errors"]:
            click.echo(f"   - {error}")
    else:
        click.echo(f"[--] No configuration file at {status['config_path']}; defaults are used")
        click.echo("     Run 'qequil setup' to create one")

    click.echo("\nEnvironment Variables:")
    for var in ("QEQUIL_SOLVER", "QEQUIL_SEED", "QEQUIL_LOG_LEVEL", "QEQUIL_LOG_FILE"):
        value = os.getenv(var)
        click.echo(f"   {var}: {value if value else 'Not set'}")

    workflow = WorkflowOrchestrator(RunConfig(command="config-status"), verbose=ctx.obj["verbose"])
    workflow_status = workflow.get_workflow_status()
    click.echo("\nDependencies:")
    for dep, available in workflow_status["dependencies"].items():
        click.echo(f"   [{'OK' if available else '--'}] {dep}")
    solvers = workflow_status["solvers"]
    click.echo(f"\nInstalled solvers: {', '.join(solvers) if solvers else 'none'}")
    if not status["is_valid"] and status["config_exists"]:
        sys.exit(2)


# Helper functions for CLI utilities
def verbose_echo(ctx: click.Context, message: str):
    """Echo message only if verbose mode is enabled."""
    if ctx.obj and ctx.obj.get("verbose", False):
        click.echo(f"[DEBUG] {message}", err=True)


def progress_echo(message: str, nl: bool = True):
    """Echo progress message to stderr."""
    click.echo(f"[INFO] {message}", err=True, nl=nl)



if __name__ == "__main__":
    cli()

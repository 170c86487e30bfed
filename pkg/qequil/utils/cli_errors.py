"""
Standardized error handling for CLI commands.

This module provides a decorator that applies consistent error handling
across all CLI commands, ensuring uniform error messages and exit codes.
"""

import sys
from functools import wraps
from typing import Callable

import click

from ..constants import EXIT_INPUT_ERROR, EXIT_SOLVER_ERROR, EXIT_VERDICT_FALSE
from ..exceptions import (
    CapacityError,
    ConfigurationError,
    ConvergenceError,
    FileOperationError,
    NotEquilibriumError,
    ParseError,
    ProtocolMismatchError,
    QEquilError,
    SolverError,
    ValidationError,
)


def handle_cli_errors(func: Callable) -> Callable:
    """
    Decorator that provides standardized error handling for CLI commands.

    Exit codes:
    - 2 for input problems (validation, shapes, caps, parsing, files, configuration)
    - 3 for solver failures and certificates whose gap is above tolerance
    - 130 for KeyboardInterrupt
    - 1 for anything unexpected

    In verbose mode the exception is re-raised so the traceback is shown.

    Usage:
        @cli.command()
        @click.pass_context
        @handle_cli_errors
        def my_command(ctx: click.Context, ...):
            pass
    """

    @wraps(func)
    def wrapper(*args, **kwargs):
        ctx = None
        if args and isinstance(args[0], click.Context):
            ctx = args[0]

        try:
            return func(*args, **kwargs)

        except KeyboardInterrupt:
            click.echo("\nOperation cancelled by user.", err=True)
            sys.exit(130)

        except click.ClickException:
            raise

        except NotEquilibriumError as e:
            _error_echo("Input is not a correlated equilibrium", str(e))
            _show_troubleshooting([
                f"Player {e.player} gains {e.violation:.3e} by playing {e.deviation} when told {e.recommendation}",
                "Check the distribution with 'qequil verify --mode classical'",
            ])
            _exit_with_verbose(ctx, e, EXIT_INPUT_ERROR)

        except ProtocolMismatchError as e:
            _error_echo("Protocol does not reproduce its target", str(e))
            _exit_with_verbose(ctx, e, EXIT_INPUT_ERROR)

        except CapacityError as e:
            _error_echo("Instance too large", str(e))
            _show_troubleshooting([
                "Reduce the depth or size parameters",
                "Families beyond the joint cap are simulated factor by factor only",
            ])
            _exit_with_verbose(ctx, e, EXIT_INPUT_ERROR)

        except ParseError as e:
            _error_echo("Could not parse input", str(e))
            if e.details:
                click.echo(f"  {e.details}", err=True)
            _exit_with_verbose(ctx, e, EXIT_INPUT_ERROR)

        except FileOperationError as e:
            _error_echo("File operation failed", str(e))
            _show_troubleshooting([
                "Check file permissions",
                "Verify the file path exists",
            ])
            _exit_with_verbose(ctx, e, EXIT_INPUT_ERROR)

        except ConfigurationError as e:
            _error_echo("Configuration error", str(e))
            _show_troubleshooting([
                "Run 'qequil setup' to create a default configuration",
                "Check ~/.qequil/config.md for syntax errors",
            ])
            _exit_with_verbose(ctx, e, EXIT_INPUT_ERROR)

        except ValidationError as e:
            _error_echo("Invalid input", str(e))
            _exit_with_verbose(ctx, e, EXIT_INPUT_ERROR)

        except ConvergenceError as e:
            _error_echo("Solver did not certify the result", str(e))
            _show_troubleshooting([
                f"Certified gap {e.gap:.3e} is above tolerance",
                "Try 'qequil --solver SCS ...' or a looser gap tolerance in the configuration",
            ])
            _exit_with_verbose(ctx, e, EXIT_SOLVER_ERROR)

        except SolverError as e:
            _error_echo("Solver failed", str(e))
            _show_troubleshooting([
                "Check that cvxpy and the selected solver are installed",
                "Run 'qequil config-status' to see the configured solver",
            ])
            _exit_with_verbose(ctx, e, EXIT_SOLVER_ERROR)

        except QEquilError as e:
            _error_echo("Operation failed", str(e))
            _exit_with_verbose(ctx, e, 1)

        except Exception as e:
            _error_echo("An unexpected error occurred", str(e))
            _show_troubleshooting(["Try running with --verbose for more details"])
            _exit_with_verbose(ctx, e, 1)

    return wrapper


def exit_for_verdict(verdict: bool) -> None:
    """Exit 1 when a verdict is false; return normally otherwise."""
    if not verdict:
        sys.exit(EXIT_VERDICT_FALSE)


def _error_echo(title: str, message: str = None):
    click.echo(f"[ERROR] {title}", err=True)
    if message:
        click.echo(f"  {message}", err=True)


def _show_troubleshooting(tips: list):
    if tips:
        click.echo("\nTroubleshooting:", err=True)
        for tip in tips:
            click.echo(f"  • {tip}", err=True)


def _exit_with_verbose(ctx: click.Context, exception: Exception, exit_code: int):
    """Exit with proper code, showing traceback if verbose."""
    if ctx and ctx.obj and ctx.obj.get("verbose", False):
        click.echo("\n[DEBUG] Full traceback:", err=True)
        raise exception
    sys.exit(exit_code)

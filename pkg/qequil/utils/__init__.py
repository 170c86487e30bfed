"""
Utility modules for qequil.
"""

from .cli_errors import exit_for_verdict, handle_cli_errors
from .progress import ProgressContext, track

__all__ = ["ProgressContext", "track", "handle_cli_errors", "exit_for_verdict"]

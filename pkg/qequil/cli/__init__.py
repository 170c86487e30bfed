"""
Command-line interface for qequil.

This module provides the Click-based commands for equilibrium verification,
incentive certification, family construction and correlation complexity.
"""

from .main import cli

__all__ = ["cli"]

"""
qequil - equilibria of strategic games under quantum strategies.

This package checks classical and quantum correlated equilibria, certifies
the largest quantum incentive to deviate with semidefinite programs, builds
the explicit game families with growing quantum gains, and bounds the
classical and quantum communication cost of generating a correlation.
"""

__version__ = "0.1.0"
__author__ = "qequil developers"
__description__ = "Quantum correlated equilibria and correlation complexity toolkit"

# Export commonly used constants
from .constants import DEFAULT_SOLVER, DEFAULT_TOLERANCE, SUPPORTED_SOLVERS

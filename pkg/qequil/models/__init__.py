"""
Data models for qequil.

This module contains the dataclasses used throughout the package for games,
distributions, quantum states, incentive certificates, game families and
correlation complexity results, plus the pydantic schemas of the JSON files.
"""

from .linalg import PsdVerdict, SchmidtForm
from .game import DeviationReport, EquilibriumVerdict, Game, JointDistribution
from .quantum import DensityState, LocalChannel, PureState
from .incentive import IncentiveMode, IncentiveResult, Povm, QceVerdict
from .correlation import ClassicalProtocol, CorrelationMatrix, NonnegFactorization, QuantumProtocol
from .run import RunConfig

__all__ = [
    "PsdVerdict",
    "SchmidtForm",
    "Game",
    "JointDistribution",
    "DeviationReport",
    "EquilibriumVerdict",
    "DensityState",
    "PureState",
    "LocalChannel",
    "IncentiveMode",
    "IncentiveResult",
    "Povm",
    "QceVerdict",
    "CorrelationMatrix",
    "NonnegFactorization",
    "QuantumProtocol",
    "ClassicalProtocol",
    "RunConfig",
]

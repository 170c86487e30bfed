"""
Configuration data models.
"""

import os
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional

from ..constants import (
    DEFAULT_CE_PRECHECK_TOLERANCE,
    DEFAULT_CHANNEL_GAP_TOLERANCE,
    DEFAULT_EIGEN_METHOD,
    DEFAULT_LOG_LEVEL,
    DEFAULT_NN_RESTARTS,
    DEFAULT_OUTPUT_FORMAT,
    DEFAULT_POVM_GAP_TOLERANCE,
    DEFAULT_SEED,
    DEFAULT_SOLVER,
    DEFAULT_TOLERANCE,
    EIGEN_METHODS,
    MAX_LOCAL_DIMENSION,
    OUTPUT_FORMATS,
    SUPPORTED_SOLVERS,
)
from ..exceptions import ConfigurationError

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


@dataclass
class Config:
    """Run settings shared by every command; CLI flags override them."""

    # Verdict tolerances
    tolerance: float = DEFAULT_TOLERANCE
    ce_precheck_tolerance: float = DEFAULT_CE_PRECHECK_TOLERANCE
    povm_gap_tolerance: float = DEFAULT_POVM_GAP_TOLERANCE
    channel_gap_tolerance: float = DEFAULT_CHANNEL_GAP_TOLERANCE

    # Numerics
    seed: int = DEFAULT_SEED
    solver: str = DEFAULT_SOLVER
    eigen_method: str = DEFAULT_EIGEN_METHOD
    max_local_dimension: int = MAX_LOCAL_DIMENSION
    nn_restarts: int = DEFAULT_NN_RESTARTS

    # Logging and output
    log_level: str = DEFAULT_LOG_LEVEL
    log_file: Optional[str] = None
    verbose: bool = False
    output_format: str = DEFAULT_OUTPUT_FORMAT

    def __post_init__(self):
        """Normalize values and apply environment overrides."""
        if os.getenv("QEQUIL_SOLVER"):
            self.solver = os.getenv("QEQUIL_SOLVER")
        if os.getenv("QEQUIL_LOG_LEVEL"):
            self.log_level = os.getenv("QEQUIL_LOG_LEVEL")
        if os.getenv("QEQUIL_LOG_FILE"):
            self.log_file = os.getenv("QEQUIL_LOG_FILE")
        if os.getenv("QEQUIL_SEED"):
            try:
                self.seed = int(os.getenv("QEQUIL_SEED"))
            except ValueError:
                raise ConfigurationError(f"QEQUIL_SEED must be an integer, got {os.getenv('QEQUIL_SEED')!r}")

        self.solver = str(self.solver).upper()
        self.log_level = str(self.log_level).upper()
        self.eigen_method = str(self.eigen_method).lower()
        self.output_format = str(self.output_format).lower()
        if self.log_file:
            self.log_file = os.path.expanduser(self.log_file)

    def validate(self) -> List[str]:
        """Return a list of problems; empty when the configuration is usable."""
        problems = []
        for name in ("tolerance", "ce_precheck_tolerance", "povm_gap_tolerance", "channel_gap_tolerance"):
            if not getattr(self, name) > 0:
                problems.append(f"{name} must be positive")
        if self.solver not in SUPPORTED_SOLVERS:
            problems.append(f"solver must be one of {', '.join(SUPPORTED_SOLVERS)}")
        if self.eigen_method not in EIGEN_METHODS:
            problems.append(f"eigen_method must be one of {', '.join(EIGEN_METHODS)}")
        if self.log_level not in LOG_LEVELS:
            problems.append(f"log_level must be one of {', '.join(LOG_LEVELS)}")
        if self.output_format not in OUTPUT_FORMATS:
            problems.append(f"output_format must be one of {', '.join(OUTPUT_FORMATS)}")
        if self.seed < 0:
            problems.append("seed must be nonnegative")
        if not 1 <= self.max_local_dimension <= MAX_LOCAL_DIMENSION:
            problems.append(f"max_local_dimension must lie in [1, {MAX_LOCAL_DIMENSION}]")
        if self.nn_restarts < 1:
            problems.append("nn_restarts must be at least 1")
        return problems

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

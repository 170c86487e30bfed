"""
Per-invocation run settings.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from ..constants import (
    DEFAULT_CE_PRECHECK_TOLERANCE,
    DEFAULT_CHANNEL_GAP_TOLERANCE,
    DEFAULT_NN_RESTARTS,
    DEFAULT_OUTPUT_FORMAT,
    DEFAULT_POVM_GAP_TOLERANCE,
    DEFAULT_SEED,
    DEFAULT_TOLERANCE,
    MAX_LOCAL_DIMENSION,
    OUTPUT_FORMATS,
)
from ..exceptions import ValidationError


@dataclass
class RunConfig:
    """Resolved settings of one command: configuration file values with CLI flags applied."""

    command: str
    inputs: Dict[str, Path] = field(default_factory=dict)
    output: Optional[Path] = None
    tolerance: float = DEFAULT_TOLERANCE
    ce_precheck_tolerance: float = DEFAULT_CE_PRECHECK_TOLERANCE
    povm_gap_tolerance: float = DEFAULT_POVM_GAP_TOLERANCE
    channel_gap_tolerance: float = DEFAULT_CHANNEL_GAP_TOLERANCE
    seed: int = DEFAULT_SEED
    output_format: str = DEFAULT_OUTPUT_FORMAT
    jobs: int = 1
    solver: Optional[str] = None
    nn_restarts: int = DEFAULT_NN_RESTARTS
    max_local_dimension: int = MAX_LOCAL_DIMENSION

    def __post_init__(self):
        """Validate run settings."""
        for name in ("tolerance", "ce_precheck_tolerance", "povm_gap_tolerance", "channel_gap_tolerance"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.seed < 0:
            raise ValidationError("Seed must be nonnegative")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValidationError(f"Unknown output format {self.output_format!r}")
        if self.jobs < 1:
            raise ValidationError("--jobs must be at least 1")
        if self.output is not None:
            self.output = Path(self.output).expanduser()


@dataclass
class CheckResult:
    """Outcome of one acceptance check with the measured quantities behind it."""

    number: int
    name: str
    passed: bool
    detail: str
    metrics: Dict[str, object] = field(default_factory=dict)


@dataclass
class ReproductionReport:
    checks: List[CheckResult] = field(default_factory=list)
    seed: int = DEFAULT_SEED

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

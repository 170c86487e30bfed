"""
Deviation, certificate and incentive result models.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple, Union

import numpy as np

from ..constants import DUAL_FEASIBILITY_TOLERANCE, PSD_TOLERANCE
from ..exceptions import ShapeMismatchError, ValidationError
from ..services import matkit
from .quantum import LocalChannel


class IncentiveMode(str, Enum):
    """How a deviation's payoff is compared with the honest payoff."""

    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"

    @classmethod
    def parse(cls, value: Union[str, "IncentiveMode"]) -> "IncentiveMode":
        if isinstance(value, cls):
            return value
        aliases = {"add": cls.ADDITIVE, "mul": cls.MULTIPLICATIVE}
        key = str(value).lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ValidationError(f"Unknown incentive mode: {value}")


@dataclass
class Povm:
    """POVM with one element per strategy of the measuring player."""

    elements: Tuple[np.ndarray, ...]

    def __post_init__(self):
        """Validate POVM elements."""
        elements = tuple(np.atleast_2d(np.asarray(e)) for e in self.elements)
        if not elements:
            raise ValidationError("POVM needs at least one element")
        dim = elements[0].shape[0]
        if any(e.shape != (dim, dim) for e in elements):
            raise ShapeMismatchError("POVM elements must be square and of equal size")
        self.elements = elements
        completeness = float(np.max(np.abs(sum(elements) - np.eye(dim))))
        if completeness > PSD_TOLERANCE:
            raise ValidationError(f"POVM elements do not sum to identity (deviation {completeness:.3e})")
        for index, element in enumerate(elements):
            verdict = matkit.psd_check(element, PSD_TOLERANCE)
            if not verdict:
                raise ValidationError(
                    f"POVM element {index} is not PSD (minimum eigenvalue {verdict.min_eigenvalue:.3e})"
                )

    @classmethod
    def from_vectors(cls, vectors: np.ndarray) -> "Povm":
        """Rank-one POVM E_i = |v_i><v_i| from the rows of vectors."""
        return cls(tuple(np.outer(v, v.conj()) for v in np.asarray(vectors)))

    @property
    def dimension(self) -> int:
        return int(self.elements[0].shape[0])

    def tensor(self, other: "Povm") -> "Povm":
        """Product POVM, outcome index a * len(other) + b."""
        return Povm(tuple(np.kron(e, f) for e in self.elements for f in other.elements))

    def __len__(self) -> int:
        return len(self.elements)


@dataclass
class DualCertificate:
    """Dual point Y with its bound and the residuals lambda_min(Y - M_i)."""

    matrix: np.ndarray
    bound_value: float
    feasibility_residuals: Tuple[float, ...]
    mode: IncentiveMode = IncentiveMode.ADDITIVE
    baseline: float = 0.0

    @property
    def feasible(self) -> bool:
        return min(self.feasibility_residuals) >= -DUAL_FEASIBILITY_TOLERANCE


@dataclass
class IncentiveResult:
    """Optimal deviation of one player with primal and dual values.

    For the additive mode values are payoff differences, for the
    multiplicative mode payoff ratios.
    """

    mode: IncentiveMode
    primal_value: float
    primal_solution: Union[Povm, LocalChannel]
    dual_bound: float
    baseline: float
    new_payoff: float
    player: int = 0
    certificate: Optional[DualCertificate] = None

    def __post_init__(self):
        """Validate weak duality."""
        if self.gap < -DUAL_FEASIBILITY_TOLERANCE:
            raise ValueError(f"Dual bound {self.dual_bound} is below primal value {self.primal_value}")

    @property
    def gap(self) -> float:
        return self.dual_bound - self.primal_value


@dataclass
class QceVerdict:
    """Verdict of a quantum equilibrium check with one result per player."""

    is_equilibrium: bool
    results: List[IncentiveResult] = field(default_factory=list)
    tolerance: float = 0.0

    @property
    def max_incentive(self) -> float:
        return max((r.dual_bound for r in self.results), default=0.0)

    def __bool__(self) -> bool:
        return self.is_equilibrium


@dataclass(frozen=True)
class ClosedFormSolution:
    """Exact optimum of the 2x2 identity game: value, CE matrix, POVM and dual point."""

    mode: IncentiveMode
    value: float
    correlation: np.ndarray
    povm: Povm
    dual: np.ndarray


@dataclass(frozen=True)
class NonConcavityWitness:
    """Two optimal (P, E) pairs whose average has a negative objective."""

    first: ClosedFormSolution
    mirrored_correlation: np.ndarray
    mirrored_povm: Povm
    averaged_objective: float
    averaged_correlation: np.ndarray
    averaged_certificate: DualCertificate

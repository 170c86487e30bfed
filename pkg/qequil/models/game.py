"""
Classical game data models.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..constants import MAX_JOINT_STRATEGIES, PROBABILITY_SUM_TOLERANCE
from ..exceptions import CapacityError, ShapeMismatchError, ValidationError


def _check_joint_size(shape: Sequence[int]) -> None:
    size = int(np.prod(shape)) if len(shape) else 1
    if size > MAX_JOINT_STRATEGIES:
        raise CapacityError(f"Joint strategy space of size {size} exceeds cap {MAX_JOINT_STRATEGIES}")


@dataclass
class Game:
    """A k-player strategic game with dense utility tensors.

    utilities has shape (k, |S_1|, ..., |S_k|); utilities[i][s] is u_i(s).
    """

    utilities: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        """Validate game data."""
        self.utilities = np.asarray(self.utilities, dtype=np.float64)
        if self.utilities.ndim < 2:
            raise ValidationError("Game needs at least one player with a strategy axis")
        if self.utilities.shape[0] != self.utilities.ndim - 1:
            raise ShapeMismatchError(
                f"Utility tensor shape {self.utilities.shape} does not match "
                f"{self.utilities.shape[0]} players"
            )
        if any(n < 1 for n in self.utilities.shape[1:]):
            raise ValidationError("Every player needs at least one strategy")
        _check_joint_size(self.utilities.shape[1:])
        if not np.all(np.isfinite(self.utilities)):
            raise ValidationError("Utilities must be finite")
        if self.normalized and (self.utilities.min() < 0.0 or self.utilities.max() > 1.0):
            raise ValidationError("Normalized game utilities must lie in [0, 1]")

    @classmethod
    def from_payoffs(cls, payoffs: Sequence[np.ndarray], normalized: Optional[bool] = None) -> "Game":
        """Build from one utility tensor per player; normalized is detected when omitted."""
        utilities = np.stack([np.asarray(u, dtype=np.float64) for u in payoffs])
        if normalized is None:
            normalized = bool(utilities.min() >= 0.0 and utilities.max() <= 1.0)
        return cls(utilities=utilities, normalized=normalized)

    @classmethod
    def bimatrix(cls, a: np.ndarray, b: np.ndarray, normalized: Optional[bool] = None) -> "Game":
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if a.shape != b.shape or a.ndim != 2:
            raise ShapeMismatchError(f"Bimatrix payoffs must share a 2-d shape, got {a.shape} and {b.shape}")
        return cls.from_payoffs([a, b], normalized)

    @property
    def players(self) -> int:
        return int(self.utilities.shape[0])

    @property
    def strategy_counts(self) -> Tuple[int, ...]:
        return tuple(int(n) for n in self.utilities.shape[1:])

    @property
    def joint_size(self) -> int:
        return int(np.prod(self.strategy_counts))

    def payoff(self, player: int) -> np.ndarray:
        self.check_player(player)
        return self.utilities[player]

    def opponents_size(self, player: int) -> int:
        """|S_{-i}|, the number of joint strategies of the other players."""
        return self.joint_size // self.strategy_counts[player]

    def check_player(self, player: int) -> None:
        if not 0 <= player < self.players:
            raise ValidationError(f"Player index {player} out of range for {self.players} players")


@dataclass
class JointDistribution:
    """Probability tensor over the joint strategy space S = S_1 x ... x S_k."""

    probabilities: np.ndarray

    def __post_init__(self):
        """Validate distribution."""
        self.probabilities = np.asarray(self.probabilities, dtype=np.float64)
        if self.probabilities.ndim < 1:
            raise ValidationError("Distribution needs at least one axis")
        _check_joint_size(self.probabilities.shape)
        if not np.all(np.isfinite(self.probabilities)):
            raise ValidationError("Probabilities must be finite")
        if np.any(self.probabilities < 0.0):
            raise ValidationError("Probabilities must be nonnegative")
        total = float(self.probabilities.sum())
        if abs(total - 1.0) > PROBABILITY_SUM_TOLERANCE:
            raise ValidationError(f"Probabilities must sum to 1 (got {total!r})")

    @classmethod
    def from_weights(cls, weights: np.ndarray) -> "JointDistribution":
        """Normalize nonnegative weights into a distribution."""
        weights = np.asarray(weights, dtype=np.float64)
        if np.any(weights < 0.0):
            raise ValidationError("Weights must be nonnegative")
        total = weights.sum()
        if total <= 0.0:
            raise ValidationError("Weights must have positive total mass")
        return cls(weights / total)

    @classmethod
    def uniform(cls, shape: Sequence[int]) -> "JointDistribution":
        return cls(np.full(tuple(shape), 1.0 / np.prod(shape)))

    @classmethod
    def point_mass(cls, shape: Sequence[int], cell: Sequence[int]) -> "JointDistribution":
        probabilities = np.zeros(tuple(shape))
        probabilities[tuple(cell)] = 1.0
        return cls(probabilities)

    @classmethod
    def product(cls, factors: Sequence[np.ndarray]) -> "JointDistribution":
        """Product distribution p_1 x ... x p_k."""
        result = np.ones(())
        for factor in factors:
            result = np.multiply.outer(result, np.asarray(factor, dtype=np.float64))
        return cls(result)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(int(n) for n in self.probabilities.shape)

    @property
    def players(self) -> int:
        return self.probabilities.ndim

    @property
    def flat(self) -> np.ndarray:
        return self.probabilities.reshape(-1)

    def marginal(self, player: int) -> np.ndarray:
        axes = tuple(a for a in range(self.players) if a != player)
        return self.probabilities.sum(axis=axes)

    def conditional(self, player: int, strategy: int) -> np.ndarray:
        """p|_{s_i}: distribution of the other players given player's recommendation."""
        slab = np.take(self.probabilities, strategy, axis=player)
        mass = slab.sum()
        if mass <= 0.0:
            raise ValidationError(f"Conditional undefined: strategy {strategy} of player {player} has zero marginal")
        return slab / mass

    def as_matrix(self) -> np.ndarray:
        if self.players != 2:
            raise ShapeMismatchError("Matrix view needs a bivariate distribution")
        return self.probabilities


@dataclass
class DeviationReport:
    """Best deviation of one player against a joint distribution.

    best_deviation[s_i] is the strategy played when s_i is recommended.
    """

    player: int
    best_deviation: Tuple[int, ...]
    additive_gain: float
    multiplicative_gain: Optional[float]
    baseline: float
    worst_violation: float = 0.0
    worst_pair: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        """Validate report."""
        if self.additive_gain < -1e-12:
            raise ValueError("Additive gain of the best deviation cannot be negative")
        if self.multiplicative_gain is not None and self.baseline <= 0.0:
            raise ValueError("Multiplicative gain is defined only for a positive baseline")


@dataclass
class EquilibriumVerdict:
    """Verdict of a classical equilibrium check with one report per player."""

    is_equilibrium: bool
    reports: List[DeviationReport] = field(default_factory=list)
    tolerance: float = 0.0

    @property
    def max_violation(self) -> float:
        return max((r.worst_violation for r in self.reports), default=0.0)

    def __bool__(self) -> bool:
        return self.is_equilibrium

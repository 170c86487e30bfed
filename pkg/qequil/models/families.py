"""
Models for the explicit game families and canonical games.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np

from ..constants import MAX_JOINT_STRATEGIES
from .game import Game, JointDistribution
from .incentive import Povm
from .quantum import LocalChannel, PureState


@dataclass(frozen=True)
class EpsilonGameSpec:
    """Depth-d additive family with predicted utilities of player 1."""

    depth: int
    epsilon: float
    predicted_old: float
    predicted_new: float

    def __post_init__(self):
        """Validate spec."""
        if self.depth < 1:
            raise ValueError("Depth must be at least 1")
        for value in (self.predicted_old, self.predicted_new):
            if not 0.0 < value <= 1.0:
                raise ValueError(f"Predicted utility {value} outside (0, 1]")

    @classmethod
    def from_epsilon(cls, depth: int, epsilon: float) -> "EpsilonGameSpec":
        s2, c2 = math.sin(epsilon) ** 2, math.cos(epsilon) ** 2
        return cls(
            depth=depth,
            epsilon=epsilon,
            predicted_old=(s2 + c2 * c2) ** depth,
            predicted_new=(s2 * c2 + c2) ** depth,
        )

    @property
    def predicted_gain(self) -> float:
        return self.predicted_new - self.predicted_old


@dataclass(frozen=True)
class CyclicGameSpec:
    """Depth-d multiplicative family built on the c x c cyclic game."""

    base: int
    depth: int

    def __post_init__(self):
        """Validate spec."""
        if self.base < 3:
            raise ValueError("Cyclic base must be at least 3")
        if self.depth < 1:
            raise ValueError("Depth must be at least 1")

    @property
    def base_utility(self) -> float:
        return 1.0 / (self.base - 1)

    @property
    def predicted_old(self) -> float:
        return self.base_utility ** self.depth

    @property
    def predicted_new(self) -> float:
        c = self.base
        return (4.0 * (c - 1) / c ** 2) ** self.depth

    @property
    def predicted_ratio(self) -> float:
        c = self.base
        return (4.0 * (c - 1) ** 2 / c ** 2) ** self.depth

    @property
    def exponent(self) -> float:
        """e with predicted ratio = n^e for n = c^d strategies."""
        c = self.base
        return math.log(4.0 * (c - 1) ** 2 / c ** 2, c)


@dataclass
class TensorFamily:
    """A base game, CE and deviation of player 1, raised to the depth-th tensor power."""

    base_game: Game
    base_correlation: JointDistribution
    base_deviation: Union[LocalChannel, Povm]
    depth: int
    spec: Union[EpsilonGameSpec, CyclicGameSpec]

    @property
    def strategies(self) -> Tuple[int, ...]:
        return tuple(n ** self.depth for n in self.base_game.strategy_counts)

    @property
    def joint_size(self) -> int:
        return int(np.prod(self.strategies, dtype=object))

    @property
    def materializable(self) -> bool:
        return self.joint_size <= MAX_JOINT_STRATEGIES


@dataclass
class FamilySimulation:
    """Simulated utilities of player 1 before and after the family's deviation."""

    old: float
    new: float
    materialized: bool = False
    block_depth: Optional[int] = None  # factors materialized together

    @property
    def gain(self) -> float:
        return self.new - self.old

    @property
    def ratio(self) -> float:
        return self.new / self.old


@dataclass
class FourierInstance:
    """Nash equilibrium whose entangled implementation player 1 can exploit."""

    game: Game
    factors: Tuple[np.ndarray, np.ndarray]
    state: PureState
    deviation: LocalChannel
    permutation: Tuple[int, ...]

    @property
    def size(self) -> int:
        return self.game.strategy_counts[0]

    @property
    def predicted_incentive(self) -> float:
        return 1.0 - 1.0 / self.size


@dataclass
class CanonicalGame:
    """Named game with its bundled correlated equilibrium and Nash profiles."""

    name: str
    game: Game
    correlated: Optional[JointDistribution] = None
    nash_profiles: List[Tuple[np.ndarray, ...]] = field(default_factory=list)

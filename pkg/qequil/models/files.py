"""
File schemas for games, distributions, states and product profiles.

These pydantic models validate the JSON documents read and written by the
CLI; services.serialization converts them to and from domain objects.
"""

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Decimal probabilities read from disk are renormalized when their total is this close to 1.
FILE_SUM_TOLERANCE = 1e-9


class GameFile(BaseModel):
    """{players, strategyCounts, utilities, normalized}; utilities[i] is player i's nested tensor."""

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    players: int = Field(ge=1)
    strategy_counts: List[int] = Field(alias="strategyCounts")
    utilities: list
    normalized: bool = False

    @field_validator("strategy_counts")
    @classmethod
    def _positive_counts(cls, value: List[int]) -> List[int]:
        if any(n < 1 for n in value):
            raise ValueError("every strategy count must be at least 1")
        return value

    @model_validator(mode="after")
    def _players_match(self) -> "GameFile":
        if len(self.strategy_counts) != self.players:
            raise ValueError(f"{len(self.strategy_counts)} strategy counts for {self.players} players")
        if len(self.utilities) != self.players:
            raise ValueError(f"{len(self.utilities)} utility tensors for {self.players} players")
        return self


class DistributionFile(BaseModel):
    """Flat row-major probability array plus its shape."""

    model_config = ConfigDict(extra="forbid")

    shape: List[int]
    probabilities: List[float]

    @model_validator(mode="after")
    def _consistent(self) -> "DistributionFile":
        size = 1
        for n in self.shape:
            if n < 1:
                raise ValueError("every axis must have at least one entry")
            size *= n
        if len(self.probabilities) != size:
            raise ValueError(f"{len(self.probabilities)} probabilities for shape {self.shape}")
        if any(p < 0.0 for p in self.probabilities):
            raise ValueError("probabilities must be nonnegative")
        total = sum(self.probabilities)
        if abs(total - 1.0) > FILE_SUM_TOLERANCE:
            raise ValueError(f"probabilities must sum to 1 (got {total!r})")
        self.probabilities = [p / total for p in self.probabilities]
        return self


class StateFile(BaseModel):
    """dims plus flattened row-major complex entries as [re, im] pairs.

    A pure state lists prod(dims) amplitudes, a density state prod(dims)**2
    matrix entries.
    """

    model_config = ConfigDict(extra="forbid")

    kind: Literal["pure", "density"] = "density"
    dims: List[int]
    entries: List[List[float]]

    @field_validator("entries")
    @classmethod
    def _pairs(cls, value: List[List[float]]) -> List[List[float]]:
        if any(len(pair) != 2 for pair in value):
            raise ValueError("complex entries must be [re, im] pairs")
        return value

    @model_validator(mode="after")
    def _sized(self) -> "StateFile":
        size = 1
        for n in self.dims:
            if n < 1:
                raise ValueError("every local dimension must be at least 1")
            size *= n
        expected = size if self.kind == "pure" else size * size
        if len(self.entries) != expected:
            raise ValueError(f"{self.kind} state with dims {self.dims} needs {expected} entries")
        return self


class ProductFile(BaseModel):
    """One mixed strategy per player, for Nash checks."""

    model_config = ConfigDict(extra="forbid")

    factors: List[List[float]]
    label: Optional[str] = None

    @field_validator("factors")
    @classmethod
    def _stochastic(cls, value: List[List[float]]) -> List[List[float]]:
        if not value:
            raise ValueError("need at least one factor")
        normalized = []
        for factor in value:
            total = sum(factor)
            if any(p < 0.0 for p in factor) or abs(total - 1.0) > FILE_SUM_TOLERANCE:
                raise ValueError("each factor must be a probability vector")
            normalized.append([p / total for p in factor])
        return normalized

"""
Correlation complexity data models: correlation matrices, nonnegative
factorizations, generation protocols and experiment results.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..constants import (
    EXACT_FACTORIZATION_TOLERANCE,
    NORM_TOLERANCE,
    PROBABILITY_SUM_TOLERANCE,
    SUPPORT_THRESHOLD,
    TRACE_PRESERVING_TOLERANCE,
)
from ..exceptions import ShapeMismatchError, ValidationError
from .game import JointDistribution
from .incentive import IncentiveResult
from .quantum import DensityState, LocalChannel, PureState


def _seed_size(components: int) -> int:
    return int(math.ceil(math.log2(components))) if components > 1 else 0


@dataclass
class CorrelationMatrix:
    """Bivariate distribution P viewed as a matrix, with optional row and column labels."""

    probabilities: np.ndarray
    row_labels: Optional[Tuple[str, ...]] = None
    col_labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        """Validate correlation."""
        self.probabilities = np.asarray(self.probabilities, dtype=np.float64)
        if self.probabilities.ndim != 2:
            raise ShapeMismatchError(f"Correlation must be a matrix, got shape {self.probabilities.shape}")
        if not np.all(np.isfinite(self.probabilities)) or np.any(self.probabilities < 0.0):
            raise ValidationError("Correlation entries must be finite and nonnegative")
        total = float(self.probabilities.sum())
        if abs(total - 1.0) > PROBABILITY_SUM_TOLERANCE:
            raise ValidationError(f"Correlation entries must sum to 1 (got {total!r})")
        for labels, size in ((self.row_labels, self.shape[0]), (self.col_labels, self.shape[1])):
            if labels is not None and len(labels) != size:
                raise ShapeMismatchError(f"{len(labels)} labels for an axis of size {size}")

    @classmethod
    def from_weights(cls, weights: np.ndarray) -> "CorrelationMatrix":
        return cls(JointDistribution.from_weights(np.asarray(weights)).probabilities)

    @classmethod
    def coerce(cls, value) -> "CorrelationMatrix":
        if isinstance(value, cls):
            return value
        if isinstance(value, JointDistribution):
            return cls(value.as_matrix())
        return cls(np.asarray(value))

    @property
    def shape(self) -> Tuple[int, int]:
        return tuple(int(n) for n in self.probabilities.shape)

    def support(self) -> np.ndarray:
        return self.probabilities > SUPPORT_THRESHOLD

    def as_distribution(self) -> JointDistribution:
        return JointDistribution(self.probabilities)


@dataclass
class NonnegFactorization:
    """M ~ C D with C (m x r) and D (r x n) entrywise nonnegative.

    residual is max |M - C D| against the target the factorization was
    computed for; None means unknown.
    """

    left: np.ndarray
    right: np.ndarray
    residual: Optional[float] = None
    normal_form: bool = False

    def __post_init__(self):
        """Validate factorization."""
        self.left = np.atleast_2d(np.asarray(self.left, dtype=np.float64))
        self.right = np.atleast_2d(np.asarray(self.right, dtype=np.float64))
        if self.left.shape[1] != self.right.shape[0]:
            raise ShapeMismatchError(f"Inner dimensions differ: {self.left.shape} x {self.right.shape}")
        if np.any(self.left < 0.0) or np.any(self.right < 0.0):
            raise ValidationError("Factors must be entrywise nonnegative")
        if self.normal_form:
            sums = self.right.sum(axis=0)
            if np.max(np.abs(sums - 1.0), initial=0.0) > 1e-10:
                raise ValidationError("Normal-form factorization needs column-stochastic D")

    @property
    def inner_dimension(self) -> int:
        return int(self.left.shape[1])

    @property
    def certified(self) -> bool:
        return self.residual is not None and self.residual <= EXACT_FACTORIZATION_TOLERANCE

    def product(self) -> np.ndarray:
        return self.left @ self.right


@dataclass(frozen=True)
class NonnegRankBound:
    """Lower bound on the nonnegative rank; certificate names the bound that fired."""

    value: int
    certificate: str
    rank: int
    biclique_cover: Optional[int] = None


@dataclass
class QuantumProtocol:
    """Shared state sum_i sigma_i |i>|i> followed by isometries on each side.

    Columns of left are the left singular vectors, columns of right the
    conjugated right singular vectors.
    """

    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        """Validate protocol."""
        self.coefficients = np.asarray(self.coefficients, dtype=np.float64)
        self.left = np.asarray(self.left)
        self.right = np.asarray(self.right)
        r = self.coefficients.size
        if r == 0:
            raise ValidationError("Protocol needs at least one shared coefficient")
        if np.any(np.diff(self.coefficients) > NORM_TOLERANCE) or np.any(self.coefficients < 0.0):
            raise ValidationError("Shared coefficients must be nonnegative and nonincreasing")
        if abs(float(np.sum(self.coefficients ** 2)) - 1.0) > NORM_TOLERANCE:
            raise ValidationError("Shared coefficients must have unit norm")
        for name, iso in (("left", self.left), ("right", self.right)):
            if iso.ndim != 2 or iso.shape[1] != r:
                raise ShapeMismatchError(f"{name} isometry must have {r} columns, got shape {iso.shape}")
            error = float(np.max(np.abs(iso.conj().T @ iso - np.eye(r))))
            if error > TRACE_PRESERVING_TOLERANCE:
                raise ValidationError(f"{name} map is not an isometry (deviation {error:.3e})")

    @property
    def seed_dimension(self) -> int:
        return int(self.coefficients.size)

    @property
    def seed_qubits(self) -> int:
        return _seed_size(self.seed_dimension)

    @property
    def output_shape(self) -> Tuple[int, int]:
        return int(self.left.shape[0]), int(self.right.shape[0])

    def seed_state(self) -> PureState:
        r = self.seed_dimension
        return PureState((r, r), np.diag(self.coefficients).reshape(-1))

    def channels(self) -> Tuple[LocalChannel, LocalChannel]:
        return LocalChannel(0, (self.left,)), LocalChannel(1, (self.right,))


@dataclass
class ClassicalProtocol:
    """Shared seed k ~ q, then player 1 samples x ~ a_k and player 2 samples y ~ b_k."""

    seed: np.ndarray
    row_samplers: np.ndarray
    col_samplers: np.ndarray

    def __post_init__(self):
        """Validate protocol."""
        self.seed = JointDistribution(np.asarray(self.seed, dtype=np.float64)).probabilities
        self.row_samplers = np.atleast_2d(np.asarray(self.row_samplers, dtype=np.float64))
        self.col_samplers = np.atleast_2d(np.asarray(self.col_samplers, dtype=np.float64))
        r = self.seed.size
        for name, samplers in (("row", self.row_samplers), ("column", self.col_samplers)):
            if samplers.shape[0] != r:
                raise ShapeMismatchError(f"Need {r} {name} samplers, got {samplers.shape[0]}")
            for k in range(r):
                JointDistribution(samplers[k])

    @property
    def seed_dimension(self) -> int:
        return int(self.seed.size)

    @property
    def seed_bits(self) -> int:
        return _seed_size(self.seed_dimension)

    @property
    def output_shape(self) -> Tuple[int, int]:
        return int(self.row_samplers.shape[1]), int(self.col_samplers.shape[1])

    def distribution(self) -> np.ndarray:
        """Exact output distribution by enumeration of seed and local outcomes."""
        return np.einsum("k,kx,ky->xy", self.seed, self.row_samplers, self.col_samplers)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Draw count (x, y) pairs by running the protocol."""
        seeds = rng.choice(self.seed_dimension, size=count, p=self.seed)
        xs = np.array([rng.choice(self.output_shape[0], p=self.row_samplers[k]) for k in seeds], dtype=int)
        ys = np.array([rng.choice(self.output_shape[1], p=self.col_samplers[k]) for k in seeds], dtype=int)
        return np.stack([xs, ys], axis=1)

    def seed_state(self) -> DensityState:
        """Perfectly correlated classical seed sum_k q_k |k><k| (x) |k><k|."""
        r = self.seed_dimension
        diagonal = np.zeros((r, r))
        diagonal[np.arange(r), np.arange(r)] = self.seed
        return DensityState((r, r), np.diag(diagonal.reshape(-1)).astype(np.complex128))

    def channels(self) -> Tuple[LocalChannel, LocalChannel]:
        """Sampler channels with Kraus operators sqrt(a_k(x)) |x><k|."""
        result = []
        for player, samplers in enumerate((self.row_samplers, self.col_samplers)):
            r, outputs = samplers.shape
            ops = []
            for k in range(r):
                for x in np.flatnonzero(samplers[k] > 0.0):
                    op = np.zeros((outputs, r))
                    op[x, k] = math.sqrt(samplers[k, x])
                    ops.append(op)
            result.append(LocalChannel(player, tuple(ops)))
        return result[0], result[1]


@dataclass
class EuclideanInstance:
    """Q(x, y) = c_x - c_y and P = Q o Q / |Q o Q|_1, with the cited lower bound attached."""

    points: Tuple[float, ...]
    amplitudes: np.ndarray
    correlation: CorrelationMatrix
    cited_lower_bound: float
    citation: str = "Beasley-Laffey: rank+(P) >= log2 N (cited, not computed)"


@dataclass
class HjmrInstance:
    """p(x, y) = |{i: x_i = y_i}|/n * 2^(1-2n) and its (n+1) x (n+1) distinguished submatrix."""

    bits: int
    correlation: CorrelationMatrix
    indices: Tuple[int, ...]
    submatrix: np.ndarray


@dataclass
class ConjectureSample:
    """Random Q = AB with zero diagonal and unit column sums, with diagnostics."""

    amplitudes: np.ndarray
    rows: np.ndarray
    columns: np.ndarray
    rank: int
    lower_bound: NonnegRankBound
    diagonal_residual: float
    column_sum_residual: float
    resamples: int = 0
    method: str = "least-norm b_j, a_i uniform on the unit sphere"


@dataclass
class UntrustedVerdict:
    """Whether a seed-and-local-operations protocol is an equilibrium when players may deviate."""

    is_equilibrium: bool
    honest_distribution: np.ndarray
    results: List[IncentiveResult] = field(default_factory=list)
    seed_size: int = 0
    seed_kind: str = "quantum"
    tolerance: float = 0.0
    bounds: Dict[str, float] = field(default_factory=dict)

    @property
    def max_incentive(self) -> float:
        return max((r.dual_bound for r in self.results), default=0.0)

    def __bool__(self) -> bool:
        return self.is_equilibrium

"""
Quantum strategy data models: density states, pure states and local channels.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..constants import (
    HERMITIAN_TOLERANCE,
    MAX_DENSITY_DIMENSION,
    MAX_JOINT_STRATEGIES,
    NORM_TOLERANCE,
    PSD_TOLERANCE,
    TRACE_PRESERVING_TOLERANCE,
    TRACE_TOLERANCE,
)
from ..exceptions import CapacityError, ShapeMismatchError, ValidationError
from ..services import matkit


def _check_dims(dims: Sequence[int], size: int, what: str) -> Tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ValidationError(f"{what} dims must be positive, got {dims}")
    if int(np.prod(dims)) != size:
        raise ShapeMismatchError(f"{what} of size {size} does not match dims {dims}")
    return dims


@dataclass
class DensityState:
    """Density matrix over the tensor product of the players' strategy spaces.

    Eigenvalues in [-PSD_TOLERANCE, 0) are tolerated; use clipped() where exact
    positivity matters.
    """

    dims: Tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        """Validate density matrix."""
        self.matrix = np.asarray(self.matrix, dtype=np.complex128)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise ShapeMismatchError(f"Density matrix must be square, got {self.matrix.shape}")
        if self.matrix.shape[0] > MAX_DENSITY_DIMENSION:
            raise CapacityError(
                f"Density matrix of dimension {self.matrix.shape[0]} exceeds cap {MAX_DENSITY_DIMENSION}"
            )
        self.dims = _check_dims(self.dims, self.matrix.shape[0], "Density matrix")
        if not matkit.is_hermitian(self.matrix, HERMITIAN_TOLERANCE):
            raise ValidationError("Density matrix must be Hermitian")
        self.matrix = matkit.hermitian_part(self.matrix)
        trace = complex(np.trace(self.matrix))
        if abs(trace - 1.0) > TRACE_TOLERANCE:
            raise ValidationError(f"Density matrix must have unit trace (got {trace.real!r})")
        lowest = self._lowest_eigenvalue()
        if lowest < -PSD_TOLERANCE:
            raise ValidationError(f"Density matrix is not PSD (minimum eigenvalue {lowest:.3e})")

    def _lowest_eigenvalue(self) -> float:
        off_diagonal = self.matrix - np.diag(np.diag(self.matrix))
        if not np.any(off_diagonal):
            return float(np.min(self.matrix.diagonal().real))
        return matkit.min_eigenvalue(self.matrix)

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def players(self) -> int:
        return len(self.dims)

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()

    def clipped(self) -> np.ndarray:
        """Matrix with negative eigenvalues removed and trace restored."""
        fixed = matkit.clip_psd(self.matrix)
        return fixed / np.trace(fixed).real

    def reduced(self, keep: Sequence[int]) -> np.ndarray:
        return matkit.partial_trace(self.matrix, self.dims, keep)


@dataclass
class PureState:
    """Unit vector over the joint strategy space, amplitudes in row-major order."""

    dims: Tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        """Validate pure state."""
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if self.amplitudes.size > MAX_JOINT_STRATEGIES:
            raise CapacityError(f"State of dimension {self.amplitudes.size} exceeds cap {MAX_JOINT_STRATEGIES}")
        self.dims = _check_dims(self.dims, self.amplitudes.size, "State vector")
        norm = float(np.linalg.norm(self.amplitudes))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise ValidationError(f"State vector must have unit norm (got {norm!r})")

    @property
    def dimension(self) -> int:
        return int(self.amplitudes.size)

    @property
    def players(self) -> int:
        return len(self.dims)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)

    def density(self) -> DensityState:
        return DensityState(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass
class LocalChannel:
    """CPTP map on one player's register, stored as Kraus operators.

    Each Kraus operator is output_dim x input_dim.
    """

    player: int
    kraus_ops: Tuple[np.ndarray, ...]

    def __post_init__(self):
        """Validate Kraus operators."""
        if self.player < 0:
            raise ValidationError("Player index must be nonnegative")
        ops = tuple(np.atleast_2d(np.asarray(k, dtype=np.complex128)) for k in self.kraus_ops)
        if not ops:
            raise ValidationError("Channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise ShapeMismatchError("All Kraus operators must share one shape")
        self.kraus_ops = ops
        total = sum(k.conj().T @ k for k in ops)
        error = float(np.max(np.abs(total - np.eye(shape[1]))))
        if error > TRACE_PRESERVING_TOLERANCE:
            raise ValidationError(f"Kraus operators are not trace preserving (deviation {error:.3e})")

    @classmethod
    def identity(cls, player: int, dim: int) -> "LocalChannel":
        return cls(player, (np.eye(dim),))

    @classmethod
    def from_unitary(cls, player: int, unitary: np.ndarray) -> "LocalChannel":
        return cls(player, (np.asarray(unitary),))

    @classmethod
    def from_choi(cls, player: int, choi: np.ndarray, input_dim: int, output_dim: int) -> "LocalChannel":
        """Kraus form of a Choi matrix indexed (input, output).

        K_k[x, a] = sqrt(lambda_k) v_k[(a, x)] for each eigenpair of the Choi matrix.
        """
        choi = np.asarray(choi)
        if choi.shape != (input_dim * output_dim, input_dim * output_dim):
            raise ShapeMismatchError(f"Choi matrix shape {choi.shape} does not match {input_dim}x{output_dim}")
        values, vectors = matkit.eigh(choi)
        cutoff = max(float(values[-1]), 0.0) * 1e-12
        ops = [
            np.sqrt(value) * vectors[:, k].reshape(input_dim, output_dim).T
            for k, value in enumerate(values)
            if value > cutoff
        ]
        return cls(player, tuple(ops))

    @property
    def input_dim(self) -> int:
        return int(self.kraus_ops[0].shape[1])

    @property
    def output_dim(self) -> int:
        return int(self.kraus_ops[0].shape[0])

    @property
    def is_isometry(self) -> bool:
        return len(self.kraus_ops) == 1

    def choi(self) -> np.ndarray:
        """Choi matrix J[(a, x), (b, y)] = sum_k K_k[x, a] conj(K_k[y, b])."""
        vectors = np.stack([k.T.reshape(-1) for k in self.kraus_ops], axis=1)
        return vectors @ vectors.conj().T

    def tensor(self, other: "LocalChannel") -> "LocalChannel":
        """Channel on the combined register, index a * other.input_dim + b."""
        if other.player != self.player:
            raise ValidationError("Tensor channels must act on the same player")
        return LocalChannel(
            self.player,
            tuple(np.kron(k, l) for k in self.kraus_ops for l in other.kraus_ops),
        )

"""
Linear-algebra result types.
"""

from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt

from ..constants import NORM_TOLERANCE

Matrix = npt.NDArray[Any]


@dataclass(frozen=True)
class PsdVerdict:
    """Outcome of a positive-semidefiniteness test."""

    is_psd: bool
    min_eigenvalue: float

    def __bool__(self) -> bool:
        return self.is_psd


@dataclass(frozen=True)
class SchmidtForm:
    """Schmidt decomposition v = sum_i coefficients[i] * left[:, i] (x) right[:, i]."""

    coefficients: npt.NDArray[np.float64]
    left_basis: Matrix
    right_basis: Matrix

    def __post_init__(self):
        """Validate the decomposition."""
        if self.coefficients.ndim != 1:
            raise ValueError("Schmidt coefficients must be a vector")
        if np.any(self.coefficients < 0):
            raise ValueError("Schmidt coefficients must be nonnegative")
        if np.any(np.diff(self.coefficients) > NORM_TOLERANCE):
            raise ValueError("Schmidt coefficients must be nonincreasing")
        if self.left_basis.shape[1] != self.coefficients.size:
            raise ValueError("Left basis size does not match coefficient count")
        if self.right_basis.shape[1] != self.coefficients.size:
            raise ValueError("Right basis size does not match coefficient count")

    @property
    def rank(self) -> int:
        """Number of nonzero Schmidt coefficients."""
        return int(self.coefficients.size)

    def vector(self) -> Matrix:
        """Rebuild the bipartite vector."""
        return np.einsum("k,ak,bk->ab", self.coefficients, self.left_basis, self.right_basis).reshape(-1)

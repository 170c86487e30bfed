"""
Dense linear-algebra kernel for desk-scale matrices.

Eigendecomposition uses cyclic Jacobi rotations on Hermitian matrices and the
SVD uses one-sided (Hestenes) Jacobi, so small singular values keep their
relative accuracy and rank decisions are stable. The "auto" method hands
matrices above JACOBI_AUTO_MAX_DIMENSION to LAPACK through numpy.
"""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from ..constants import (
    DEFAULT_EIGEN_METHOD,
    EIGEN_METHODS,
    HERMITIAN_INPUT_TOLERANCE,
    JACOBI_AUTO_MAX_DIMENSION,
    JACOBI_MAX_SWEEPS,
    MAX_KRON_DIMENSION,
    NORM_TOLERANCE,
    RANK_RELATIVE_TOLERANCE,
)
from ..exceptions import CapacityError, ShapeMismatchError, ValidationError
from ..models.linalg import Matrix, PsdVerdict, SchmidtForm

logger = logging.getLogger(__name__)

_EPS = np.finfo(np.float64).eps

_eigen_method = DEFAULT_EIGEN_METHOD


def set_eigen_method(method: str) -> None:
    """Process-wide method used when a call passes none."""
    global _eigen_method
    method = str(method).lower()
    if method not in EIGEN_METHODS:
        raise ValidationError(f"Unknown eigen method: {method}")
    _eigen_method = method


def get_eigen_method() -> str:
    return _eigen_method


def _use_jacobi(dim: int, method: Optional[str]) -> bool:
    method = method or _eigen_method
    if method not in EIGEN_METHODS:
        raise ValidationError(f"Unknown eigen method: {method}")
    if method == "auto":
        return dim <= JACOBI_AUTO_MAX_DIMENSION
    return method == "jacobi"


def _rotation(alpha: float, beta: float, gamma: complex) -> np.ndarray:
    """Unitary 2x2 G with G* [[alpha, gamma], [conj(gamma), beta]] G diagonal."""
    modulus = abs(gamma)
    phase = gamma / modulus
    theta = 0.5 * math.atan2(2.0 * modulus, beta - alpha)
    c, s = math.cos(theta), math.sin(theta)
    conj_phase = np.conj(phase)
    return np.array([[c, s], [-s * conj_phase, c * conj_phase]])


def is_hermitian(m: Matrix, tol: float = HERMITIAN_INPUT_TOLERANCE) -> bool:
    """Check m = m* entrywise within tol (scaled by the largest entry)."""
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol * scale)


def hermitian_part(m: Matrix) -> Matrix:
    return (m + m.conj().T) / 2


def _jacobi_eigh(m: Matrix) -> Tuple[np.ndarray, Matrix]:
    a = np.array(m, dtype=np.complex128 if np.iscomplexobj(m) else np.float64)
    n = a.shape[0]
    v = np.eye(n, dtype=a.dtype)
    norm = np.linalg.norm(a)
    if n < 2 or norm == 0.0:
        return np.real(np.diag(a)).copy(), v
    threshold = _EPS * norm
    for sweep in range(JACOBI_MAX_SWEEPS):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                gamma = a[p, q]
                if abs(gamma) <= threshold:
                    continue
                g = _rotation(a[p, p].real, a[q, q].real, gamma)
                if a.dtype == np.float64:
                    g = g.real
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ g
                rotated = True
        if not rotated:
            break
    else:
        logger.debug(f"Jacobi eigh stopped after {JACOBI_MAX_SWEEPS} sweeps (n={n})")
    return np.real(np.diag(a)).copy(), v


def eigh(m: Matrix, method: Optional[str] = None) -> Tuple[np.ndarray, Matrix]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ascending eigenvalues and the matching orthonormal eigenvectors as
    columns. Raises ValidationError for non-Hermitian input.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeMismatchError(f"eigh needs a square matrix, got shape {m.shape}")
    if not is_hermitian(m):
        raise ValidationError("eigh needs a Hermitian matrix")
    m = hermitian_part(m)
    if _use_jacobi(m.shape[0], method):
        values, vectors = _jacobi_eigh(m)
        order = np.argsort(values, kind="stable")
        return values[order], vectors[:, order]
    values, vectors = np.linalg.eigh(m)
    return values, vectors


def eigvalsh(m: Matrix, method: Optional[str] = None) -> np.ndarray:
    return eigh(m, method)[0]


def complete_basis(columns: Matrix, dim: int) -> Matrix:
    """Extend orthonormal columns to a dim x dim unitary."""
    columns = np.asarray(columns)
    k = columns.shape[1] if columns.ndim == 2 else 0
    if k == dim:
        return columns
    dtype = np.result_type(columns.dtype, np.float64)
    basis = np.zeros((dim, dim), dtype=dtype)
    basis[:, :k] = columns
    filled = k
    for e in np.eye(dim, dtype=dtype):
        if filled == dim:
            break
        w = e - basis[:, :filled] @ (basis[:, :filled].conj().T @ e)
        w = w - basis[:, :filled] @ (basis[:, :filled].conj().T @ w)
        norm = np.linalg.norm(w)
        if norm > 1e-8:
            basis[:, filled] = w / norm
            filled += 1
    return basis


def _jacobi_svd_tall(m: Matrix) -> Tuple[Matrix, np.ndarray, Matrix]:
    b = np.array(m, dtype=np.complex128 if np.iscomplexobj(m) else np.float64)
    rows, cols = b.shape
    v = np.eye(cols, dtype=b.dtype)
    tol = max(rows, 1) * _EPS
    for sweep in range(JACOBI_MAX_SWEEPS):
        rotated = False
        for i in range(cols - 1):
            for j in range(i + 1, cols):
                alpha = float(np.vdot(b[:, i], b[:, i]).real)
                beta = float(np.vdot(b[:, j], b[:, j]).real)
                gamma = np.vdot(b[:, i], b[:, j])
                if alpha == 0.0 or beta == 0.0 or abs(gamma) <= tol * math.sqrt(alpha * beta):
                    continue
                g = _rotation(alpha, beta, gamma)
                if b.dtype == np.float64:
                    g = g.real
                idx = [i, j]
                b[:, idx] = b[:, idx] @ g
                v[:, idx] = v[:, idx] @ g
                rotated = True
        if not rotated:
            break
    else:
        logger.debug(f"One-sided Jacobi SVD stopped after {JACOBI_MAX_SWEEPS} sweeps")
    sigma = np.linalg.norm(b, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma, b, v = sigma[order], b[:, order], v[:, order]
    u = np.zeros_like(b)
    nonzero = sigma > 0
    u[:, nonzero] = b[:, nonzero] / sigma[nonzero]
    rank = int(np.count_nonzero(sigma > _EPS * max(sigma[0] if sigma.size else 0.0, 1e-300)))
    if rank < cols:
        u = complete_basis(u[:, :rank], rows)[:, :cols]
    return u, sigma, v


def svd(m: Matrix, method: Optional[str] = None) -> Tuple[Matrix, np.ndarray, Matrix]:
    """Thin SVD m = U diag(sigma) V*.

    U is rows x k, V is cols x k with k = min(rows, cols); sigma is
    nonincreasing and U, V have orthonormal columns.
    """
    m = np.asarray(m)
    if m.ndim != 2:
        raise ShapeMismatchError(f"svd needs a matrix, got shape {m.shape}")
    rows, cols = m.shape
    if rows == 0 or cols == 0:
        return np.zeros((rows, 0)), np.zeros(0), np.zeros((cols, 0))
    if not _use_jacobi(max(rows, cols), method):
        u, sigma, vh = np.linalg.svd(m, full_matrices=False)
        return u, sigma, vh.conj().T
    if rows >= cols:
        return _jacobi_svd_tall(m)
    u, sigma, v = _jacobi_svd_tall(m.conj().T)
    return v, sigma, u


def rank_from_singular_values(sigma: np.ndarray, shape: Tuple[int, int], tol: Optional[float] = None) -> int:
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    if tol is None:
        tol = sigma[0] * max(shape) * RANK_RELATIVE_TOLERANCE
    return int(np.count_nonzero(sigma > tol))


def numerical_rank(m: Matrix, tol: Optional[float] = None, method: Optional[str] = None) -> int:
    """Count singular values above tol (default: max sigma * dim * 1e-12)."""
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return rank_from_singular_values(svd(m, method)[1], m.shape, tol)


def kron(a: Matrix, b: Matrix, cap: int = MAX_KRON_DIMENSION) -> Matrix:
    """Kronecker product with entry((i1,i2),(j1,j2)) = a(i1,j1) b(i2,j2)."""
    a = np.atleast_2d(np.asarray(a))
    b = np.atleast_2d(np.asarray(b))
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows > cap or cols > cap:
        raise CapacityError(f"Kronecker product {rows}x{cols} exceeds cap {cap}")
    return np.kron(a, b)


def kron_power(a: Matrix, d: int, cap: int = MAX_KRON_DIMENSION) -> Matrix:
    result = np.ones((1, 1), dtype=np.asarray(a).dtype)
    for _ in range(d):
        result = kron(result, a, cap)
    return result


def psd_check(m: Matrix, tol: float, method: Optional[str] = None) -> PsdVerdict:
    """Verdict true iff the smallest eigenvalue is at least -tol."""
    values = eigvalsh(m, method)
    lowest = float(values[0]) if values.size else 0.0
    return PsdVerdict(is_psd=lowest >= -tol, min_eigenvalue=lowest)


def min_eigenvalue(m: Matrix, method: Optional[str] = None) -> float:
    return float(eigvalsh(m, method)[0])


def clip_psd(m: Matrix, method: Optional[str] = None) -> Matrix:
    """Project onto the PSD cone by zeroing negative eigenvalues."""
    values, vectors = eigh(m, method)
    values = np.clip(values, 0.0, None)
    return (vectors * values) @ vectors.conj().T


def psd_sqrt(m: Matrix, method: Optional[str] = None) -> Matrix:
    values, vectors = eigh(m, method)
    return (vectors * np.sqrt(np.clip(values, 0.0, None))) @ vectors.conj().T


def inverse_sqrt(m: Matrix, floor: float = 1e-14, method: Optional[str] = None) -> Matrix:
    """m^{-1/2} for a positive definite matrix (eigenvalues floored)."""
    values, vectors = eigh(m, method)
    values = np.clip(values, floor, None)
    return (vectors / np.sqrt(values)) @ vectors.conj().T


def schmidt(v: Matrix, dim_a: int, dim_b: int, method: Optional[str] = None) -> SchmidtForm:
    """Schmidt decomposition of a unit vector on C^dim_a (x) C^dim_b."""
    v = np.asarray(v).reshape(-1)
    if v.size != dim_a * dim_b:
        raise ShapeMismatchError(f"Vector of length {v.size} does not factor as {dim_a}x{dim_b}")
    if abs(np.linalg.norm(v) - 1.0) > NORM_TOLERANCE:
        raise ValidationError("Schmidt decomposition needs a unit vector")
    u, sigma, w = svd(v.reshape(dim_a, dim_b), method)
    rank = rank_from_singular_values(sigma, (dim_a, dim_b))
    return SchmidtForm(
        coefficients=sigma[:rank].copy(),
        left_basis=u[:, :rank],
        right_basis=w[:, :rank].conj(),
    )


def partial_trace(rho: Matrix, dims: Sequence[int], keep: Sequence[int]) -> Matrix:
    """Reduced matrix on the subsystems listed in keep (in their original order)."""
    dims = list(dims)
    k = len(dims)
    keep = sorted(keep)
    traced = [i for i in range(k) if i not in keep]
    tensor = np.asarray(rho).reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:k])
    col = list(letters[k:2 * k])
    for i in traced:
        col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    reduced = np.einsum(f"{''.join(row)}{''.join(col)}->{out}", tensor)
    size = int(np.prod([dims[i] for i in keep])) if keep else 1
    return reduced.reshape(size, size)


def random_unitary(n: int, rng: np.random.Generator) -> Matrix:
    """Haar-random unitary from the QR of a complex Ginibre matrix."""
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_hermitian(n: int, rng: np.random.Generator, complex_entries: bool = True) -> Matrix:
    a = rng.normal(size=(n, n))
    if complex_entries:
        a = a + 1j * rng.normal(size=(n, n))
    return hermitian_part(a)

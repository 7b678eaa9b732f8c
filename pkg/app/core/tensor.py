"""
Tensor Core Module
Dense complex linear algebra and tensor-product construction for the
composite qubit ⊗ qubit ⊗ boson Hilbert space.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence, Tuple

import numpy as np
from scipy import linalg as la

import config
from app.core.errors import ContractViolationError, DimensionError, PositivityError

# Dense complex square matrix (Hamiltonians, density matrices, unitaries)
ComplexMatrix = np.ndarray
# Complex amplitude vector
StateVector = np.ndarray


@dataclass(frozen=True)
class SpaceLayout:
    """
    Ordered factor dimensions of a composite space.

    The convention throughout is [qubit1, qubit2, boson].
    """

    factor_dims: Tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        if not dims or any(d < 1 for d in dims):
            raise DimensionError(f"Factor dimensions must be positive: {self.factor_dims}")
        object.__setattr__(self, "factor_dims", dims)

    @classmethod
    def qubits_and_boson(cls, n_fock: int) -> SpaceLayout:
        return cls((2, 2, n_fock))

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.factor_dims))

    def flatten(self, multi_index: Sequence[int]) -> int:
        """Converts a multi-index (one entry per factor) to a flat index."""
        return int(np.ravel_multi_index(tuple(multi_index), self.factor_dims))

    def unflatten(self, index: int) -> Tuple[int, ...]:
        """Converts a flat index to its multi-index."""
        return tuple(int(i) for i in np.unravel_index(index, self.factor_dims))


def _check_square(m: ComplexMatrix, name: str = "matrix") -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m.shape[0]


def kron(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    """
    Tensor (Kronecker) product of two square matrices.

    Args:
        a: Left factor
        b: Right factor

    Returns:
        Matrix of dimension a.dim * b.dim with entry
        (i*b.dim + k, j*b.dim + l) = a[i, j] * b[k, l]

    Raises:
        DimensionError: If the product exceeds config.MAX_DIMENSION
    """
    dim = _check_square(a, "a") * _check_square(b, "b")
    if dim > config.MAX_DIMENSION:
        raise DimensionError(f"Tensor product dimension {dim} exceeds maximum {config.MAX_DIMENSION}")
    return np.kron(a, b).astype(complex, copy=False)


def kron_all(factors: Sequence[ComplexMatrix]) -> ComplexMatrix:
    """Left-folded tensor product of several matrices."""
    return reduce(kron, factors)


def embed(op: ComplexMatrix, site: int, layout: SpaceLayout) -> ComplexMatrix:
    """
    Embeds a single-factor operator into the composite space.

    Args:
        op: Operator acting on factor `site`
        site: Index of the factor in layout.factor_dims
        layout: Composite space layout

    Returns:
        Identity ⊗ ... ⊗ op ⊗ ... ⊗ identity
    """
    if _check_square(op, "op") != layout.factor_dims[site]:
        raise DimensionError(
            f"Operator of dim {op.shape[0]} cannot act on factor {site} of dim {layout.factor_dims[site]}"
        )
    factors = [np.eye(d, dtype=complex) for d in layout.factor_dims]
    factors[site] = np.asarray(op, dtype=complex)
    return kron_all(factors)


def hermiticity_error(m: ComplexMatrix) -> float:
    """Entrywise max |M - M†|."""
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def hermitian_eigendecompose(m: ComplexMatrix) -> Tuple[np.ndarray, ComplexMatrix]:
    """
    Eigendecomposition of a Hermitian matrix.

    Args:
        m: Hermitian matrix (within config.HERMITIAN_TOLERANCE)

    Returns:
        Tuple (eigenvalues ascending, unitary matrix of column eigenvectors)

    Raises:
        ContractViolationError: If m is not Hermitian
    """
    _check_square(m)
    error = hermiticity_error(m)
    if error > config.HERMITIAN_TOLERANCE:
        raise ContractViolationError(f"Matrix is not Hermitian (max |M - M†| = {error:.3e})")
    eigenvalues, eigenvectors = la.eigh(m)
    return eigenvalues, eigenvectors


def matvec(m: ComplexMatrix, v: StateVector) -> StateVector:
    """Matrix-vector product with a dimension check."""
    if m.ndim != 2 or v.ndim != 1 or m.shape[1] != v.shape[0]:
        raise DimensionError(f"Cannot apply matrix of shape {m.shape} to vector of shape {v.shape}")
    return m @ v


def clamp_eigenvalues(
    eigenvalues: np.ndarray, tol: float = config.PSD_TOLERANCE, rank_cutoff: float = 0.0
) -> np.ndarray:
    """
    Clamps tiny negative eigenvalues to zero.

    Args:
        eigenvalues: Real spectrum of a PSD matrix
        tol: Largest negative eigenvalue accepted as rounding
        rank_cutoff: Eigenvalues at or below rank_cutoff * max are also set to zero

    Raises:
        PositivityError: If an eigenvalue is below -tol
    """
    smallest = float(np.min(eigenvalues)) if eigenvalues.size else 0.0
    if smallest < -tol:
        raise PositivityError(f"Eigenvalue {smallest:.3e} below -{tol:.0e}")
    clamped = np.clip(eigenvalues, 0.0, None)
    if rank_cutoff > 0.0 and clamped.size:
        clamped[clamped <= rank_cutoff * float(np.max(clamped))] = 0.0
    return clamped


def matrix_sqrt_psd(
    m: ComplexMatrix, tol: float = config.PSD_TOLERANCE, rank_cutoff: float = config.RANK_CUTOFF
) -> ComplexMatrix:
    """
    Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in [-tol, 0) are clamped to zero, and so are those at or
    below rank_cutoff times the largest one; the square root would
    otherwise turn 1e-16 rounding into 1e-8 entries.

    Args:
        m: Hermitian PSD matrix
        tol: Largest negative eigenvalue accepted as rounding
        rank_cutoff: Relative threshold below which eigenvalues count as zero

    Raises:
        PositivityError: If m has an eigenvalue below -tol
    """
    eigenvalues, eigenvectors = hermitian_eigendecompose(m)
    roots = np.sqrt(clamp_eigenvalues(eigenvalues, tol=tol, rank_cutoff=rank_cutoff))
    return (eigenvectors * roots) @ eigenvectors.conj().T


def normalized(v: StateVector) -> StateVector:
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ValueError("Cannot normalize the zero vector")
    return v / norm


def random_state(dim: int, rng: np.random.Generator) -> StateVector:
    """Normalized complex Gaussian random vector."""
    return normalized(rng.standard_normal(dim) + 1j * rng.standard_normal(dim))


def random_hermitian(dim: int, rng: np.random.Generator) -> ComplexMatrix:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2.0

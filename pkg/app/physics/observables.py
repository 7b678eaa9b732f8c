"""
Observables Module
Reduces the global pure state to the two-qubit density matrix and
computes concurrence, von Neumann entropy and diagnostic populations.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np
from scipy import linalg as la

import config
from app.core.errors import DimensionError, InvalidStateError, PositivityError
from app.core.tensor import (
    ComplexMatrix,
    SpaceLayout,
    StateVector,
    clamp_eigenvalues,
    hermitian_eigendecompose,
    hermiticity_error,
    kron,
    matrix_sqrt_psd,
)
from app.physics.hamiltonian import SIGMA_Y
from app.physics.models import EntanglementSample

# 4x4 matrix over the basis |00>, |01>, |10>, |11>
DensityMatrix4 = np.ndarray

SIGMA_YY = kron(SIGMA_Y, SIGMA_Y)


def _qubit_block(psi: StateVector, layout: SpaceLayout) -> np.ndarray:
    """Amplitudes reshaped to (4 qubit labels, n_fock)."""
    dims = layout.factor_dims
    if len(dims) != 3 or dims[0] != 2 or dims[1] != 2:
        raise DimensionError(f"Expected a [2, 2, N] layout, got {list(dims)}")
    if psi.ndim != 1 or psi.shape[0] != layout.total_dim:
        raise DimensionError(f"State of shape {psi.shape} does not match layout dim {layout.total_dim}")
    return psi.reshape(4, dims[2])


def reduced_density_matrix(psi: StateVector, layout: SpaceLayout) -> DensityMatrix4:
    """
    Traces out the boson: rho12[q, q'] = sum_n psi(q, n) conj(psi(q', n)).

    Args:
        psi: Global state over [2, 2, N]
        layout: Composite space layout

    Returns:
        4x4 Hermitian density matrix
    """
    m = _qubit_block(psi, layout)
    rho = m @ m.conj().T
    return 0.5 * (rho + rho.conj().T)


def boson_density_matrix(psi: StateVector, layout: SpaceLayout) -> ComplexMatrix:
    """Traces out both qubits, leaving the N x N cavity density matrix."""
    m = _qubit_block(psi, layout)
    rho = m.T @ m.conj()
    return 0.5 * (rho + rho.conj().T)


def single_qubit_density_matrix(rho: DensityMatrix4, site: int) -> ComplexMatrix:
    """Reduces the two-qubit state to qubit 0 or 1."""
    tensor = rho.reshape(2, 2, 2, 2)
    if site == 0:
        return np.einsum("ijkj->ik", tensor)
    return np.einsum("jijk->ik", tensor)


def _validate_state(rho: ComplexMatrix) -> None:
    error = hermiticity_error(rho)
    if error > config.HERMITIAN_TOLERANCE:
        raise InvalidStateError(f"Density matrix is not Hermitian (max |rho - rho†| = {error:.3e})")
    trace = float(np.real(np.trace(rho)))
    if abs(trace - 1.0) > config.STATE_TOLERANCE:
        raise InvalidStateError(f"Density matrix trace {trace:.12f} differs from 1")


def _validated_eigensystem(rho: ComplexMatrix) -> Tuple[np.ndarray, ComplexMatrix]:
    """Eigenvalues (clamped at zero) and eigenvectors of a validated density matrix."""
    _validate_state(rho)
    eigenvalues, eigenvectors = hermitian_eigendecompose(rho)
    try:
        return clamp_eigenvalues(eigenvalues, tol=config.STATE_TOLERANCE), eigenvectors
    except PositivityError as e:
        raise InvalidStateError(str(e)) from e


def spin_flip(rho: DensityMatrix4) -> ComplexMatrix:
    """(sy ⊗ sy) conj(rho) (sy ⊗ sy), conjugation in the standard basis."""
    return SIGMA_YY @ rho.conj() @ SIGMA_YY


def concurrence_spectrum(rho: DensityMatrix4) -> np.ndarray:
    """
    Square roots of the eigenvalues of rho * spin_flip(rho), descending.

    Taken as the singular values of sqrt(rho) sqrt(rho~), whose squares are
    the eigenvalues of the Hermitian sqrt(rho) rho~ sqrt(rho). Rank-deficient
    states (pure states included) come out exact to rounding.

    Raises:
        InvalidStateError: If rho or its spin flip is not positive
    """
    if rho.shape != (4, 4):
        raise DimensionError(f"Concurrence needs a 4x4 density matrix, got {rho.shape}")
    _validate_state(rho)
    try:
        sqrt_rho = matrix_sqrt_psd(rho, tol=config.STATE_TOLERANCE)
    except PositivityError as e:
        raise InvalidStateError(str(e)) from e
    try:
        sqrt_flipped = matrix_sqrt_psd(spin_flip(rho), tol=config.STATE_TOLERANCE)
    except PositivityError as e:
        raise InvalidStateError(f"Spin-flipped state is not positive: {e}") from e
    return la.svdvals(sqrt_rho @ sqrt_flipped)


def concurrence(rho: DensityMatrix4) -> float:
    """
    Wootters concurrence C = max(l1 - l2 - l3 - l4, 0), clamped to [0, 1].
    """
    lam = concurrence_spectrum(rho)
    value = lam[0] - lam[1] - lam[2] - lam[3]
    return float(min(max(value, 0.0), 1.0))


def concurrence_reference(rho: DensityMatrix4) -> float:
    """
    Concurrence from the eigenvalues of the non-Hermitian product rho rho~.

    Reference implementation used to cross-check concurrence().
    """
    eigenvalues = np.abs(np.real(np.linalg.eigvals(rho @ spin_flip(rho))))
    eigenvalues = clamp_eigenvalues(eigenvalues, rank_cutoff=config.RANK_CUTOFF)
    lam = np.sort(np.sqrt(eigenvalues))[::-1]
    return float(max(lam[0] - lam[1] - lam[2] - lam[3], 0.0))


def von_neumann_entropy(rho: ComplexMatrix, base: float = config.ENTROPY_LOG_BASE) -> float:
    """
    S = -Tr(rho log rho) with 0 log 0 = 0.

    Args:
        rho: Density matrix (any dimension)
        base: Logarithm base (2 gives bits)

    Returns:
        Entropy, non-negative
    """
    eigenvalues, _ = _validated_eigensystem(rho)
    nonzero = eigenvalues[eigenvalues > 0.0]
    entropy = -float(np.sum(nonzero * np.log(nonzero))) / np.log(base)
    return max(entropy, 0.0)


def populations_and_photon(psi: StateVector, layout: SpaceLayout) -> Tuple[Tuple[float, ...], float]:
    """
    Qubit-label populations and mean cavity photon number.

    Returns:
        Tuple (populations of |00>, |01>, |10>, |11>, mean photon number)
    """
    probabilities = np.abs(_qubit_block(psi, layout)) ** 2
    populations = tuple(float(p) for p in probabilities.sum(axis=1))
    photon_distribution = probabilities.sum(axis=0)
    mean_photon = float(np.dot(np.arange(photon_distribution.shape[0]), photon_distribution))
    return populations, mean_photon


def energy(h: ComplexMatrix, psi: StateVector) -> float:
    """Expectation value <psi|H|psi>."""
    return float(np.real(np.vdot(psi, h @ psi)))


def measure(psi: StateVector, layout: SpaceLayout, t: float, single_qubit: bool = False) -> EntanglementSample:
    """
    Computes one trace sample. Observables use the normalized state; the
    raw norm is reported separately.

    Args:
        psi: Global state
        layout: Composite space layout
        t: Sample time
        single_qubit: Also compute the single-exciton entropies

    Returns:
        EntanglementSample
    """
    norm = float(np.linalg.norm(psi))
    unit = psi / norm
    rho = reduced_density_matrix(unit, layout)
    populations, mean_photon = populations_and_photon(unit, layout)

    sample = EntanglementSample(
        t=t,
        concurrence=concurrence(rho),
        entropy=von_neumann_entropy(rho),
        norm=norm,
        mean_photon=mean_photon,
        populations=populations,
    )
    if single_qubit:
        sample.entropy_q1 = von_neumann_entropy(single_qubit_density_matrix(rho, 0))
        sample.entropy_q2 = von_neumann_entropy(single_qubit_density_matrix(rho, 1))
    return sample

"""
Oracle Stepper - exact exponentiation through the Hermitian eigendecomposition.
"""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from app.core.tensor import ComplexMatrix, StateVector, hermitian_eigendecompose
from app.steppers.base_stepper import BaseStepper


def _apply_exponential(
    eigenvalues: np.ndarray, eigenvectors: ComplexMatrix, psi: StateVector, dt: float
) -> StateVector:
    return eigenvectors @ (np.exp(-1j * eigenvalues * dt) * (eigenvectors.conj().T @ psi))


def oracle_step(h: ComplexMatrix, psi: StateVector, dt: float) -> StateVector:
    """
    Exact step V exp(-i Lambda dt) V† psi.

    Args:
        h: Hermitian Hamiltonian
        psi: State
        dt: Step size

    Returns:
        Propagated state
    """
    eigenvalues, eigenvectors = hermitian_eigendecompose(h)
    return _apply_exponential(eigenvalues, eigenvectors, psi, dt)


class OracleStepper(BaseStepper):
    """Exact stepper; reuses the eigensystem while the same matrix object is passed."""

    def __init__(self):
        super().__init__("oracle")
        self._cached_h: Optional[ComplexMatrix] = None
        self._cached_eigensystem: Optional[Tuple[np.ndarray, ComplexMatrix]] = None

    def step(self, h: ComplexMatrix, psi: StateVector, dt: float) -> StateVector:
        if h is not self._cached_h:
            self._cached_eigensystem = hermitian_eigendecompose(h)
            self._cached_h = h
        eigenvalues, eigenvectors = self._cached_eigensystem
        self.steps_taken += 1
        return _apply_exponential(eigenvalues, eigenvectors, psi, dt)

"""
Base class for all time steppers.
"""

from __future__ import annotations

from abc import ABC, abstractmethod

from app.core.tensor import ComplexMatrix, StateVector


class BaseStepper(ABC):
    """Advances a state by one step under a Hamiltonian held constant over the step."""

    def __init__(self, name: str):
        """
        Initialize the stepper.

        Args:
            name: Stepper name
        """
        self.name = name
        self.matvec_count = 0
        self.steps_taken = 0

    @abstractmethod
    def step(self, h: ComplexMatrix, psi: StateVector, dt: float) -> StateVector:
        """
        Applies exp(-i h dt) (or an approximation of it) to psi.

        Args:
            h: Hermitian Hamiltonian for this step
            psi: Current state
            dt: Step size

        Returns:
            Propagated state
        """
        pass

    def reset_counters(self) -> None:
        """Clears matvec and step counters."""
        self.matvec_count = 0
        self.steps_taken = 0

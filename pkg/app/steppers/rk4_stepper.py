"""
RK4 Stepper - classical explicit 4th-order Runge-Kutta, used as the benchmark baseline.
"""

from __future__ import annotations

from app.core.tensor import ComplexMatrix, StateVector, matvec
from app.steppers.base_stepper import BaseStepper


def rk4_step(h: ComplexMatrix, psi: StateVector, dt: float) -> StateVector:
    """
    One RK4 step of d psi/dt = -i h psi.

    Args:
        h: Hamiltonian (constant over the step)
        psi: State
        dt: Step size

    Returns:
        Propagated state
    """
    dt2 = dt / 2.0

    k1 = -1j * matvec(h, psi)
    k2 = -1j * matvec(h, psi + k1 * dt2)
    k3 = -1j * matvec(h, psi + k2 * dt2)
    k4 = -1j * matvec(h, psi + k3 * dt)

    return psi + (k1 + 2 * k2 + 2 * k3 + k4) / 6.0 * dt


class RK4Stepper(BaseStepper):
    """Splits each outer step into `substeps` RK4 steps with the same Hamiltonian."""

    def __init__(self, substeps: int = 1):
        super().__init__("rk4")
        if substeps < 1:
            raise ValueError(f"substeps must be >= 1, got {substeps}")
        self.substeps = substeps

    def step(self, h: ComplexMatrix, psi: StateVector, dt: float) -> StateVector:
        sub_dt = dt / self.substeps
        for _ in range(self.substeps):
            psi = rk4_step(h, psi, sub_dt)
        self.matvec_count += 4 * self.substeps
        self.steps_taken += 1
        return psi

"""
Error types raised across the simulator.
"""

from __future__ import annotations

from typing import Optional


class SimulationError(Exception):
    """Base class for every error raised by the simulator."""


class DimensionError(SimulationError, ValueError):
    """Shape mismatch, or a composite space larger than MAX_DIMENSION."""


class ContractViolationError(SimulationError, ValueError):
    """A routine received input that breaks its precondition (e.g. non-Hermitian)."""


class PositivityError(SimulationError, ValueError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""


class InvalidStateError(SimulationError, ValueError):
    """A density matrix is not a valid quantum state."""


class ConfigError(SimulationError, ValueError):
    """A run configuration could not be parsed or validated."""


class CalibrationError(SimulationError, RuntimeError):
    """Step calibration could not find an acceptable dt."""


class NumericFailureError(SimulationError, RuntimeError):
    """Non-finite values appeared during evolution."""

    def __init__(self, message: str, t: Optional[float] = None):
        self.t = t
        if t is not None:
            message = f"{message} (t={t:.6g})"
        super().__init__(message)


class StepTooLargeError(NumericFailureError):
    """The expansion tail exceeds the tolerance; the caller must reduce dt."""

    def __init__(self, tail_estimate: float, tolerance: float, t: Optional[float] = None):
        self.tail_estimate = tail_estimate
        self.tolerance = tolerance
        super().__init__(
            f"Expansion tail {tail_estimate:.3e} exceeds tolerance {tolerance:.1e}; reduce dt",
            t=t,
        )

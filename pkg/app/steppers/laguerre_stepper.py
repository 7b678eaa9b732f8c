"""
Laguerre Stepper - polynomial expansion of the time-evolution operator.

exp(-i H t) = (1 + i t)^-(alpha+1) * sum_k (i t / (1 + i t))^k L^alpha_k(H)

The expansion is applied to H' = (H - s I) / c with time argument c * dt,
and the shift is undone with the exact phase exp(-i s dt).
"""

from __future__ import annotations

from dataclasses import replace
from typing import Optional, Tuple

import numpy as np

from app.core.errors import StepTooLargeError
from app.core.tensor import ComplexMatrix, StateVector, matvec
from app.physics.models import PropagatorConfig, StepReport
from app.steppers.base_stepper import BaseStepper


def _laguerre_series(
    h_scaled: ComplexMatrix, psi: StateVector, tau: float, k_max: int, alpha: float
) -> Tuple[StateVector, float]:
    """
    Sums the truncated series for exp(-i h_scaled tau) psi.

    Returns:
        Tuple (result, norm of the k_max-th term)
    """
    denominator = 1.0 + 1j * tau
    prefactor = denominator ** (-(alpha + 1.0))
    z = 1j * tau / denominator

    # L_0 = 1, L_1(x) = 1 + alpha - x
    v_prev = psi
    v = (1.0 + alpha) * psi - matvec(h_scaled, psi)
    z_power = z
    total = psi + z_power * v

    for k in range(1, k_max):
        v_next = ((2 * k + alpha + 1.0) * v - matvec(h_scaled, v) - (k + alpha) * v_prev) / (k + 1)
        v_prev, v = v, v_next
        z_power = z_power * z
        total = total + z_power * v

    last_term = abs(prefactor * z_power) * np.linalg.norm(v)
    return prefactor * total, float(last_term)


def laguerre_step(
    h: ComplexMatrix, psi: StateVector, cfg: PropagatorConfig, enforce_tail: bool = True
) -> Tuple[StateVector, StepReport]:
    """
    One Laguerre-expansion step of size cfg.dt.

    Args:
        h: Hermitian Hamiltonian held constant over the step
        psi: Normalized state
        cfg: Expansion settings (k_max, alpha, dt, shift, scale)
        enforce_tail: Raise when the tail estimate exceeds cfg.tail_tolerance

    Returns:
        Tuple (propagated state, StepReport)

    Raises:
        StepTooLargeError: If the last retained term is too large relative to the result
    """
    identity = np.eye(h.shape[0], dtype=complex)
    h_scaled = (h - cfg.shift * identity) / cfg.scale
    return _finish_step(h_scaled, psi, cfg, enforce_tail)


def _finish_step(
    h_scaled: ComplexMatrix, psi: StateVector, cfg: PropagatorConfig, enforce_tail: bool
) -> Tuple[StateVector, StepReport]:
    result, last_term = _laguerre_series(h_scaled, psi, cfg.scale * cfg.dt, cfg.k_max, cfg.alpha)
    if cfg.shift != 0.0:
        result = result * np.exp(-1j * cfg.shift * cfg.dt)

    out_norm = float(np.linalg.norm(result))
    tail = last_term / out_norm if out_norm > 0.0 else float("inf")
    report = StepReport(tail_estimate=tail, norm_drift=abs(out_norm - float(np.linalg.norm(psi))))

    if enforce_tail and tail > cfg.tail_tolerance:
        raise StepTooLargeError(tail, cfg.tail_tolerance)
    return result, report


class LaguerreStepper(BaseStepper):
    """Production stepper. The step size passed to step() overrides cfg.dt."""

    def __init__(self, cfg: PropagatorConfig):
        """
        Initialize stepper.

        Args:
            cfg: Expansion settings
        """
        super().__init__("laguerre")
        self.cfg = cfg
        self.last_report: Optional[StepReport] = None
        self.max_tail = 0.0
        self._identity: Optional[ComplexMatrix] = None

    def step(self, h: ComplexMatrix, psi: StateVector, dt: float) -> StateVector:
        if self._identity is None or self._identity.shape != h.shape:
            self._identity = np.eye(h.shape[0], dtype=complex)
        if dt != self.cfg.dt:
            self.cfg = replace(self.cfg, dt=dt)

        h_scaled = (h - self.cfg.shift * self._identity) / self.cfg.scale
        psi, self.last_report = _finish_step(h_scaled, psi, self.cfg, enforce_tail=True)

        self.max_tail = max(self.max_tail, self.last_report.tail_estimate)
        self.matvec_count += self.cfg.k_max
        self.steps_taken += 1
        return psi

"""
Propagation Module
Drives a stepper through time under the piecewise-constant H(t) and
calibrates the Laguerre step size.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, replace
from typing import Callable, Optional, Union

import numpy as np

import config
from app.core.errors import CalibrationError, NumericFailureError, StepTooLargeError
from app.core.tensor import StateVector, random_state
from app.physics.hamiltonian import HamiltonianBuilder, build_initial_state
from app.physics.models import (
    STEPPERS,
    DriveWaveform,
    EntanglementSample,
    EvolutionTrace,
    InitialState,
    ModelParams,
    PropagatorConfig,
)
from app.physics.observables import measure
from app.steppers import BaseStepper, LaguerreStepper, OracleStepper, laguerre_step, oracle_step

logger = logging.getLogger(__name__)


def make_stepper(name: str, cfg: PropagatorConfig) -> BaseStepper:
    """Creates a stepper by name ("laguerre" or "oracle")."""
    if name == "laguerre":
        return LaguerreStepper(cfg)
    if name == "oracle":
        return OracleStepper()
    raise ValueError(f"Unknown stepper '{name}', expected one of {STEPPERS}")


def step_grid(t_end: float, dt: float, sample_every: int) -> tuple[int, float]:
    """
    Number of steps and effective dt covering [0, t_end] exactly.

    The step count is rounded up to a multiple of sample_every, so the
    effective dt never exceeds the requested one and the last sample lands
    on t_end.
    """
    if t_end <= 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    if sample_every < 1:
        raise ValueError(f"sample_every must be >= 1, got {sample_every}")
    n_steps = max(1, math.ceil(t_end / dt - 1e-9))
    n_steps = sample_every * math.ceil(n_steps / sample_every)
    return n_steps, t_end / n_steps


def propagate(
    builder: HamiltonianBuilder,
    psi: StateVector,
    stepper: BaseStepper,
    dt: float,
    n_steps: int,
    sampling: str = "midpoint",
    sample_every: int = 1,
    on_sample: Optional[Callable[[StateVector, float], None]] = None,
) -> StateVector:
    """
    Runs n_steps of size dt from t = 0.

    Args:
        builder: Hamiltonian source
        psi: Initial state
        stepper: Stepper applied with H sampled once per step
        dt: Step size
        n_steps: Number of steps
        sampling: "midpoint" uses H(t + dt/2), "left" uses H(t)
        sample_every: Call on_sample every this many steps
        on_sample: Optional callback(psi, t)

    Returns:
        Final state

    Raises:
        NumericFailureError: On non-finite amplitudes or a rejected step, with the failing t
    """
    offset = 0.5 * dt if sampling == "midpoint" else 0.0

    for k in range(n_steps):
        t = k * dt
        h = builder.at(t + offset)
        try:
            psi = stepper.step(h, psi, dt)
        except StepTooLargeError as e:
            raise StepTooLargeError(e.tail_estimate, e.tolerance, t=t) from None
        if not np.all(np.isfinite(psi)):
            raise NumericFailureError("Non-finite amplitudes after step", t=t)

        if on_sample is not None and (k + 1) % sample_every == 0:
            on_sample(psi, (k + 1) * dt)
        if (k + 1) % config.PROGRESS_EVERY_STEPS == 0:
            logger.info(f"{stepper.name}: step {k + 1}/{n_steps} (t={(k + 1) * dt:.2f})")

    return psi


def evolve(
    p: ModelParams,
    w: DriveWaveform,
    s0: InitialState,
    cfg: PropagatorConfig,
    t_end: float,
    sample_every: int = 1,
    stepper: Union[str, BaseStepper] = "laguerre",
    single_qubit: bool = False,
) -> EvolutionTrace:
    """
    Evolves the initial state and records an EvolutionTrace.

    Args:
        p: Model parameters
        w: Drive waveform
        s0: Initial qubit state (cavity in vacuum)
        cfg: Propagator settings; cfg.dt is the requested step size
        t_end: Final time
        sample_every: Steps between recorded samples
        stepper: "laguerre", "oracle" or a stepper instance
        single_qubit: Also record single-exciton entropies

    Returns:
        Trace with samples at t = 0, sample spacing, ..., t_end
    """
    n_steps, dt = step_grid(t_end, cfg.dt, sample_every)
    cfg = replace(cfg, dt=dt)
    if isinstance(stepper, str):
        stepper = make_stepper(stepper, cfg)

    builder = HamiltonianBuilder(p, w)
    psi0 = build_initial_state(s0, p.n_fock)

    trace = EvolutionTrace(
        params_echo={
            "model": asdict(p),
            "drive": asdict(w),
            "initial": s0.qubit_label,
            "propagator": asdict(cfg),
            "stepper": stepper.name,
            "t_end": t_end,
            "sample_every": sample_every,
            "n_steps": n_steps,
        }
    )

    def record(psi: StateVector, t: float) -> None:
        sample: EntanglementSample = measure(psi, builder.layout, t, single_qubit=single_qubit)
        if not math.isfinite(sample.concurrence) or not math.isfinite(sample.entropy):
            raise NumericFailureError("Non-finite observables", t=t)
        trace.append(sample)

    logger.info(
        f"Evolving |{s0.qubit_label}> under {w.kind} drive to t={t_end:g} "
        f"({n_steps} {stepper.name} steps, dt={dt:.6g})"
    )
    record(psi0, 0.0)
    propagate(builder, psi0, stepper, dt, n_steps, cfg.sampling, sample_every, record)
    logger.info(f"Evolution finished: {len(trace)} samples")
    return trace


def spectral_bounds(builder: HamiltonianBuilder) -> tuple[float, float]:
    """Smallest and largest eigenvalue of H(t) over the drive's field range."""
    lowest, highest = math.inf, -math.inf
    for field in builder.extreme_fields():
        eigenvalues = np.linalg.eigvalsh(builder.with_field(field))
        lowest = min(lowest, float(eigenvalues[0]))
        highest = max(highest, float(eigenvalues[-1]))
    return lowest, highest


def calibrate_step(
    p: ModelParams, w: DriveWaveform, cfg: PropagatorConfig, seed: int = 0
) -> PropagatorConfig:
    """
    Chooses shift, scale and dt for the Laguerre expansion.

    Shift and scale map the spectral range of the extreme-field Hamiltonians
    onto [-1, 1]. Starting from cfg.dt, dt is halved until the tail estimate
    is below CALIBRATION_TAIL_TARGET and one step agrees with the oracle to
    CALIBRATION_ORACLE_TARGET on random probe states.

    Args:
        p: Model parameters
        w: Drive waveform
        cfg: Starting configuration
        seed: Seed for the probe states

    Returns:
        Calibrated configuration

    Raises:
        CalibrationError: If dt falls below CALIBRATION_MIN_DT
    """
    builder = HamiltonianBuilder(p, w)
    lowest, highest = spectral_bounds(builder)
    shift = 0.5 * (highest + lowest)
    # A zero-width spectrum is exactly shift * I; any tiny scale reproduces it.
    scale = max(0.5 * (highest - lowest), 1e-12)

    rng = np.random.default_rng(seed)
    dim = builder.layout.total_dim
    probes = [random_state(dim, rng) for _ in range(config.CALIBRATION_PROBE_STATES)]
    hamiltonians = [builder.with_field(f) for f in builder.extreme_fields()]

    dt = cfg.dt
    while True:
        trial = replace(cfg, dt=dt, shift=shift, scale=scale)
        worst_tail, worst_error = 0.0, 0.0
        for h in hamiltonians:
            for psi in probes:
                result, report = laguerre_step(h, psi, trial, enforce_tail=False)
                worst_tail = max(worst_tail, report.tail_estimate)
                worst_error = max(worst_error, float(np.max(np.abs(result - oracle_step(h, psi, dt)))))

        logger.debug(f"calibrate: dt={dt:.6g} tail={worst_tail:.3e} oracle_error={worst_error:.3e}")
        if worst_tail < config.CALIBRATION_TAIL_TARGET and worst_error < config.CALIBRATION_ORACLE_TARGET:
            logger.info(f"Calibrated dt={dt:.6g} (shift={shift:.6g}, scale={scale:.6g})")
            return trial

        dt /= 2.0
        if dt < config.CALIBRATION_MIN_DT:
            raise CalibrationError(f"dt fell below {config.CALIBRATION_MIN_DT:g} without meeting accuracy targets")

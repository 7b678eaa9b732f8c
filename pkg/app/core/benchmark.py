"""
Benchmark Module
Times the Laguerre stepper against RK4 at matched end-state accuracy.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

import config
from app.core.errors import NumericFailureError
from app.core.propagator import propagate, step_grid
from app.core.tensor import StateVector
from app.physics.hamiltonian import HamiltonianBuilder, build_initial_state
from app.physics.models import DriveWaveform, InitialState, ModelParams, PropagatorConfig
from app.steppers import BaseStepper, LaguerreStepper, OracleStepper, RK4Stepper

logger = logging.getLogger(__name__)


@dataclass
class BenchmarkRow:
    method: str
    wall_time: float
    steps: int
    matvecs: int
    error: float
    reached: bool = True


@dataclass
class BenchmarkResult:
    t_end: float
    dt: float
    accuracy: float
    rows: List[BenchmarkRow] = field(default_factory=list)

    def row(self, method: str) -> Optional[BenchmarkRow]:
        return next((r for r in self.rows if r.method.startswith(method)), None)

    @property
    def speed_ratio(self) -> Optional[float]:
        """RK4 wall time over Laguerre wall time, None if RK4 missed the target."""
        laguerre, rk4 = self.row("laguerre"), self.row("rk4")
        if laguerre is None or rk4 is None or not rk4.reached or laguerre.wall_time <= 0:
            return None
        return rk4.wall_time / laguerre.wall_time

    def format_table(self) -> str:
        lines = [
            "=" * 72,
            f"BENCHMARK  t_end={self.t_end:g}  dt={self.dt:.6g}  target error={self.accuracy:.0e}",
            "=" * 72,
            f"{'method':<16}{'wall [s]':>12}{'steps':>10}{'matvecs':>12}{'max error':>14}",
        ]
        for r in self.rows:
            status = "" if r.reached else "  (target not reached)"
            lines.append(
                f"{r.method:<16}{r.wall_time:>12.4f}{r.steps:>10d}{r.matvecs:>12d}{r.error:>14.3e}{status}"
            )
        ratio = self.speed_ratio
        lines.append("-" * 72)
        lines.append(f"speed ratio (rk4 / laguerre): {ratio:.2f}" if ratio is not None else "speed ratio: n/a")
        lines.append(f"published claim: about {config.PUBLISHED_SPEEDUP_CLAIM:g}x faster than Runge-Kutta")
        lines.append("=" * 72)
        return "\n".join(lines)


def _timed_run(builder, psi0: StateVector, stepper: BaseStepper, dt: float, n_steps: int, sampling: str):
    stepper.reset_counters()
    start = time.perf_counter()
    psi = propagate(builder, psi0, stepper, dt, n_steps, sampling)
    return psi, time.perf_counter() - start


def run_benchmark(
    p: ModelParams,
    w: DriveWaveform,
    s0: InitialState,
    cfg: PropagatorConfig,
    t_end: float = config.BENCHMARK_T_END,
    accuracy: float = config.BENCHMARK_ACCURACY,
    max_substeps: int = config.BENCHMARK_MAX_RK4_SUBSTEPS,
) -> BenchmarkResult:
    """
    Propagates the same problem with the oracle, Laguerre and RK4 steppers.

    RK4 integrates the same piecewise-constant Hamiltonian, using 1, 2, 4, ...
    substeps per Laguerre step until its end state is within `accuracy` of
    the oracle.

    Args:
        p: Model parameters
        w: Drive waveform
        s0: Initial state
        cfg: Calibrated propagator settings
        t_end: Propagation time
        accuracy: End-state max-error target
        max_substeps: Give up on RK4 beyond this many substeps

    Returns:
        BenchmarkResult
    """
    n_steps, dt = step_grid(t_end, cfg.dt, 1)
    builder = HamiltonianBuilder(p, w)
    psi0 = build_initial_state(s0, p.n_fock)
    result = BenchmarkResult(t_end=t_end, dt=dt, accuracy=accuracy)

    reference, _ = _timed_run(builder, psi0, OracleStepper(), dt, n_steps, cfg.sampling)

    laguerre = LaguerreStepper(cfg)
    psi, wall = _timed_run(builder, psi0, laguerre, dt, n_steps, cfg.sampling)
    error = float(np.max(np.abs(psi - reference)))
    result.rows.append(BenchmarkRow("laguerre", wall, laguerre.steps_taken, laguerre.matvec_count, error, error <= accuracy))
    logger.info(f"laguerre: {wall:.3f}s, error {error:.3e}")

    substeps = 1
    while True:
        rk4 = RK4Stepper(substeps)
        start = time.perf_counter()
        try:
            psi, wall = _timed_run(builder, psi0, rk4, dt, n_steps, cfg.sampling)
            error = float(np.max(np.abs(psi - reference)))
        except NumericFailureError as e:
            wall, error = time.perf_counter() - start, float("inf")
            logger.debug(f"rk4 x{substeps} diverged: {e}")
        logger.debug(f"rk4 x{substeps}: {wall:.3f}s, error {error:.3e}")
        if error <= accuracy:
            result.rows.append(BenchmarkRow(f"rk4 (x{substeps})", wall, n_steps * substeps, rk4.matvec_count, error))
            break
        if substeps * 2 > max_substeps:
            result.rows.append(
                BenchmarkRow(f"rk4 (x{substeps})", wall, n_steps * substeps, rk4.matvec_count, error, reached=False)
            )
            logger.warning(f"RK4 did not reach {accuracy:.0e} within {max_substeps} substeps")
            break
        substeps *= 2

    return result

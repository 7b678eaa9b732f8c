"""
Main Application Module
Coordinates config loading, evolution, export and reporting for each CLI
command and maps failures to exit codes.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Optional, Tuple, Union

import config
from app.core.benchmark import run_benchmark
from app.core.errors import CalibrationError, ConfigError, DimensionError, InvalidStateError, NumericFailureError
from app.core.exporter import Exporter
from app.core.propagator import evolve
from app.core.renderer import TraceRenderer
from app.core.run_config import RunConfig, load_run_config
from app.core.verifier import format_result, run_suite
from app.physics.analysis import first_envelope_peak
from app.physics.models import EvolutionTrace, PeakReport

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# Failures mapped to EXIT_NUMERIC_FAILURE
NUMERIC_ERRORS = (NumericFailureError, CalibrationError, InvalidStateError, DimensionError)


@dataclass
class RunOutcome:
    """Result of one executed run config."""

    run_config: RunConfig
    trace: EvolutionTrace
    report: Optional[PeakReport]
    csv_path: Path
    png_path: Optional[Path] = None


def _sweep_worker(config_path: str, output_dir: Optional[str]) -> Tuple[str, int, str]:
    """Runs one config in a worker process. Returns (name, exit code, summary)."""
    app = ExcitonEntanglerApp(output_dir=Path(output_dir) if output_dir else None)
    name = Path(config_path).stem
    try:
        outcome = app.execute(load_run_config(config_path))
    except ConfigError as e:
        return name, config.EXIT_CONFIG_ERROR, f"config error: {e}"
    except NUMERIC_ERRORS as e:
        return name, config.EXIT_NUMERIC_FAILURE, f"numeric failure: {e}"
    summary = outcome.report.describe() if outcome.report else "C never reached the threshold"
    return outcome.run_config.name, config.EXIT_OK, summary


class ExcitonEntanglerApp:
    """Application object behind main.py; one method per command."""

    def __init__(self, output_dir: Optional[Path] = None):
        """
        Initialize application.

        Args:
            output_dir: Where relative output paths are resolved (default: config.output_dir())
        """
        self.output_dir = Path(output_dir) if output_dir else config.output_dir()
        self.exporter = Exporter()
        self.renderer = TraceRenderer()

    # ------------------------------------------------------------ run

    def execute(self, run_config: RunConfig) -> RunOutcome:
        """
        Evolves one run config and writes its outputs.

        Args:
            run_config: Validated run configuration

        Returns:
            RunOutcome with the trace, peak report and written paths

        Raises:
            NumericFailureError: On non-finite values or a rejected step
            CalibrationError: If no acceptable dt exists
        """
        cfg = run_config.resolved_propagator()
        self._warn_on_coarse_sampling(run_config, cfg.dt)

        trace = evolve(
            run_config.model,
            run_config.drive,
            run_config.initial,
            cfg,
            run_config.t_end,
            sample_every=run_config.sample_every,
            stepper=run_config.stepper,
            single_qubit=run_config.extra_columns,
        )
        report = first_envelope_peak(trace)

        csv_path = run_config.csv_path(self.output_dir)
        self.exporter.export_trace_csv(trace, csv_path, extra_columns=run_config.extra_columns)
        logger.info(f"Trace written: {csv_path}")

        png_path = run_config.png_path(self.output_dir)
        if png_path is not None:
            self.renderer.render(trace, png_path, title=run_config.name, report=report)
            logger.info(f"Figure written: {png_path}")

        return RunOutcome(run_config, trace, report, csv_path, png_path)

    def run(self, config_path: PathLike) -> int:
        """
        `run <config>`: evolve, write CSV, print the PeakReport.

        Returns:
            Exit code (0 ok, 2 config error, 3 numeric failure)
        """
        try:
            run_config = load_run_config(config_path)
        except ConfigError as e:
            logger.error(f"Config error: {e}")
            return config.EXIT_CONFIG_ERROR

        try:
            outcome = self.execute(run_config)
        except NUMERIC_ERRORS as e:
            logger.error(f"Numeric failure: {e}")
            return config.EXIT_NUMERIC_FAILURE

        print(Exporter.format_peak_report(run_config.name, outcome.report, outcome.trace))
        return config.EXIT_OK

    def _warn_on_coarse_sampling(self, run_config: RunConfig, dt: float) -> None:
        drive = run_config.drive
        if not drive.is_periodic:
            return
        spacing = dt * run_config.sample_every
        limit = drive.period / config.MIN_SAMPLES_PER_PERIOD
        if spacing > limit:
            logger.warning(
                f"Sample spacing {spacing:.4g} exceeds P/{config.MIN_SAMPLES_PER_PERIOD} = {limit:.4g}; "
                "the C(t) oscillation within one drive period is under-resolved"
            )

    # ------------------------------------------------------------ verify

    def verify(self, quick: bool = False, fault: Optional[str] = None, seed: int = 0) -> int:
        """
        `verify [--quick]`: run the invariant suite and print per-check status.

        Returns:
            0 if every check passed, 1 otherwise
        """
        logger.info(f"Running {'quick' if quick else 'full'} invariant suite")
        results = run_suite(quick=quick, seed=seed, fault=fault, on_result=lambda r: print(format_result(r), flush=True))

        failures = [r for r in results if not r.passed]
        print("-" * 60)
        print(f"{len(results) - len(failures)}/{len(results)} checks passed")
        if failures:
            print("Failed checks:")
            for r in failures:
                print(f"  - {r.label}: {r.detail}")
            return config.EXIT_VERIFY_FAILED
        return config.EXIT_OK

    # ------------------------------------------------------------ benchmark

    def benchmark(self, config_path: PathLike) -> int:
        """
        `benchmark <config>`: Laguerre vs RK4 wall time at matched accuracy.

        An unreachable RK4 target is reported in the table, not as a failure.
        """
        try:
            run_config = load_run_config(config_path)
        except ConfigError as e:
            logger.error(f"Config error: {e}")
            return config.EXIT_CONFIG_ERROR

        try:
            cfg = run_config.resolved_propagator()
            result = run_benchmark(run_config.model, run_config.drive, run_config.initial, cfg)
        except NUMERIC_ERRORS as e:
            logger.error(f"Numeric failure: {e}")
            return config.EXIT_NUMERIC_FAILURE

        print(result.format_table())
        return config.EXIT_OK

    # ------------------------------------------------------------ sweep

    def sweep(self, directory: PathLike, workers: Optional[int] = None) -> int:
        """
        `sweep <dir>`: run every *.yaml in a directory concurrently.

        Returns:
            The worst exit code of all runs
        """
        directory = Path(directory)
        paths = sorted(directory.glob("*.yaml"))
        if not paths:
            logger.error(f"No *.yaml configs in {directory}")
            return config.EXIT_CONFIG_ERROR

        logger.info(f"Sweeping {len(paths)} configs from {directory}")
        worst = config.EXIT_OK
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_sweep_worker, str(p), str(self.output_dir)) for p in paths]
            for future in futures:
                name, code, summary = future.result()
                worst = max(worst, code)
                status = "ok" if code == config.EXIT_OK else f"exit {code}"
                print(f"{name:<12} {status:<8} {summary}")
        return worst

    # ------------------------------------------------------------ render

    def render(self, csv_path: PathLike, png_path: Optional[PathLike] = None, bridge: float = 0.0) -> int:
        """
        `render <csv>`: draw a written trace to PNG.

        Args:
            csv_path: CSV written by `run`
            png_path: Output image (default: next to the CSV)
            bridge: Dip length bridged when shading the peak interval
        """
        csv_path = Path(csv_path)
        png_path = Path(png_path) if png_path else csv_path.with_suffix(".png")
        try:
            trace = Exporter.read_trace_csv(csv_path)
            report = first_envelope_peak(trace, bridge=bridge)
            self.renderer.render(trace, png_path, title=csv_path.stem, report=report)
        except (OSError, ValueError) as e:
            logger.error(f"Cannot render {csv_path}: {e}")
            return config.EXIT_CONFIG_ERROR

        logger.info(f"Figure written: {png_path}")
        return config.EXIT_OK

    # ------------------------------------------------------------ convergence

    def convergence(self, config_path: PathLike) -> int:
        """
        `convergence <config>`: repeat a run at dt/2 and n_fock + 4 and
        print how much c_peak and the interval length move.
        """
        try:
            base = load_run_config(config_path)
        except ConfigError as e:
            logger.error(f"Config error: {e}")
            return config.EXIT_CONFIG_ERROR

        try:
            cfg = base.resolved_propagator()
            variants = [
                ("base", base, cfg),
                ("dt/2", base, replace(cfg, dt=cfg.dt / 2)),
            ]
            larger = base.with_overrides(model=replace(base.model, n_fock=base.model.n_fock + 4))
            variants.append((f"n_fock={larger.model.n_fock}", larger, larger.resolved_propagator()))

            rows: List[Tuple[str, float, int, Optional[PeakReport]]] = []
            for label, run_config, variant_cfg in variants:
                logger.info(f"Convergence run: {label}")
                trace = evolve(
                    run_config.model,
                    run_config.drive,
                    run_config.initial,
                    variant_cfg,
                    run_config.t_end,
                    sample_every=run_config.sample_every,
                    stepper=run_config.stepper,
                )
                rows.append((label, variant_cfg.dt, run_config.model.n_fock, first_envelope_peak(trace)))
        except NUMERIC_ERRORS as e:
            logger.error(f"Numeric failure: {e}")
            return config.EXIT_NUMERIC_FAILURE

        print(format_convergence_table(base.name, rows))
        return config.EXIT_OK


def format_convergence_table(name: str, rows: List[Tuple[str, float, int, Optional[PeakReport]]]) -> str:
    """Formats convergence rows; deltas are relative to the first row."""
    lines = [
        "=" * 78,
        f"CONVERGENCE - {name}",
        "=" * 78,
        f"{'variant':<14}{'dt':>10}{'n_fock':>8}{'c_peak':>12}{'interval':>12}{'d c_peak':>11}{'d interval':>11}",
    ]
    base_report = rows[0][3] if rows else None
    for label, dt, n_fock, report in rows:
        if report is None:
            lines.append(f"{label:<14}{dt:>10.4g}{n_fock:>8d}{'none':>12}{'none':>12}")
            continue
        if base_report is None:
            d_peak, d_interval = "n/a", "n/a"
        else:
            d_peak = f"{report.c_peak - base_report.c_peak:+.2e}"
            relative = (report.interval_length - base_report.interval_length) / max(base_report.interval_length, 1e-300)
            d_interval = f"{100.0 * relative:+.3f}%"
        lines.append(
            f"{label:<14}{dt:>10.4g}{n_fock:>8d}{report.c_peak:>12.6f}{report.interval_length:>12.6g}"
            f"{d_peak:>11}{d_interval:>11}"
        )
    lines.append("=" * 78)
    return "\n".join(lines)

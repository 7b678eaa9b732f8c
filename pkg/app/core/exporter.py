"""
Export Module
Writes evolution traces to CSV, reads them back, and formats PeakReports.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import List, Optional

import config
from app.physics.models import EntanglementSample, EvolutionTrace, PeakReport


def _fmt(value: float) -> str:
    return f"{value:.{config.CSV_SIGNIFICANT_DIGITS}g}"


class Exporter:
    """Handles exporting traces and reports."""

    @staticmethod
    def export_trace_csv(trace: EvolutionTrace, output_path: Path, extra_columns: bool = False) -> None:
        """
        Exports a trace as CSV, one row per sample.

        Args:
            trace: Evolution trace
            output_path: Path to save the CSV file
            extra_columns: Append the single-exciton entropies
        """
        if len(trace) == 0:
            raise ValueError("Empty trace")

        header = list(config.CSV_COLUMNS)
        if extra_columns:
            header += list(config.CSV_EXTRA_COLUMNS)

        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for s in trace.samples:
                row = [s.t, s.concurrence, s.entropy, s.norm, s.mean_photon, *s.populations]
                if extra_columns:
                    row += [s.entropy_q1, s.entropy_q2]
                writer.writerow([_fmt(v) for v in row])

    @staticmethod
    def read_trace_csv(input_path: Path) -> EvolutionTrace:
        """
        Reads a CSV written by export_trace_csv.

        Args:
            input_path: CSV file

        Returns:
            EvolutionTrace (params_echo is empty)
        """
        trace = EvolutionTrace()
        with open(input_path, "r", newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            missing = set(config.CSV_COLUMNS) - set(reader.fieldnames or [])
            if missing:
                raise ValueError(f"{input_path} is missing columns: {', '.join(sorted(missing))}")
            for row in reader:
                trace.append(
                    EntanglementSample(
                        t=float(row["t"]),
                        concurrence=float(row["concurrence"]),
                        entropy=float(row["entropy"]),
                        norm=float(row["norm"]),
                        mean_photon=float(row["mean_photon"]),
                        populations=(
                            float(row["p00"]), float(row["p01"]), float(row["p10"]), float(row["p11"]),
                        ),
                        entropy_q1=float(row.get("entropy_q1") or 0.0),
                        entropy_q2=float(row.get("entropy_q2") or 0.0),
                    )
                )
        return trace

    @staticmethod
    def format_peak_report(name: str, report: Optional[PeakReport], trace: EvolutionTrace) -> str:
        """
        Formats a PeakReport as structured key: value text.

        Args:
            name: Run name
            report: Peak report, or None when C never reached the threshold
            trace: Trace the report was computed from

        Returns:
            Multi-line text
        """
        lines: List[str] = []
        lines.append("=" * 60)
        lines.append(f"PEAK REPORT - {name}")
        lines.append("=" * 60)
        lines.append(f"samples: {len(trace)}")
        if len(trace):
            lines.append(f"t_end: {_fmt(trace.samples[-1].t)}")
            lines.append(f"max_norm_drift: {_fmt(float(abs(trace.norms - 1.0).max()))}")
        if report is None:
            lines.append("peak: none")
        else:
            lines.append(f"threshold: {_fmt(report.threshold)}")
            lines.append(f"t_peak: {_fmt(report.t_peak)}")
            lines.append(f"c_peak: {_fmt(report.c_peak)}")
            lines.append(f"interval_start: {_fmt(report.interval_start)}")
            lines.append(f"interval_end: {_fmt(report.interval_end)}")
            lines.append(f"interval_length: {_fmt(report.interval_length)}")
        lines.append("=" * 60)
        return "\n".join(lines)

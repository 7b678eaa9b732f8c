"""
Analysis Module
Summary statistics of concurrence traces: first-envelope peak and the
duration of C >= threshold around it.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

import numpy as np

import config
from app.core.errors import DimensionError
from app.physics.models import EvolutionTrace, PeakReport


def _runs(mask: np.ndarray) -> List[Tuple[int, int]]:
    """Inclusive (start, end) index pairs of the True runs in mask."""
    padded = np.concatenate(([False], mask, [False])).astype(np.int8)
    edges = np.diff(padded)
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return list(zip(starts.tolist(), ends.tolist()))


def _crossing(t0: float, c0: float, t1: float, c1: float, threshold: float) -> float:
    """Linear interpolation of the time where C crosses threshold between two samples."""
    if c1 == c0:
        return t0
    return t0 + (threshold - c0) / (c1 - c0) * (t1 - t0)


def _default_bridge(trace: EvolutionTrace) -> float:
    drive = trace.params_echo.get("drive") or {}
    if drive.get("kind", "none") == "none":
        return 0.0
    return float(drive.get("period", 0.0))


def first_envelope_peak(
    trace: EvolutionTrace,
    threshold: float = config.PEAK_THRESHOLD,
    bridge: Optional[float] = None,
) -> Optional[PeakReport]:
    """
    Finds the first contiguous region where C >= threshold.

    Sub-threshold dips no longer than `bridge` inside the region are
    bridged; by default bridge is the drive period taken from the trace's
    params_echo (0 for an undriven run).

    Args:
        trace: Evolution trace
        threshold: Concurrence threshold in (0, 1)
        bridge: Longest dip (in time) that does not end the region

    Returns:
        PeakReport, or None if C never reaches threshold
    """
    if len(trace) == 0:
        raise ValueError("Cannot analyze an empty trace")
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    if bridge is None:
        bridge = _default_bridge(trace)

    times = trace.times
    values = trace.concurrences
    runs = _runs(values >= threshold)
    if not runs:
        return None

    start, end = runs[0]
    for next_start, next_end in runs[1:]:
        if times[next_start] - times[end] > bridge:
            break
        end = next_end

    window = values[start:end + 1]
    peak_index = start + int(np.argmax(window))

    if start == 0:
        interval_start = float(times[0])
    else:
        interval_start = _crossing(times[start - 1], values[start - 1], times[start], values[start], threshold)

    last = len(values) - 1
    if end == last:
        interval_end = float(times[last])
    else:
        interval_end = _crossing(times[end], values[end], times[end + 1], values[end + 1], threshold)

    return PeakReport(
        t_peak=float(times[peak_index]),
        c_peak=float(values[peak_index]),
        interval_start=float(interval_start),
        interval_end=float(interval_end),
        threshold=threshold,
    )


def trace_compare(a: EvolutionTrace, b: EvolutionTrace) -> float:
    """
    Maximum pointwise |C_a - C_b| over identical sample grids.

    Raises:
        DimensionError: If the sample grids differ
    """
    if len(a) != len(b):
        raise DimensionError(f"Traces have different lengths ({len(a)} vs {len(b)})")
    if len(a) == 0:
        return 0.0
    if np.max(np.abs(a.times - b.times)) > 1e-9:
        raise DimensionError("Traces are sampled on different time grids")
    return float(np.max(np.abs(a.concurrences - b.concurrences)))


def max_concurrence(trace: EvolutionTrace) -> float:
    return float(np.max(trace.concurrences)) if len(trace) else 0.0

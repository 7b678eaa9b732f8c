from __future__ import annotations


from pathlib import Path
from typing import List, Optional, Tuple


import numpy as np
from PIL import Image, ImageDraw


import config
from app.physics.models import EvolutionTrace, PeakReport


class TraceRenderer:
    """
    Renders an evolution trace into a static PNG figure.
    Two stacked panels: concurrence C(t) on [0, 1] and entropy S(t) on [0, 2].
    """

    MARGIN = 60
    PANEL_GAP = 40
    CURVE_COLORS = {"concurrence": (30, 90, 200, 255), "entropy": (200, 60, 40, 255)}

    def __init__(self, size: Tuple[int, int] = config.RENDER_SIZE):
        """
        Initializes the renderer.

        Args:
            size: Image size in pixels (width, height)
        """
        self.width, self.height = size
        if self.width <= 2 * self.MARGIN or self.height <= 2 * self.MARGIN + self.PANEL_GAP:
            raise ValueError(f"Render size {size} is too small")

    def render(
        self,
        trace: EvolutionTrace,
        output_path: Optional[Path] = None,
        title: str = "",
        report: Optional[PeakReport] = None,
    ) -> Image.Image:
        """
        Renders a trace.

        Args:
            trace: Evolution trace
            output_path: Optional path to save the image
            title: Text drawn above the first panel
            report: Optional peak report; its threshold interval is shaded

        Returns:
            Rendered PIL Image
        """
        if len(trace) < 2:
            raise ValueError("Need at least two samples to render")

        image = Image.new("RGBA", (self.width, self.height), (255, 255, 255, 255))
        draw = ImageDraw.Draw(image, "RGBA")

        times = trace.times
        panels = self._panel_boxes()
        series = [("concurrence", trace.concurrences, 1.0), ("entropy", trace.entropies, 2.0)]

        for box, (label, values, y_max) in zip(panels, series):
            if report is not None and label == "concurrence":
                self._shade_interval(draw, box, times, report)
            self._draw_grid(draw, box, times, y_max)
            self._draw_envelope(draw, box, times, values, y_max, self.CURVE_COLORS[label])
            draw.text((box[0], box[1] - 16), label, fill=(0, 0, 0, 255))

        if title:
            draw.text((self.MARGIN, 8), title, fill=(0, 0, 0, 255))

        if output_path:
            output_path = Path(output_path)
            output_path.parent.mkdir(parents=True, exist_ok=True)
            image.save(output_path)

        return image

    def _panel_boxes(self) -> List[Tuple[int, int, int, int]]:
        """(left, top, right, bottom) of each panel."""
        left, right = self.MARGIN, self.width - self.MARGIN // 2
        usable = self.height - 2 * self.MARGIN - self.PANEL_GAP
        panel_height = usable // 2
        top_1 = self.MARGIN
        top_2 = top_1 + panel_height + self.PANEL_GAP
        return [(left, top_1, right, top_1 + panel_height), (left, top_2, right, top_2 + panel_height)]

    @staticmethod
    def _x_of(box: Tuple[int, int, int, int], times: np.ndarray, t: np.ndarray) -> np.ndarray:
        left, _, right, _ = box
        span = times[-1] - times[0]
        return left + (t - times[0]) / span * (right - left)

    @staticmethod
    def _y_of(box: Tuple[int, int, int, int], value: np.ndarray, y_max: float) -> np.ndarray:
        _, top, _, bottom = box
        clipped = np.clip(value, 0.0, y_max)
        return bottom - clipped / y_max * (bottom - top)

    def _draw_grid(self, draw: ImageDraw.ImageDraw, box, times: np.ndarray, y_max: float) -> None:
        left, top, right, bottom = box
        for fraction in np.linspace(0.0, 1.0, 5):
            y = bottom - fraction * (bottom - top)
            draw.line([(left, y), (right, y)], fill=config.GRID_COLOR, width=1)
            draw.text((4, y - 6), f"{fraction * y_max:.2g}", fill=(0, 0, 0, 255))
        for fraction in np.linspace(0.0, 1.0, 6):
            x = left + fraction * (right - left)
            draw.line([(x, top), (x, bottom)], fill=config.GRID_COLOR, width=1)
            t_label = times[0] + fraction * (times[-1] - times[0])
            draw.text((x - 10, bottom + 4), f"{t_label:.4g}", fill=(0, 0, 0, 255))
        draw.rectangle([left, top, right, bottom], outline=(0, 0, 0, 255), width=1)

    def _draw_envelope(self, draw: ImageDraw.ImageDraw, box, times, values, y_max, color) -> None:
        """Draws min/max per pixel column so dense oscillations render as a band."""
        left, _, right, _ = box
        columns = np.clip(self._x_of(box, times, times).astype(int), left, right)
        ys = self._y_of(box, values, y_max)

        order = np.argsort(columns, kind="stable")
        columns, ys = columns[order], ys[order]
        unique_cols, starts = np.unique(columns, return_index=True)
        y_low = np.minimum.reduceat(ys, starts)
        y_high = np.maximum.reduceat(ys, starts)

        previous = None
        for x, lo, hi in zip(unique_cols.tolist(), y_low.tolist(), y_high.tolist()):
            draw.line([(x, lo), (x, hi)], fill=color, width=1)
            if previous is not None:
                draw.line([previous, (x, (lo + hi) / 2)], fill=color, width=1)
            previous = (x, (lo + hi) / 2)

    def _shade_interval(self, draw: ImageDraw.ImageDraw, box, times, report: PeakReport) -> None:
        _, top, _, bottom = box
        x0, x1 = self._x_of(box, times, np.array([report.interval_start, report.interval_end]))
        draw.rectangle([x0, top, x1, bottom], fill=(120, 200, 120, 60))

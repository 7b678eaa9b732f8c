import numpy as np
import pytest
from PIL import Image

from app.core.renderer import TraceRenderer
from app.physics.models import EntanglementSample, EvolutionTrace, PeakReport


def oscillating_trace(n=2000):
    trace = EvolutionTrace()
    for t in np.linspace(0.0, 400.0, n):
        c = float(np.sin(np.pi * t / 400.0) ** 2 * (0.8 + 0.2 * np.cos(t)))
        trace.append(EntanglementSample(float(t), c, 2 * c, 1.0, 0.0, (0.0, 1.0, 0.0, 0.0)))
    return trace


def test_render_writes_png(tmp_path):
    path = tmp_path / "figures" / "trace.png"
    image = TraceRenderer(size=(600, 400)).render(oscillating_trace(), path, title="test")
    assert path.exists()
    with Image.open(path) as saved:
        assert saved.size == (600, 400)
    assert image.size == (600, 400)


def test_render_draws_curve_pixels():
    renderer = TraceRenderer(size=(600, 400))
    image = renderer.render(oscillating_trace()).convert("RGB")
    pixels = np.asarray(image)
    curve = np.all(pixels == renderer.CURVE_COLORS["concurrence"][:3], axis=-1)
    assert curve.sum() > 100


def test_render_shades_peak_interval():
    renderer = TraceRenderer(size=(600, 400))
    trace = oscillating_trace()
    report = PeakReport(t_peak=200.0, c_peak=1.0, interval_start=100.0, interval_end=300.0, threshold=0.5)
    plain = np.asarray(renderer.render(trace).convert("RGB"))
    shaded = np.asarray(renderer.render(trace, report=report).convert("RGB"))
    assert not np.array_equal(plain, shaded)


def test_render_needs_two_samples():
    trace = EvolutionTrace()
    trace.append(EntanglementSample(0.0, 0.0, 0.0, 1.0, 0.0, (0.0, 1.0, 0.0, 0.0)))
    with pytest.raises(ValueError):
        TraceRenderer().render(trace)


def test_render_size_validation():
    with pytest.raises(ValueError):
        TraceRenderer(size=(50, 50))

import numpy as np
import pytest

import config
import main
from app import application
from app.application import ExcitonEntanglerApp, format_convergence_table
from app.core import verifier
from app.core.errors import DimensionError, InvalidStateError
from app.core.exporter import Exporter
from app.physics.analysis import trace_compare
from app.physics.models import PeakReport

SHORT_RUN = """\
t_end: 10.0
dt: auto
initial: "01"
drive: cosine
"""


def write(tmp_path, text, name="short.yaml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture
def app(tmp_path):
    return ExcitonEntanglerApp(output_dir=tmp_path / "out")


def test_run_writes_csv_and_prints_report(tmp_path, app, capsys):
    assert app.run(write(tmp_path, SHORT_RUN)) == config.EXIT_OK

    csv_path = tmp_path / "out" / "short.csv"
    header = csv_path.read_text(encoding="utf-8").splitlines()[0]
    assert header == ",".join(config.CSV_COLUMNS)
    out = capsys.readouterr().out
    assert "PEAK REPORT - short" in out


def test_run_renders_when_requested(tmp_path, app):
    path = write(tmp_path, SHORT_RUN + "output_png: short.png\nextra_columns: true\n")
    assert app.run(path) == config.EXIT_OK
    assert (tmp_path / "out" / "short.png").exists()
    header = (tmp_path / "out" / "short.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header.endswith("entropy_q1,entropy_q2")


def test_run_config_errors_exit_2(tmp_path, app):
    assert app.run(write(tmp_path, "colour: blue\n")) == config.EXIT_CONFIG_ERROR
    assert app.run(tmp_path / "missing.yaml") == config.EXIT_CONFIG_ERROR


def test_run_numeric_failure_exits_3(tmp_path, app, capsys):
    path = write(tmp_path, "t_end: 40.0\ndt: 20.0\n")
    assert main.main(["-o", str(tmp_path / "out"), "run", str(path)]) == config.EXIT_NUMERIC_FAILURE
    assert "t=0" in capsys.readouterr().err


def test_uncoupled_undriven_run_has_zero_concurrence(tmp_path, app):
    path = write(tmp_path, "t_end: 20.0\ndrive: none\namplitude: 0.0\ng: 0.0\ndelta: 0.0\n")
    assert app.run(path) == config.EXIT_OK
    trace = Exporter.read_trace_csv(tmp_path / "out" / "short.csv")
    assert np.max(trace.concurrences) <= 1e-12


def test_oracle_and_laguerre_runs_agree(tmp_path, app):
    laguerre = write(tmp_path, SHORT_RUN + "stepper: laguerre\noutput_csv: laguerre.csv\n", "a.yaml")
    oracle = write(tmp_path, SHORT_RUN + "stepper: oracle\noutput_csv: oracle.csv\n", "b.yaml")
    assert app.run(laguerre) == config.EXIT_OK
    assert app.run(oracle) == config.EXIT_OK
    a = Exporter.read_trace_csv(tmp_path / "out" / "laguerre.csv")
    b = Exporter.read_trace_csv(tmp_path / "out" / "oracle.csv")
    assert trace_compare(a, b) <= 1e-7


def test_runs_are_deterministic(tmp_path):
    path = write(tmp_path, SHORT_RUN + "seed: 3\n")
    outputs = []
    for run in ("first", "second"):
        out_dir = tmp_path / run
        assert ExcitonEntanglerApp(output_dir=out_dir).run(path) == config.EXIT_OK
        outputs.append((out_dir / "short.csv").read_bytes())
    assert outputs[0] == outputs[1]


def test_output_dir_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv(config.OUTPUT_DIR_ENV, str(tmp_path / "env_out"))
    path = write(tmp_path, SHORT_RUN)
    assert main.main(["run", str(path)]) == config.EXIT_OK
    assert (tmp_path / "env_out" / "short.csv").exists()


def test_render_command(tmp_path, app):
    assert app.run(write(tmp_path, SHORT_RUN)) == config.EXIT_OK
    csv_path = tmp_path / "out" / "short.csv"
    assert main.main(["render", str(csv_path)]) == config.EXIT_OK
    assert csv_path.with_suffix(".png").exists()
    assert app.render(tmp_path / "nope.csv") == config.EXIT_CONFIG_ERROR


def test_sweep_runs_every_config(tmp_path, app, capsys):
    configs = tmp_path / "configs"
    configs.mkdir()
    write(configs, SHORT_RUN, "one.yaml")
    write(configs, SHORT_RUN.replace("cosine", "rectangular"), "two.yaml")
    assert app.sweep(configs, workers=2) == config.EXIT_OK
    assert (tmp_path / "out" / "one.csv").exists()
    assert (tmp_path / "out" / "two.csv").exists()
    out = capsys.readouterr().out
    assert "one" in out and "two" in out


def test_sweep_reports_worst_exit_code(tmp_path, app):
    configs = tmp_path / "configs"
    configs.mkdir()
    write(configs, SHORT_RUN, "good.yaml")
    write(configs, "drive: sawtooth\n", "bad.yaml")
    assert app.sweep(configs, workers=1) == config.EXIT_CONFIG_ERROR
    assert app.sweep(tmp_path / "empty_dir") == config.EXIT_CONFIG_ERROR


def test_verify_exit_codes(monkeypatch, app, capsys):
    subset = [c for c in verifier.CHECKS if c.suite == "concurrence" and c.quick]
    monkeypatch.setattr(verifier, "CHECKS", subset)
    assert app.verify(quick=True) == config.EXIT_OK
    assert app.verify(quick=True, fault="spin-flip") == config.EXIT_VERIFY_FAILED
    out = capsys.readouterr().out
    assert "[PASS] concurrence/" in out
    assert "[FAIL] concurrence/" in out
    assert "Failed checks:" in out


def test_benchmark_table(tmp_path, app, capsys):
    assert app.benchmark(write(tmp_path, SHORT_RUN)) == config.EXIT_OK
    out = capsys.readouterr().out
    assert "laguerre" in out and "rk4" in out
    assert "speed ratio" in out
    assert "8x" in out


def test_convergence_command(tmp_path, app, capsys):
    assert app.convergence(write(tmp_path, SHORT_RUN)) == config.EXIT_OK
    out = capsys.readouterr().out
    assert "CONVERGENCE - short" in out
    assert "dt/2" in out and "n_fock=24" in out


def test_convergence_table_deltas():
    base = PeakReport(10.0, 0.97, 0.0, 100.0, 0.5)
    moved = PeakReport(10.0, 0.971, 0.0, 101.0, 0.5)
    text = format_convergence_table("x", [("base", 0.1, 12, base), ("dt/2", 0.05, 12, moved), ("n_fock=16", 0.1, 16, None)])
    assert "+1.00e-03" in text
    assert "+1.000%" in text
    assert "none" in text


def test_cli_requires_a_command():
    with pytest.raises(SystemExit):
        main.main([])


@pytest.mark.parametrize("error", [InvalidStateError("trace 1.3 differs from 1"), DimensionError("dim 4097 too large")])
def test_state_and_dimension_errors_exit_3(tmp_path, app, monkeypatch, error):
    def failing_evolve(*args, **kwargs):
        raise error

    monkeypatch.setattr(application, "evolve", failing_evolve)
    path = write(tmp_path, SHORT_RUN)
    assert app.run(path) == config.EXIT_NUMERIC_FAILURE
    name, code, summary = application._sweep_worker(str(path), str(tmp_path / "out"))
    assert code == config.EXIT_NUMERIC_FAILURE
    assert "numeric failure" in summary

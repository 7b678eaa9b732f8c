from pathlib import Path

import pytest

import config
from app.core.errors import ConfigError
from app.core.run_config import RunConfig, load_run_config, run_config_from_mapping


def write(tmp_path, text, name="run.yaml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_empty_file_gives_published_defaults(tmp_path):
    cfg = load_run_config(write(tmp_path, "# nothing but a comment\n"))
    assert cfg.name == "run"
    assert cfg.model.epsilon == 0.4 and cfg.model.delta == 0.4
    assert cfg.model.omega == 0.02 and cfg.model.g == 0.02
    assert cfg.model.n_fock == 20
    assert cfg.drive.kind == "cosine"
    assert cfg.drive.amplitude == 0.48 and cfg.drive.period == 4.0
    assert cfg.initial.qubit_label == "01"
    assert cfg.t_end == 25000.0
    assert cfg.auto_dt


def test_full_file(tmp_path):
    text = """
    drive: triangular
    amplitude: 0.3
    initial: "11"
    dt: 0.05
    k_max: 16
    alpha: 1
    t_end: 12.5
    sample_every: 4
    seed: 7
    stepper: oracle
    output_csv: traces/out.csv
    output_png: traces/out.png
    extra_columns: true
    """
    cfg = load_run_config(write(tmp_path, "\n".join(line.strip() for line in text.splitlines())))
    assert cfg.drive.kind == "triangular" and cfg.drive.amplitude == 0.3
    assert cfg.initial.qubit_label == "11"
    assert not cfg.auto_dt
    assert cfg.propagator.dt == 0.05 and cfg.propagator.k_max == 16 and cfg.propagator.alpha == 1.0
    assert cfg.stepper == "oracle"
    assert cfg.sample_every == 4 and cfg.seed == 7
    assert cfg.extra_columns
    assert cfg.csv_path(tmp_path) == tmp_path / "traces" / "out.csv"
    assert cfg.png_path(tmp_path) == tmp_path / "traces" / "out.png"


def test_unquoted_initial_label_is_recovered():
    assert run_config_from_mapping({"initial": 1}).initial.qubit_label == "01"
    assert run_config_from_mapping({"initial": 0}).initial.qubit_label == "00"


def test_fixed_dt_is_used_without_calibration():
    cfg = run_config_from_mapping({"dt": 0.2})
    assert cfg.resolved_propagator() is cfg.propagator


def test_default_csv_path_uses_name_and_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv(config.OUTPUT_DIR_ENV, str(tmp_path))
    cfg = run_config_from_mapping({}, name="fig2b")
    assert cfg.csv_path() == tmp_path / "fig2b.csv"
    assert cfg.png_path() is None


@pytest.mark.parametrize(
    "text",
    [
        "colour: blue\n",
        "drive: sawtooth\n",
        "n_fock: 1\n",
        "n_fock: 2.5\n",
        "t_end: -3\n",
        "sample_every: 0\n",
        "initial: '02'\n",
        "stepper: euler\n",
        "extra_columns: maybe\n",
        "alpha: -1\n",
        "model:\n  g: 0.1\n",
        "- just\n- a list\n",
        "drive: [cosine\n",
    ],
)
def test_invalid_files_raise_config_error(tmp_path, text):
    with pytest.raises(ConfigError):
        load_run_config(write(tmp_path, text))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_run_config(tmp_path / "absent.yaml")


def test_shipped_figure_configs_load():
    paths = sorted(config.FIGURE_CONFIGS_DIR.glob("fig*.yaml"))
    assert [p.stem for p in paths] == [f"fig{n}{v}" for n in "1234" for v in "abcd"]
    for path in paths:
        cfg = load_run_config(path)
        assert cfg.auto_dt
        assert cfg.t_end == 25000.0
        assert cfg.output_csv == Path(f"{path.stem}.csv")
    assert load_run_config(config.FIGURE_CONFIGS_DIR / "fig2b.yaml").drive.kind == "cosine"
    assert load_run_config(config.FIGURE_CONFIGS_DIR / "fig3a.yaml").initial.qubit_label == "11"
    assert load_run_config(config.FIGURE_CONFIGS_DIR / "fig4c.yaml").extra_columns


def test_with_overrides_revalidates():
    cfg = RunConfig()
    assert cfg.with_overrides(t_end=10.0).t_end == 10.0
    with pytest.raises(ConfigError):
        cfg.with_overrides(stepper="euler")

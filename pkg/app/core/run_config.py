"""
Run Configuration Module
Loads flat YAML run files into a validated RunConfig.

Grammar: one `key: value` per line, `#` starts a comment. Every key is
optional; missing keys take the published-run defaults.

    epsilon, delta, omega, g      float
    n_fock                        int >= 2
    drive                         none | cosine | rectangular | triangular
    amplitude, period             float
    initial                       00 | 01 | 10 | 11 (quote it in YAML: "01")
    stepper                       laguerre | oracle
    dt                            float, or auto (calibrate)
    k_max                         int
    alpha                         float >= 0
    sampling                      midpoint | left
    tail_tolerance                float
    t_end                         float
    sample_every                  int >= 1
    seed                          int
    output_csv, output_png        path (relative to the output directory)
    extra_columns                 bool (single-exciton entropies)
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

import config
from app.core.errors import ConfigError
from app.core.propagator import calibrate_step
from app.physics.models import (
    STEPPERS,
    DriveWaveform,
    InitialState,
    ModelParams,
    PropagatorConfig,
)

KNOWN_KEYS = {
    "name", "epsilon", "delta", "omega", "g", "n_fock", "drive", "amplitude", "period",
    "initial", "stepper", "dt", "k_max", "alpha", "sampling", "tail_tolerance", "t_end",
    "sample_every", "seed", "output_csv", "output_png", "extra_columns",
}


@dataclass
class RunConfig:
    """Everything needed to reproduce one run."""

    name: str = "run"
    model: ModelParams = field(default_factory=ModelParams)
    drive: DriveWaveform = field(default_factory=DriveWaveform)
    initial: InitialState = field(default_factory=InitialState)
    propagator: PropagatorConfig = field(default_factory=PropagatorConfig)
    auto_dt: bool = True
    stepper: str = "laguerre"
    t_end: float = config.DEFAULT_T_END
    sample_every: int = 1
    seed: int = 0
    output_csv: Optional[Path] = None
    output_png: Optional[Path] = None
    extra_columns: bool = False

    def __post_init__(self):
        if self.stepper not in STEPPERS:
            raise ConfigError(f"Unknown stepper '{self.stepper}', expected one of {STEPPERS}")
        if self.t_end <= 0:
            raise ConfigError(f"t_end must be positive, got {self.t_end}")
        if self.sample_every < 1:
            raise ConfigError(f"sample_every must be >= 1, got {self.sample_every}")

    def csv_path(self, output_dir: Optional[Path] = None) -> Path:
        """Resolved CSV output path."""
        return _resolve(self.output_csv or Path(f"{self.name}.csv"), output_dir)

    def png_path(self, output_dir: Optional[Path] = None) -> Optional[Path]:
        """Resolved PNG output path, or None when no render was requested."""
        return _resolve(self.output_png, output_dir) if self.output_png else None

    def resolved_propagator(self) -> PropagatorConfig:
        """Propagator settings, calibrated when dt is "auto"."""
        if not self.auto_dt:
            return self.propagator
        return calibrate_step(self.model, self.drive, self.propagator, seed=self.seed)

    def with_overrides(self, **changes: Any) -> RunConfig:
        return replace(self, **changes)


def _resolve(path: Path, output_dir: Optional[Path]) -> Path:
    path = Path(path)
    if path.is_absolute():
        return path
    return Path(output_dir or config.output_dir()) / path


def _get(data: Dict[str, Any], key: str, kind: type, default: Any) -> Any:
    if key not in data or data[key] is None:
        return default
    value = data[key]
    try:
        if kind is bool:
            if isinstance(value, bool):
                return value
            raise TypeError(f"expected true/false, got {value!r}")
        if kind is int and isinstance(value, float) and not value.is_integer():
            raise TypeError(f"expected an integer, got {value!r}")
        return kind(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid value for '{key}': {e}") from e


def run_config_from_mapping(data: Dict[str, Any], name: str = "run") -> RunConfig:
    """
    Builds a RunConfig from a flat mapping.

    Args:
        data: Parsed key/value pairs
        name: Run name used for default output file names

    Returns:
        Validated RunConfig

    Raises:
        ConfigError: On unknown keys or invalid values
    """
    unknown = set(data) - KNOWN_KEYS
    if unknown:
        raise ConfigError(f"Unknown config keys: {', '.join(sorted(unknown))}")

    # YAML reads 01 as the integer 1; labels are always two binary digits
    initial = data.get("initial", config.DEFAULT_INITIAL_STATE)
    if isinstance(initial, int):
        initial = f"{initial:02d}"

    dt_value = data.get("dt", "auto")
    auto_dt = isinstance(dt_value, str) and dt_value.strip().lower() == "auto"
    dt = config.DEFAULT_DT if auto_dt else _get(data, "dt", float, config.DEFAULT_DT)

    try:
        model = ModelParams(
            epsilon=_get(data, "epsilon", float, config.DEFAULT_EPSILON),
            delta=_get(data, "delta", float, config.DEFAULT_DELTA),
            omega=_get(data, "omega", float, config.DEFAULT_OMEGA),
            g=_get(data, "g", float, config.DEFAULT_G),
            n_fock=_get(data, "n_fock", int, config.DEFAULT_N_FOCK),
        )
        drive = DriveWaveform(
            kind=str(data.get("drive", config.DEFAULT_DRIVE_KIND)),
            amplitude=_get(data, "amplitude", float, config.DEFAULT_AMPLITUDE),
            period=_get(data, "period", float, config.DEFAULT_PERIOD),
        )
        propagator = PropagatorConfig(
            k_max=_get(data, "k_max", int, config.DEFAULT_K_MAX),
            alpha=_get(data, "alpha", float, config.DEFAULT_ALPHA),
            dt=dt,
            sampling=str(data.get("sampling", "midpoint")),
            tail_tolerance=_get(data, "tail_tolerance", float, config.DEFAULT_TAIL_TOLERANCE),
        )
        output_csv = data.get("output_csv")
        output_png = data.get("output_png")
        return RunConfig(
            name=str(data.get("name", name)),
            model=model,
            drive=drive,
            initial=InitialState(str(initial)),
            propagator=propagator,
            auto_dt=auto_dt,
            stepper=str(data.get("stepper", "laguerre")),
            t_end=_get(data, "t_end", float, config.DEFAULT_T_END),
            sample_every=_get(data, "sample_every", int, 1),
            seed=_get(data, "seed", int, 0),
            output_csv=Path(output_csv) if output_csv else None,
            output_png=Path(output_png) if output_png else None,
            extra_columns=_get(data, "extra_columns", bool, False),
        )
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(str(e)) from e


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """
    Loads a run configuration file.

    Args:
        path: YAML file with a flat key/value mapping

    Returns:
        Validated RunConfig

    Raises:
        ConfigError: If the file is missing, unparsable or invalid
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")

    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"Cannot parse {path}: {e}") from e

    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a flat key/value mapping")
    nested = [key for key, value in data.items() if isinstance(value, (dict, list))]
    if nested:
        raise ConfigError(f"{path}: values must be scalars (nested keys: {', '.join(map(str, nested))})")

    return run_config_from_mapping(data, name=path.stem)

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np

import config

DRIVE_KINDS = ("none", "cosine", "rectangular", "triangular")
QUBIT_LABELS = ("00", "01", "10", "11")
SAMPLING_MODES = ("midpoint", "left")
STEPPERS = ("laguerre", "oracle")


@dataclass(frozen=True)
class ModelParams:
    """Identical dots: one epsilon and one delta shared by both excitons."""

    epsilon: float = config.DEFAULT_EPSILON
    delta: float = config.DEFAULT_DELTA
    omega: float = config.DEFAULT_OMEGA
    g: float = config.DEFAULT_G
    n_fock: int = config.DEFAULT_N_FOCK

    def __post_init__(self):
        if int(self.n_fock) != self.n_fock or self.n_fock < 2:
            raise ValueError(f"n_fock must be an integer >= 2, got {self.n_fock}")

    def scaled(self, factor: float) -> ModelParams:
        """Same model with every energy multiplied by factor."""
        return ModelParams(
            epsilon=self.epsilon * factor,
            delta=self.delta * factor,
            omega=self.omega * factor,
            g=self.g * factor,
            n_fock=self.n_fock,
        )


@dataclass(frozen=True)
class DriveWaveform:
    kind: str = config.DEFAULT_DRIVE_KIND
    amplitude: float = config.DEFAULT_AMPLITUDE
    period: float = config.DEFAULT_PERIOD

    def __post_init__(self):
        if self.kind not in DRIVE_KINDS:
            raise ValueError(f"Unknown drive kind '{self.kind}', expected one of {DRIVE_KINDS}")
        if self.period <= 0:
            raise ValueError(f"Drive period must be positive, got {self.period}")

    @property
    def is_periodic(self) -> bool:
        return self.kind != "none"

    @classmethod
    def undriven(cls) -> DriveWaveform:
        return cls(kind="none", amplitude=0.0)


@dataclass(frozen=True)
class InitialState:
    """Qubit basis label with the cavity in its vacuum."""

    qubit_label: str = config.DEFAULT_INITIAL_STATE

    def __post_init__(self):
        if self.qubit_label not in QUBIT_LABELS:
            raise ValueError(f"Unknown qubit label '{self.qubit_label}', expected one of {QUBIT_LABELS}")

    @property
    def qubit_bits(self) -> Tuple[int, int]:
        return int(self.qubit_label[0]), int(self.qubit_label[1])


@dataclass(frozen=True)
class PropagatorConfig:
    """
    Laguerre expansion settings.

    The expansion acts on (H - shift*I)/scale with time argument scale*dt.
    """

    k_max: int = config.DEFAULT_K_MAX
    alpha: float = config.DEFAULT_ALPHA
    dt: float = config.DEFAULT_DT
    shift: float = 0.0
    scale: float = 1.0
    sampling: str = "midpoint"
    tail_tolerance: float = config.DEFAULT_TAIL_TOLERANCE

    def __post_init__(self):
        if self.k_max < 1:
            raise ValueError(f"k_max must be >= 1, got {self.k_max}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.scale <= 0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        if self.sampling not in SAMPLING_MODES:
            raise ValueError(f"Unknown sampling '{self.sampling}', expected one of {SAMPLING_MODES}")


@dataclass(frozen=True)
class StepReport:
    tail_estimate: float
    norm_drift: float


@dataclass(slots=True)
class EntanglementSample:
    t: float
    concurrence: float
    entropy: float
    norm: float
    mean_photon: float
    populations: Tuple[float, float, float, float]
    entropy_q1: float = 0.0
    entropy_q2: float = 0.0


@dataclass
class EvolutionTrace:
    """Time-ordered samples of one run plus a snapshot of its configuration."""

    samples: List[EntanglementSample] = field(default_factory=list)
    params_echo: Dict[str, Any] = field(default_factory=dict)

    def append(self, sample: EntanglementSample) -> None:
        if self.samples and sample.t <= self.samples[-1].t:
            raise ValueError(f"Samples must be strictly increasing in t ({sample.t} after {self.samples[-1].t})")
        self.samples.append(sample)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def concurrences(self) -> np.ndarray:
        return np.array([s.concurrence for s in self.samples])

    @property
    def entropies(self) -> np.ndarray:
        return np.array([s.entropy for s in self.samples])

    @property
    def norms(self) -> np.ndarray:
        return np.array([s.norm for s in self.samples])

    def has_uniform_spacing(self, tol: float = 1e-9) -> bool:
        if len(self.samples) < 3:
            return True
        spacing = np.diff(self.times)
        return bool(np.max(np.abs(spacing - spacing[0])) <= tol)


@dataclass(frozen=True)
class PeakReport:
    t_peak: float
    c_peak: float
    interval_start: float
    interval_end: float
    threshold: float

    @property
    def interval_length(self) -> float:
        return self.interval_end - self.interval_start

    def describe(self) -> str:
        return (
            f"c_peak={self.c_peak:.6f} at t={self.t_peak:.4f}; "
            f"C>={self.threshold:g} on [{self.interval_start:.4f}, {self.interval_end:.4f}] "
            f"(length {self.interval_length:.4f})"
        )

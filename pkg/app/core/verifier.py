"""
Verification Module
Invariant suite behind `main.py verify`. Every check returns a short
detail string or raises; the suite records per-check status and timing.
"""

from __future__ import annotations

import logging
import math
import tempfile
import time
from contextlib import contextmanager
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional

import numpy as np
from scipy.stats import unitary_group

import config
from app.core import tensor
from app.core.exporter import Exporter
from app.core.propagator import calibrate_step, evolve, propagate, step_grid
from app.physics import analysis, observables
from app.physics.hamiltonian import (
    HamiltonianBuilder,
    build_initial_state,
    build_static_hamiltonian,
    drive_value,
    number_operator,
)
from app.physics.models import (
    DRIVE_KINDS,
    DriveWaveform,
    EntanglementSample,
    EvolutionTrace,
    InitialState,
    ModelParams,
    PropagatorConfig,
)
from app.steppers import LaguerreStepper, OracleStepper, laguerre_step, oracle_step

logger = logging.getLogger(__name__)

FAULTS = ("spin-flip",)


class CheckFailed(AssertionError):
    pass


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise CheckFailed(message)


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str
    seconds: float

    @property
    def label(self) -> str:
        return f"{self.suite}/{self.name}"


@dataclass
class Check:
    suite: str
    name: str
    func: Callable[["VerificationContext"], str]
    quick: bool = True


class VerificationContext:
    """Shared state for one suite run: sizes, seeded rng and a cached calibration."""

    def __init__(self, quick: bool, seed: int = 0):
        self.quick = quick
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.params = ModelParams()
        self.drive = DriveWaveform()
        self._calibrated: Dict[tuple, PropagatorConfig] = {}

    def size(self, quick: int, full: int) -> int:
        return quick if self.quick else full

    def calibrated(self, drive: Optional[DriveWaveform] = None, alpha: float = 0.0) -> PropagatorConfig:
        drive = drive or self.drive
        key = (drive, alpha)
        if key not in self._calibrated:
            self._calibrated[key] = calibrate_step(
                self.params, drive, PropagatorConfig(alpha=alpha), seed=self.seed
            )
        return self._calibrated[key]


# ---------------------------------------------------------------- tensor


def check_kron_associativity(ctx: VerificationContext) -> str:
    worst = 0.0
    for _ in range(20):
        a, b, c = (tensor.random_hermitian(int(d), ctx.rng) for d in ctx.rng.integers(1, 5, size=3))
        left = tensor.kron(tensor.kron(a, b), c)
        right = tensor.kron(a, tensor.kron(b, c))
        worst = max(worst, float(np.max(np.abs(left - right))))
    _require(worst <= 1e-14, f"max deviation {worst:.3e}")
    return f"max deviation {worst:.1e}"


def check_eigen_reconstruction(ctx: VerificationContext) -> str:
    worst = 0.0
    for dim in (2, 8, 48, ctx.size(64, 128)):
        m = tensor.random_hermitian(dim, ctx.rng)
        eigenvalues, vectors = tensor.hermitian_eigendecompose(m)
        residual = float(np.max(np.abs((vectors * eigenvalues) @ vectors.conj().T - m)))
        worst = max(worst, residual)
    _require(worst <= 1e-10, f"residual {worst:.3e}")
    return f"residual {worst:.1e}"


def check_matvec_linearity(ctx: VerificationContext) -> str:
    m = tensor.random_hermitian(48, ctx.rng)
    u, v = tensor.random_state(48, ctx.rng), tensor.random_state(48, ctx.rng)
    a, b = 0.7 - 0.2j, -1.3 + 0.4j
    error = float(np.max(np.abs(tensor.matvec(m, a * u + b * v) - (a * tensor.matvec(m, u) + b * tensor.matvec(m, v)))))
    _require(error <= 1e-12, f"deviation {error:.3e}")
    return f"deviation {error:.1e}"


def check_layout_round_trip(ctx: VerificationContext) -> str:
    layout = tensor.SpaceLayout.qubits_and_boson(ctx.params.n_fock)
    bad = [i for i in range(layout.total_dim) if layout.flatten(layout.unflatten(i)) != i]
    _require(not bad, f"indices failing round-trip: {bad[:5]}")
    return f"{layout.total_dim} indices"


# ---------------------------------------------------------------- model


def _waveforms() -> List[DriveWaveform]:
    return [DriveWaveform(kind=kind) for kind in DRIVE_KINDS]


def check_hamiltonian_hermiticity(ctx: VerificationContext) -> str:
    count = 0
    for w in _waveforms():
        builder = HamiltonianBuilder(ctx.params, w)
        for t in ctx.rng.uniform(0.0, 100.0, size=20):
            h = builder.at(float(t))
            _require(np.array_equal(h, h.conj().T), f"{w.kind} H({t:.3f}) is not exactly Hermitian")
            count += 1
    return f"{count} Hamiltonians exact"


def check_drive_periodicity(ctx: VerificationContext) -> str:
    worst = 0.0
    for w in _waveforms():
        if not w.is_periodic:
            continue
        for t in ctx.rng.uniform(0.0, 4.0 * w.period, size=1000):
            worst = max(worst, abs(drive_value(w, float(t) + w.period) - drive_value(w, float(t))))
    _require(worst <= 1e-14, f"max |F(t+P) - F(t)| = {worst:.3e}")
    return f"max deviation {worst:.1e}"


def check_boson_number_commutes(ctx: VerificationContext) -> str:
    params = replace(ctx.params, g=0.0)
    n_b = tensor.embed(number_operator(params.n_fock), 2, tensor.SpaceLayout.qubits_and_boson(params.n_fock))
    worst = 0.0
    for w in _waveforms():
        builder = HamiltonianBuilder(params, w)
        for t in ctx.rng.uniform(0.0, 50.0, size=5):
            h = builder.at(float(t))
            worst = max(worst, float(np.max(np.abs(h @ n_b - n_b @ h))))
    _require(worst <= 1e-12, f"max |[H, N_b]| = {worst:.3e}")
    return f"max commutator {worst:.1e}"


def check_drive_bound(ctx: VerificationContext) -> str:
    for w in _waveforms():
        values = [abs(drive_value(w, float(t))) for t in ctx.rng.uniform(0.0, 1000.0, size=1000)]
        _require(max(values) <= w.amplitude + 1e-14, f"{w.kind} exceeds amplitude: {max(values)}")
    return "all waveforms bounded"


# ---------------------------------------------------------------- propagator


def check_unitarity(ctx: VerificationContext) -> str:
    cfg = ctx.calibrated()
    n_steps = ctx.size(2_000, 100_000)
    builder = HamiltonianBuilder(ctx.params, ctx.drive)
    stepper = LaguerreStepper(cfg)
    psi = propagate(builder, build_initial_state(InitialState(), ctx.params.n_fock), stepper, cfg.dt, n_steps)
    drift = abs(float(np.linalg.norm(psi)) - 1.0)
    _require(drift <= 1e-6, f"norm drift {drift:.3e} after {n_steps} steps")
    _require(stepper.last_report.norm_drift <= 1e-10, f"single-step drift {stepper.last_report.norm_drift:.3e}")
    return f"drift {drift:.1e} after {n_steps} steps"


def check_oracle_time_independent(ctx: VerificationContext) -> str:
    cfg = ctx.calibrated()
    h = HamiltonianBuilder(ctx.params, ctx.drive).with_field(ctx.drive.amplitude)
    psi0 = tensor.random_state(h.shape[0], ctx.rng)
    n = 50
    psi = psi0
    for _ in range(n):
        psi, _ = laguerre_step(h, psi, cfg)
    error = float(np.max(np.abs(psi - oracle_step(h, psi0, n * cfg.dt))))
    _require(error <= n * 1e-9, f"error {error:.3e} after {n} steps")
    return f"error {error:.1e} after {n} steps"


def check_energy_conservation(ctx: VerificationContext) -> str:
    undriven = DriveWaveform.undriven()
    cfg = ctx.calibrated(undriven)
    t_end = ctx.size(100.0, 1000.0)
    n_steps, dt = step_grid(t_end, cfg.dt, 1)
    builder = HamiltonianBuilder(ctx.params, undriven)
    psi0 = build_initial_state(InitialState(), ctx.params.n_fock)
    psi = propagate(builder, psi0, LaguerreStepper(cfg), dt, n_steps)
    h0 = build_static_hamiltonian(ctx.params)
    drift = abs(observables.energy(h0, psi) - observables.energy(h0, psi0))
    _require(drift <= 1e-6, f"energy drift {drift:.3e} at t={t_end:g}")
    return f"energy drift {drift:.1e} at t={t_end:g}"


def check_shift_scale_invariance(ctx: VerificationContext) -> str:
    cfg = ctx.calibrated()
    h = HamiltonianBuilder(ctx.params, ctx.drive).with_field(-ctx.drive.amplitude)
    psi0 = tensor.random_state(h.shape[0], ctx.rng)
    plain = replace(cfg, shift=0.0, scale=1.0, dt=cfg.dt / 4)

    a = b = psi0
    for _ in range(16):
        a, _ = laguerre_step(h, a, cfg, enforce_tail=False)
    for _ in range(64):
        b, _ = laguerre_step(h, b, plain, enforce_tail=False)
    overlap = abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))
    _require(overlap >= 1.0 - 1e-8, f"|<a|b>| = {overlap:.12f}")
    return f"1 - |<a|b>| = {1.0 - overlap:.1e}"


def check_alpha_robustness(ctx: VerificationContext) -> str:
    t_end = ctx.size(10.0, 100.0)
    configs = [ctx.calibrated(alpha=alpha) for alpha in (0.0, 1.0, 2.0)]
    # one shared grid so the traces are comparable sample by sample
    dt = min(cfg.dt for cfg in configs)
    traces = [evolve(ctx.params, ctx.drive, InitialState(), replace(cfg, dt=dt), t_end) for cfg in configs]
    worst = max(analysis.trace_compare(traces[0], other) for other in traces[1:])
    _require(worst <= 1e-6, f"max |dC| = {worst:.3e}")
    return f"max |dC| {worst:.1e} over t={t_end:g}"


def check_oracle_trace(ctx: VerificationContext) -> str:
    cfg = ctx.calibrated()
    t_end = ctx.size(10.0, 100.0)
    start = time.perf_counter()
    laguerre = evolve(ctx.params, ctx.drive, InitialState(), cfg, t_end, stepper="laguerre")
    elapsed = time.perf_counter() - start
    oracle = evolve(ctx.params, ctx.drive, InitialState(), cfg, t_end, stepper="oracle")
    difference = analysis.trace_compare(laguerre, oracle)
    _require(difference <= 1e-6, f"max |dC| = {difference:.3e}")
    return f"max |dC| {difference:.1e}, laguerre {elapsed:.2f}s"


def check_midpoint_order(ctx: VerificationContext) -> str:
    t_end = 100.0

    def run(dt: float, sample_every: int) -> EvolutionTrace:
        cfg = PropagatorConfig(dt=dt)
        return evolve(ctx.params, ctx.drive, InitialState(), cfg, t_end, sample_every, stepper="oracle")

    reference = run(0.025, 40)
    coarse = analysis.trace_compare(run(0.1, 10), reference)
    fine = analysis.trace_compare(run(0.05, 20), reference)
    ratio = coarse / fine if fine > 0 else math.inf
    _require(3.0 <= ratio <= 7.0, f"deviation ratio {ratio:.2f} (coarse {coarse:.2e}, fine {fine:.2e})")
    return f"deviation ratio {ratio:.2f}"


# ---------------------------------------------------------------- observables


BELL = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / np.sqrt(2.0)


def _pure(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


def _random_density(ctx: VerificationContext, k: int) -> np.ndarray:
    m = ctx.rng.standard_normal((4, k)) + 1j * ctx.rng.standard_normal((4, k))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real


def check_bell_and_product(ctx: VerificationContext) -> str:
    c_bell = observables.concurrence(_pure(BELL))
    product = np.kron(np.array([0.6, 0.8]), np.array([1.0, 1.0j]) / np.sqrt(2.0)).astype(complex)
    c_product = observables.concurrence(_pure(product))
    _require(abs(c_bell - 1.0) <= 1e-12, f"Bell state gives C = {c_bell!r}")
    _require(abs(c_product) <= 1e-12, f"product state gives C = {c_product!r}")
    return "Bell 1, product 0"


def check_werner_family(ctx: VerificationContext) -> str:
    worst = 0.0
    for p in np.linspace(0.0, 1.0, 11):
        rho = p * _pure(BELL) + (1.0 - p) * np.eye(4) / 4.0
        expected = max(0.0, (3.0 * p - 1.0) / 2.0)
        worst = max(
            worst,
            abs(observables.concurrence(rho) - expected),
            abs(observables.concurrence_reference(rho) - expected),
        )
    _require(worst <= 1e-10, f"max deviation {worst:.3e}")
    return f"max deviation {worst:.1e}"


def check_concurrence_bounds(ctx: VerificationContext) -> str:
    count = ctx.size(500, 10_000)
    for i in range(count):
        c = observables.concurrence(_random_density(ctx, int(ctx.rng.integers(1, 5))))
        _require(0.0 <= c <= 1.0, f"sample {i}: C = {c}")
    return f"{count} random states"


def check_local_unitary_invariance(ctx: VerificationContext) -> str:
    worst = 0.0
    for _ in range(ctx.size(20, 200)):
        rho = _random_density(ctx, int(ctx.rng.integers(1, 5)))
        u = np.kron(
            unitary_group.rvs(2, random_state=ctx.rng),
            unitary_group.rvs(2, random_state=ctx.rng),
        )
        rotated = u @ rho @ u.conj().T
        rotated = 0.5 * (rotated + rotated.conj().T)
        worst = max(worst, abs(observables.concurrence(rotated) - observables.concurrence(rho)))
    _require(worst <= 1e-10, f"max deviation {worst:.3e}")
    return f"max deviation {worst:.1e}"


def check_hermitian_form(ctx: VerificationContext) -> str:
    worst = 0.0
    for _ in range(ctx.size(50, 500)):
        rho = _random_density(ctx, 4)
        spectrum = observables.concurrence_spectrum(rho)
        product = np.linalg.eigvals(rho @ observables.spin_flip(rho))
        reference = np.sort(np.sqrt(np.abs(product.real)))[::-1]
        worst = max(worst, float(np.max(np.abs(spectrum - reference))))
    _require(worst <= 1e-8, f"max eigenvalue deviation {worst:.3e}")
    return f"max deviation {worst:.1e}"


def check_trace_preservation(ctx: VerificationContext) -> str:
    layout = tensor.SpaceLayout.qubits_and_boson(ctx.params.n_fock)
    worst = 0.0
    for scale in (0.3, 1.0, 1.7):
        psi = scale * tensor.random_state(layout.total_dim, ctx.rng)
        rho = observables.reduced_density_matrix(psi, layout)
        worst = max(worst, abs(float(np.trace(rho).real) - float(np.vdot(psi, psi).real)))
    _require(worst <= 1e-12, f"trace deviation {worst:.3e}")
    return f"deviation {worst:.1e}"


def check_purity_consistency(ctx: VerificationContext) -> str:
    cfg = ctx.calibrated()
    t_end = ctx.size(20.0, 200.0)
    n_steps, dt = step_grid(t_end, cfg.dt, 100)
    builder = HamiltonianBuilder(ctx.params, ctx.drive)
    worst = [0.0]

    def compare(psi: np.ndarray, t: float) -> None:
        unit = tensor.normalized(psi)
        s_qubits = observables.von_neumann_entropy(observables.reduced_density_matrix(unit, builder.layout))
        s_boson = observables.von_neumann_entropy(observables.boson_density_matrix(unit, builder.layout))
        worst[0] = max(worst[0], abs(s_qubits - s_boson))

    psi0 = build_initial_state(InitialState(), ctx.params.n_fock)
    propagate(builder, psi0, LaguerreStepper(cfg), dt, n_steps, sample_every=n_steps // 100, on_sample=compare)
    _require(worst[0] <= 1e-8, f"max |S12 - Sb| = {worst[0]:.3e}")
    return f"max |S12 - Sb| {worst[0]:.1e} at 100 times"


# ---------------------------------------------------------------- analysis


def _sine_squared_trace(spacing: float) -> EvolutionTrace:
    trace = EvolutionTrace()
    for t in np.arange(0.0, 100.0 + spacing / 2, spacing):
        c = float(np.sin(np.pi * t / 100.0) ** 2)
        trace.append(EntanglementSample(float(t), c, 0.0, 1.0, 0.0, (0.0, 1.0, 0.0, 0.0)))
    return trace


def check_peak_interval(ctx: VerificationContext) -> str:
    spacing = 0.5
    report = analysis.first_envelope_peak(_sine_squared_trace(spacing), 0.5, bridge=0.0)
    _require(report is not None, "no peak found")
    _require(abs(report.t_peak - 50.0) <= 1e-9 and abs(report.c_peak - 1.0) <= 1e-12, report.describe())
    slope = np.pi / 100.0
    bound = slope * spacing * spacing
    for edge in (report.interval_start, report.interval_end):
        value = float(np.sin(np.pi * edge / 100.0) ** 2)
        _require(abs(value - 0.5) <= bound, f"C({edge:.4f}) = {value:.6f}")

    refined = analysis.first_envelope_peak(_sine_squared_trace(spacing / 2), 0.5, bridge=0.0)
    change = abs(refined.interval_length - report.interval_length)
    _require(change < 2 * spacing, f"interval changed by {change:.3e} on refinement")
    return f"interval [{report.interval_start:.4f}, {report.interval_end:.4f}]"


# ---------------------------------------------------------------- output


def check_csv_determinism(ctx: VerificationContext) -> str:
    cfg = ctx.calibrated()
    with tempfile.TemporaryDirectory() as tmp:
        paths = [Path(tmp) / f"run_{i}.csv" for i in range(2)]
        for path in paths:
            trace = evolve(ctx.params, ctx.drive, InitialState(), cfg, 5.0, single_qubit=True)
            Exporter.export_trace_csv(trace, path, extra_columns=True)
        _require(paths[0].read_bytes() == paths[1].read_bytes(), "repeated runs wrote different CSV bytes")

        restored = Exporter.read_trace_csv(paths[0])
        error = float(np.max(np.abs(restored.concurrences - trace.concurrences)))
        _require(len(restored) == len(trace) and error <= 1e-11, f"round-trip error {error:.3e}")
    return f"{len(trace)} rows byte-identical"


CHECKS: List[Check] = [
    Check("tensor", "kron_associativity", check_kron_associativity),
    Check("tensor", "eigen_reconstruction", check_eigen_reconstruction),
    Check("tensor", "matvec_linearity", check_matvec_linearity),
    Check("tensor", "layout_round_trip", check_layout_round_trip),
    Check("model", "hermiticity", check_hamiltonian_hermiticity),
    Check("model", "periodicity", check_drive_periodicity),
    Check("model", "excitation_structure", check_boson_number_commutes),
    Check("model", "waveform_bound", check_drive_bound),
    Check("propagator", "unitarity", check_unitarity),
    Check("propagator", "oracle_time_independent", check_oracle_time_independent),
    Check("propagator", "energy_conservation", check_energy_conservation),
    Check("propagator", "shift_scale_invariance", check_shift_scale_invariance),
    Check("propagator", "oracle_trace", check_oracle_trace),
    Check("propagator", "alpha_robustness", check_alpha_robustness, quick=False),
    Check("propagator", "midpoint_order", check_midpoint_order, quick=False),
    Check("concurrence", "bell_and_product", check_bell_and_product),
    Check("concurrence", "werner_family", check_werner_family),
    Check("concurrence", "bounds", check_concurrence_bounds),
    Check("concurrence", "local_unitary_invariance", check_local_unitary_invariance),
    Check("concurrence", "hermitian_form", check_hermitian_form),
    Check("observables", "trace_preservation", check_trace_preservation),
    Check("observables", "purity_consistency", check_purity_consistency),
    Check("analysis", "peak_interval", check_peak_interval),
    Check("output", "csv_determinism", check_csv_determinism),
]


@contextmanager
def inject_fault(fault: Optional[str]) -> Iterator[None]:
    """
    Temporarily breaks a routine so the suite can prove it notices.

    Args:
        fault: None or one of FAULTS ("spin-flip" negates spin_flip)
    """
    if fault is None:
        yield
        return
    if fault not in FAULTS:
        raise ValueError(f"Unknown fault '{fault}', expected one of {FAULTS}")

    from unittest import mock

    original = observables.spin_flip
    logger.warning(f"Injecting fault: {fault}")
    with mock.patch.object(observables, "spin_flip", lambda rho: -original(rho)):
        yield


def run_suite(
    quick: bool = False,
    seed: int = 0,
    fault: Optional[str] = None,
    on_result: Optional[Callable[[CheckResult], None]] = None,
) -> List[CheckResult]:
    """
    Runs the invariant suite.

    Args:
        quick: Only the quick subset, with reduced sizes
        seed: Seed for all random inputs
        fault: Optional fault to inject for the duration of the run
        on_result: Called after each check

    Returns:
        One CheckResult per executed check
    """
    ctx = VerificationContext(quick=quick, seed=seed)
    selected = [c for c in CHECKS if c.quick or not quick]
    results: List[CheckResult] = []

    with inject_fault(fault):
        for check in selected:
            start = time.perf_counter()
            try:
                detail = check.func(ctx)
                passed = True
            except Exception as e:
                detail = f"{type(e).__name__}: {e}"
                passed = False
            result = CheckResult(check.suite, check.name, passed, detail, time.perf_counter() - start)
            logger.debug(f"{result.label}: {'pass' if passed else 'FAIL'} ({result.seconds:.2f}s)")
            results.append(result)
            if on_result is not None:
                on_result(result)

    return results


def format_result(result: CheckResult) -> str:
    status = "PASS" if result.passed else "FAIL"
    return f"[{status}] {result.label:<40} {result.seconds:7.2f}s  {result.detail}"

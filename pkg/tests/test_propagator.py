import numpy as np
import pytest

from app.core.errors import NumericFailureError, StepTooLargeError
from app.core.propagator import calibrate_step, evolve, make_stepper, propagate, spectral_bounds, step_grid
from app.physics.analysis import trace_compare
from app.physics.hamiltonian import HamiltonianBuilder, build_initial_state, build_static_hamiltonian
from app.physics.models import DriveWaveform, InitialState, ModelParams, PropagatorConfig
from app.physics.observables import energy
from app.steppers import BaseStepper, LaguerreStepper, OracleStepper


class NaNStepper(BaseStepper):
    """Fails after a fixed number of steps."""

    def __init__(self, fail_at: int):
        super().__init__("nan")
        self.fail_at = fail_at

    def step(self, h, psi, dt):
        self.steps_taken += 1
        if self.steps_taken > self.fail_at:
            return psi * np.nan
        return psi


def test_step_grid_lands_on_t_end():
    n_steps, dt = step_grid(10.0, 0.3, 4)
    assert n_steps % 4 == 0
    assert dt <= 0.3
    assert n_steps * dt == pytest.approx(10.0)

    assert step_grid(1.0, 0.125, 1) == (8, 0.125)
    with pytest.raises(ValueError):
        step_grid(-1.0, 0.1, 1)


def test_make_stepper():
    assert isinstance(make_stepper("laguerre", PropagatorConfig()), LaguerreStepper)
    assert isinstance(make_stepper("oracle", PropagatorConfig()), OracleStepper)
    with pytest.raises(ValueError):
        make_stepper("euler", PropagatorConfig())


def test_calibrated_dt_for_default_params(calibrated):
    assert 0.05 <= calibrated.dt <= 1.0
    assert calibrated.scale > 0
    assert calibrated.dt < 1.0


def test_calibration_uses_spectral_range(default_params, cosine_drive, calibrated):
    lowest, highest = spectral_bounds(HamiltonianBuilder(default_params, cosine_drive))
    assert calibrated.shift == pytest.approx(0.5 * (lowest + highest))
    assert calibrated.scale == pytest.approx(0.5 * (highest - lowest))


def test_calibration_of_zero_hamiltonian_keeps_initial_dt():
    params = ModelParams(epsilon=0.0, delta=0.0, omega=0.0, g=0.0)
    cfg = calibrate_step(params, DriveWaveform.undriven(), PropagatorConfig(dt=1.0))
    assert cfg.dt == 1.0


def test_doubling_energies_halves_dt(default_params, calibrated):
    doubled = calibrate_step(default_params.scaled(2.0), DriveWaveform(amplitude=0.96), PropagatorConfig())
    assert calibrated.dt / 4 <= doubled.dt <= calibrated.dt


def test_evolve_records_uniform_samples(default_params, cosine_drive, calibrated):
    trace = evolve(default_params, cosine_drive, InitialState(), calibrated, t_end=5.0, sample_every=2)
    assert trace.samples[0].t == 0.0
    assert trace.samples[-1].t == pytest.approx(5.0)
    assert trace.has_uniform_spacing()
    assert trace.samples[0].concurrence == pytest.approx(0.0, abs=1e-12)
    assert trace.params_echo["stepper"] == "laguerre"
    assert trace.params_echo["n_steps"] == 2 * (len(trace) - 1)
    assert np.max(np.abs(trace.norms - 1.0)) < 1e-9


def test_undriven_diagonal_model_never_entangles():
    params = ModelParams(g=0.0, delta=0.0)
    cfg = calibrate_step(params, DriveWaveform.undriven(), PropagatorConfig(dt=0.5))
    trace = evolve(params, DriveWaveform.undriven(), InitialState("01"), cfg, t_end=50.0)
    assert trace.samples[-1].t == pytest.approx(50.0)
    assert np.max(trace.concurrences) <= 1e-12


def test_laguerre_matches_oracle_trace(default_params, cosine_drive, calibrated):
    laguerre = evolve(default_params, cosine_drive, InitialState(), calibrated, 10.0, stepper="laguerre")
    oracle = evolve(default_params, cosine_drive, InitialState(), calibrated, 10.0, stepper="oracle")
    assert trace_compare(laguerre, oracle) <= 1e-7


def test_oversized_step_reports_failing_time(default_params, cosine_drive):
    with pytest.raises(StepTooLargeError) as info:
        evolve(default_params, cosine_drive, InitialState(), PropagatorConfig(dt=20.0), t_end=40.0)
    assert info.value.t == 0.0
    assert "t=0" in str(info.value)


def test_non_finite_state_reports_failing_time(default_params, cosine_drive):
    with pytest.raises(NumericFailureError) as info:
        evolve(default_params, cosine_drive, InitialState(), PropagatorConfig(dt=0.5), 5.0, stepper=NaNStepper(3))
    assert info.value.t == pytest.approx(1.5)


def test_energy_is_conserved_without_drive(default_params):
    undriven = DriveWaveform.undriven()
    cfg = calibrate_step(default_params, undriven, PropagatorConfig())
    n_steps, dt = step_grid(200.0, cfg.dt, 1)
    builder = HamiltonianBuilder(default_params, undriven)
    psi0 = build_initial_state(InitialState(), default_params.n_fock)
    psi = propagate(builder, psi0, LaguerreStepper(cfg), dt, n_steps)
    h0 = build_static_hamiltonian(default_params)
    assert abs(energy(h0, psi) - energy(h0, psi0)) <= 1e-6


def test_midpoint_sampling_is_second_order(default_params, cosine_drive):
    def run(dt, sample_every):
        return evolve(
            default_params, cosine_drive, InitialState(), PropagatorConfig(dt=dt), 100.0, sample_every, stepper="oracle"
        )

    reference = run(0.025, 40)
    coarse = trace_compare(run(0.1, 10), reference)
    fine = trace_compare(run(0.05, 20), reference)
    assert 3.0 <= coarse / fine <= 7.0


def test_left_sampling_differs_from_midpoint(default_params, cosine_drive):
    midpoint = evolve(default_params, cosine_drive, InitialState(), PropagatorConfig(dt=0.1), 50.0, stepper="oracle")
    left = evolve(
        default_params, cosine_drive, InitialState(), PropagatorConfig(dt=0.1, sampling="left"), 50.0, stepper="oracle"
    )
    assert trace_compare(midpoint, left) > 1e-6

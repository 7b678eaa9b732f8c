"""
Hamiltonian Module
Builds the static two-exciton + cavity Hamiltonian, the periodic drive
term and the initial product states.

Qubit basis convention: |0> is the sigma_z eigenvector with eigenvalue +1,
|1> the one with eigenvalue -1. Factor ordering is [qubit1, qubit2, boson].
"""

from __future__ import annotations

import math

import numpy as np

from app.core.tensor import ComplexMatrix, SpaceLayout, StateVector, kron_all
from app.physics.models import DriveWaveform, InitialState, ModelParams

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


def annihilation(n_fock: int) -> ComplexMatrix:
    """Truncated ladder operator a with a|n> = sqrt(n)|n-1>."""
    return np.diag(np.sqrt(np.arange(1, n_fock)), k=1).astype(complex)


def number_operator(n_fock: int) -> ComplexMatrix:
    return np.diag(np.arange(n_fock)).astype(complex)


def drive_value(w: DriveWaveform, t: float) -> float:
    """
    Value of the drive F(t).

    All periodic kinds are phase-aligned so that F(0) = A. The rectangular
    wave is +A on the first half of each period and -A on the second; the
    triangular wave falls linearly from A to -A at P/2 and rises back.

    Args:
        w: Drive waveform
        t: Time (>= 0)

    Returns:
        F(t)
    """
    if w.kind == "none":
        return 0.0

    phase = math.fmod(t, w.period) / w.period
    if phase < 0.0:
        phase += 1.0

    if w.kind == "cosine":
        return w.amplitude * math.cos(2.0 * math.pi * phase)
    if w.kind == "rectangular":
        return w.amplitude if phase < 0.5 else -w.amplitude
    # triangular
    if phase < 0.5:
        return w.amplitude * (1.0 - 4.0 * phase)
    return w.amplitude * (4.0 * phase - 3.0)


def build_static_hamiltonian(p: ModelParams) -> ComplexMatrix:
    """
    H0 = sum_i (-delta/2 sx_i + epsilon/2 sz_i) + omega (a^+ a + 1/2) + g sum_i (a + a^+) sx_i

    Args:
        p: Model parameters

    Returns:
        Hermitian matrix of dimension 4 * n_fock
    """
    n = p.n_fock
    id_b = np.eye(n, dtype=complex)
    a = annihilation(n)
    position = a + a.conj().T

    single_site = -0.5 * p.delta * SIGMA_X + 0.5 * p.epsilon * SIGMA_Z
    h = kron_all([single_site, IDENTITY_2, id_b])
    h = h + kron_all([IDENTITY_2, single_site, id_b])
    h = h + p.omega * kron_all([IDENTITY_2, IDENTITY_2, number_operator(n) + 0.5 * id_b])
    h = h + p.g * kron_all([SIGMA_X, IDENTITY_2, position])
    h = h + p.g * kron_all([IDENTITY_2, SIGMA_X, position])
    return h


def build_drive_operator(n_fock: int) -> ComplexMatrix:
    """sz_1 + sz_2 embedded in the composite space."""
    id_b = np.eye(n_fock, dtype=complex)
    return kron_all([SIGMA_Z, IDENTITY_2, id_b]) + kron_all([IDENTITY_2, SIGMA_Z, id_b])


def build_total_hamiltonian(p: ModelParams, w: DriveWaveform, t: float) -> ComplexMatrix:
    """H(t) = H0 + F(t) (sz_1 + sz_2)."""
    return build_static_hamiltonian(p) + drive_value(w, t) * build_drive_operator(p.n_fock)


def build_initial_state(s: InitialState, n_fock: int) -> StateVector:
    """
    Product state |q1 q2> ⊗ |0>_boson.

    Args:
        s: Initial qubit label
        n_fock: Boson truncation (>= 2)

    Returns:
        Normalized basis vector in [qubit1, qubit2, boson] ordering
    """
    if n_fock < 2:
        raise ValueError(f"n_fock must be >= 2, got {n_fock}")
    layout = SpaceLayout.qubits_and_boson(n_fock)
    psi = np.zeros(layout.total_dim, dtype=complex)
    q1, q2 = s.qubit_bits
    psi[layout.flatten((q1, q2, 0))] = 1.0
    return psi


class HamiltonianBuilder:
    """
    Caches H0 and the drive operator so H(t) costs one scaled matrix add.
    """

    def __init__(self, params: ModelParams, drive: DriveWaveform):
        """
        Initialize builder.

        Args:
            params: Model parameters
            drive: Drive waveform
        """
        self.params = params
        self.drive = drive
        self.layout = SpaceLayout.qubits_and_boson(params.n_fock)
        self.static = build_static_hamiltonian(params)
        self.drive_operator = build_drive_operator(params.n_fock)

    def at(self, t: float) -> ComplexMatrix:
        """Returns H(t)."""
        field = drive_value(self.drive, t)
        if field == 0.0:
            return self.static
        return self.static + field * self.drive_operator

    def with_field(self, field: float) -> ComplexMatrix:
        """H0 + field (sz_1 + sz_2) for a fixed field value."""
        return self.static + field * self.drive_operator

    def extreme_fields(self) -> tuple[float, ...]:
        """Field values at which the spectral extremes over one period are attained."""
        if not self.drive.is_periodic or self.drive.amplitude == 0.0:
            return (0.0,)
        a = abs(self.drive.amplitude)
        return (-a, a)

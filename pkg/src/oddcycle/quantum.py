"""Two-qubit density-matrix simulation of the entangled strategy.

Basis order is |00>, |01>, |10>, |11> with Alice's qubit first. Pauli Z is
diag(1, -1), so |0> is the +1 eigenstate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .game import Query, check_n, check_query, wins

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)

DEFAULT_PHASES = (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)


class StateError(ValueError):
    """A matrix failed the density-matrix checks."""


class TwoQubitState:
    """Validated 4x4 density matrix."""

    __slots__ = ("rho",)

    def __init__(self, rho):
        rho = np.array(rho, dtype=complex)
        if rho.shape != (4, 4):
            raise StateError(f"expected a 4x4 matrix, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise StateError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > TRACE_TOL:
            raise StateError(f"trace is {np.trace(rho).real!r}, expected 1")
        if np.linalg.eigvalsh(rho)[0] < -PSD_TOL:
            raise StateError("density matrix has a negative eigenvalue")
        rho.setflags(write=False)
        self.rho = rho

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))

    def fidelity_pure(self, psi) -> float:
        psi = np.asarray(psi, dtype=complex)
        return float(np.real(psi.conj() @ self.rho @ psi))

    def allclose(self, other: "TwoQubitState", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.rho, other.rho, rtol=0, atol=atol))

    def __repr__(self):
        return f"TwoQubitState({np.array2string(self.rho, precision=4)})"


@dataclass(frozen=True)
class HeraldPattern:
    gamma: int
    phase_table: tuple[float, ...] = DEFAULT_PHASES

    def __post_init__(self):
        if len(self.phase_table) != 4:
            raise ValueError("phase table needs exactly four entries")
        for phase in self.phase_table:
            if not 0.0 <= phase < 2 * math.pi:
                raise ValueError(f"herald phase {phase} outside [0, 2pi)")
        if self.gamma not in (0, 1, 2, 3):
            raise ValueError(f"herald pattern gamma must be in 0..3, got {self.gamma}")

    @property
    def phase(self) -> float:
        return self.phase_table[self.gamma]


@dataclass(frozen=True)
class MeasurementAngles:
    alpha_s: float
    beta_t: float


@dataclass(frozen=True)
class NoiseModel:
    """Werner visibility plus a symmetric per-qubit readout flip."""

    visibility: float = 1.0
    readout_error: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError(f"visibility must lie in [0, 1], got {self.visibility}")
        if not 0.0 <= self.readout_error < 0.5:
            raise ValueError(f"readout error must lie in [0, 0.5), got {self.readout_error}")

    @property
    def ideal(self) -> bool:
        return self.visibility == 1.0 and self.readout_error == 0.0


IDEAL = NoiseModel()


@dataclass(frozen=True)
class OutcomePair:
    a: int
    b: int


def bell_state(theta: float) -> TwoQubitState:
    """(|01> + e^{i theta}|10>)/sqrt(2) as a density matrix."""
    psi = np.zeros(4, dtype=complex)
    psi[1] = 1 / math.sqrt(2)
    psi[2] = np.exp(1j * theta) / math.sqrt(2)
    return TwoQubitState(np.outer(psi, psi.conj()))


PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2)


def maximally_mixed() -> TwoQubitState:
    return TwoQubitState(np.eye(4) / 4)


def conjugate(state: TwoQubitState, u) -> TwoQubitState:
    return TwoQubitState(u @ state.rho @ u.conj().T)


def phase_gate(phase: float):
    """Bob's herald correction gate.

    Written exp(-i Z phase/2) with Z = diag(1, -1); under the opposite sign
    convention for Z this is exp(+i Z phase/2). Either way it maps
    (|01> + e^{i phase}|10>) onto |01> + |10> up to a global phase.
    """
    return np.diag([np.exp(-0.5j * phase), np.exp(0.5j * phase)])


def phase_correction(state: TwoQubitState, herald: HeraldPattern) -> TwoQubitState:
    return conjugate(state, np.kron(I2, phase_gate(herald.phase)))


def alice_angle(n: int, s: int) -> float:
    return math.pi * s * (n - 1) / n - math.pi / (2 * n)


def bob_angle(n: int, t: int) -> float:
    return -math.pi * t * (n - 1) / n


def angles(n: int, q: Query) -> MeasurementAngles:
    check_query(q, check_n(n))
    return MeasurementAngles(alice_angle(n, q.s), bob_angle(n, q.t))


def ry(theta: float):
    return math.cos(theta / 2) * I2 - 1j * math.sin(theta / 2) * Y


def rotation(axis, theta: float):
    """exp(-i theta/2 axis) for a unit Pauli combination ``axis``."""
    return math.cos(theta / 2) * I2 - 1j * math.sin(theta / 2) * axis


def compile_pulse_sequence(theta: float):
    """Two pi/2 pulses realising ry(theta) before a Z-basis readout.

    The first pulse rotates about X; the second about the equatorial axis at
    azimuth pi - theta. Their product equals rz(-theta) @ ry(theta), so Z
    statistics match ry(theta) exactly while the unitaries themselves differ
    by a diagonal phase applied just before measurement.
    """
    phi = math.pi - theta
    first = rotation(X, math.pi / 2)
    second = rotation(math.cos(phi) * X + math.sin(phi) * Y, math.pi / 2)
    return first, second


def compose_pulses(first, second):
    return second @ first


def apply_strategy(state: TwoQubitState, m: MeasurementAngles) -> TwoQubitState:
    return conjugate(state, np.kron(ry(m.alpha_s), ry(m.beta_t)))


def outcome_distribution(state: TwoQubitState):
    """Born probabilities as a 2x2 array indexed ``[m_A, m_B]``."""
    probs = np.real(np.diag(state.rho)).copy()
    if probs.min() < -PSD_TOL:
        raise StateError("negative Born probability")
    probs = np.clip(probs, 0.0, None)
    return probs.reshape(2, 2)


def to_outputs(m_a: int, m_b: int) -> OutcomePair:
    return OutcomePair(1 - m_a, m_b)


def apply_noise(state: TwoQubitState, noise: NoiseModel) -> TwoQubitState:
    """Werner mixing; readout flips are applied to outcome distributions."""
    if noise.visibility == 1.0:
        return state
    v = noise.visibility
    return TwoQubitState(v * state.rho + (1 - v) * np.eye(4) / 4)


def apply_readout(dist, readout_error: float):
    """Fold independent symmetric bit flips into a 2x2 outcome distribution."""
    if readout_error == 0.0:
        return dist
    e = readout_error
    flip = np.array([[1 - e, e], [e, 1 - e]])
    return flip.T @ dist @ flip


def prepared_state(gamma: int | None, noise: NoiseModel = IDEAL, *, correct: bool = True,
                   phase_table: tuple[float, ...] = DEFAULT_PHASES) -> TwoQubitState:
    """Heralded state after noise and (optionally) Bob's phase correction.

    ``gamma=None`` means the ideal Psi+ with no herald phase.
    """
    return _prepared_state(gamma, noise, correct, tuple(phase_table))


@lru_cache(maxsize=256)
def _prepared_state(gamma, noise, correct, phase_table):
    if gamma is None:
        return apply_noise(bell_state(0.0), noise)
    herald = HeraldPattern(gamma, phase_table)
    state = apply_noise(bell_state(herald.phase), noise)
    if correct:
        state = phase_correction(state, herald)
    return state


def joint_distribution(state: TwoQubitState, alpha: float, beta: float, readout_error: float = 0.0):
    """Measurement distribution over (m_A, m_B) via the Born kernel, flattened 00,01,10,11."""
    probs = kernels.born_probabilities(np.ascontiguousarray(state.rho.real), alpha, beta)
    probs = np.clip(probs, 0.0, None)
    if readout_error:
        probs = apply_readout(probs.reshape(2, 2), readout_error).ravel()
    return probs


def output_distribution(state: TwoQubitState, alpha: float, beta: float, readout_error: float = 0.0):
    """Distribution over the players' output bits (a, b), flattened 00,01,10,11."""
    m = joint_distribution(state, alpha, beta, readout_error).reshape(2, 2)
    # a = 1 - m_A swaps Alice's rows
    return m[::-1, :].ravel()


def win_probability_exact(n: int, q: Query, noise: NoiseModel = IDEAL, *, gamma: int | None = None,
                          correct: bool = True, phase_table: tuple[float, ...] = DEFAULT_PHASES) -> float:
    """Exact win probability of one query through the full matrix pipeline."""
    state = prepared_state(gamma, noise, correct=correct, phase_table=phase_table)
    measured = apply_strategy(state, angles(n, q))
    dist = apply_readout(outcome_distribution(measured), noise.readout_error)
    total = 0.0
    for m_a in (0, 1):
        for m_b in (0, 1):
            out = to_outputs(m_a, m_b)
            if wins(q, out.a, out.b):
                total += dist[m_a, m_b]
    return float(total)


def omega_q(n: int) -> float:
    check_n(n)
    return math.cos(math.pi / (4 * n)) ** 2


def degraded_win_probability(ideal: float, noise: NoiseModel) -> float:
    """Closed form of the noise model acting on an ideal win probability."""
    w = noise.visibility * ideal + (1 - noise.visibility) / 2
    e = noise.readout_error
    odd = 2 * e * (1 - e)
    return w * (1 - odd) + (1 - w) * odd


def sample_round(rng: np.random.Generator, n: int, q: Query, noise: NoiseModel = IDEAL, *,
                 gamma: int | None = None, correct: bool = True) -> OutcomePair:
    """Draw one round's outputs from the exact distribution."""
    m = angles(n, q)
    state = prepared_state(gamma, noise, correct=correct)
    probs = joint_distribution(state, m.alpha_s, m.beta_t, noise.readout_error)
    k = kernels.pick_outcome(probs, rng.random())
    return to_outputs(k >> 1, k & 1)

"""State tomography with readout correction and physical-state projection.

Each of the 15 non-identity two-qubit Pauli operators is measured in its own
setting: single-qubit pre-rotations map it onto the Z basis, outcome
frequencies are corrected with R^-1, and the signed sum gives the
expectation value. The linear-inversion estimate is then projected onto the
closest trace-one PSD matrix in Hilbert-Schmidt distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from numpy.typing import ArrayLike
from scipy.linalg import eigh

from .errors import InvalidArgumentError
from .gates import CANONICAL, DEFAULT_DURATIONS, Conventions, Gate, GateDurations, GateSequence, Target
from .noise import NOISELESS, NoiseParams, evolve
from .qmat import (
    REGISTER_DIM,
    ComplexMatrix,
    DensityMatrix,
    PauliLabel,
    PureState,
    as_matrix,
    format_matrix,
    iter_bits,
    hilbert_schmidt_distance,
    pauli_labels,
    pauli_operator,
    state_fidelity,
)
from .readout import ReadoutMatrix, correct_distribution, outcome_distribution, sample_shots
from .rng import derive_seed

ESTIMATE_SLACK = 0.2
RAW_TOL = 1e-8
DEFAULT_TOMO_SHOTS = 10_000


@dataclass(frozen=True)
class PauliEstimates:
    """Estimated expectation values of the extended Pauli set.

    ``shots_per_setting`` is ``None`` for the exact-distribution path.
    """

    values: Mapping[PauliLabel, float]
    shots_per_setting: int | None = None

    def __post_init__(self) -> None:
        values = _complete_estimates(self.values)
        for label, value in values.items():
            if abs(value) > 1.0 + ESTIMATE_SLACK:
                raise InvalidArgumentError(f"<{label}> = {value!r} is outside [-1.2, 1.2]")
        object.__setattr__(self, "values", values)

    def __getitem__(self, label: PauliLabel) -> float:
        return self.values[label]


def _complete_estimates(values: Mapping[PauliLabel, float]) -> dict[PauliLabel, float]:
    expected = set(pauli_labels())
    given = set(values)
    missing = expected - given
    if missing:
        names = ", ".join(sorted(str(m) for m in missing))
        raise InvalidArgumentError(f"missing Pauli estimates: {names}")
    extra = given - expected
    if extra:
        raise InvalidArgumentError(f"unexpected Pauli labels: {sorted(str(e) for e in extra)}")
    return {label: float(values[label]) for label in pauli_labels()}


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    raw: ComplexMatrix = field(repr=False)
    physical: DensityMatrix = field(repr=False)
    distance_moved: float = 0.0

    def to_text(self, reference: PureState | None, shots: int | None, seed: int) -> str:
        fidelity = state_fidelity(self.physical, reference) if reference is not None else float("nan")
        shots_text = "exact" if shots is None else str(shots)
        return (
            "# raw\n"
            + format_matrix(self.raw)
            + "# physical\n"
            + format_matrix(self.physical.entries)
            + f"fidelity={fidelity:.6g} distance_moved={self.distance_moved:.6g} "
            f"shots={shots_text} seed={seed}\n"
        )


# ---------- measurement settings ----------


def prerotation_sequence(
    label: PauliLabel,
    conventions: Conventions = CANONICAL,
    durations: GateDurations = DEFAULT_DURATIONS,
) -> GateSequence:
    """Rotations that turn a measurement of ``label`` into a Z-basis readout.

    X is brought to Z by a -pi/2 turn about Y, Y by a +pi/2 turn about X
    (physical angles; the gate angle absorbs the rotation sign).
    """

    sign = conventions.rotation_sign
    gates = []
    for target, letter in ((Target.I, label.first), (Target.II, label.second)):
        if letter == "X":
            gates.append(Gate.rotation("Y", target, -sign * math.pi / 2, durations))
        elif letter == "Y":
            gates.append(Gate.rotation("X", target, sign * math.pi / 2, durations))
    return GateSequence.of(gates)


def estimate_from_distribution(label: PauliLabel, probs: ArrayLike) -> float:
    """Signed sum of outcome probabilities: bit 0 -> +1, bit 1 -> -1 per measured factor."""

    probs = np.asarray(probs, dtype=float)
    value = 0.0
    for index, p in enumerate(probs):
        a, b = iter_bits(index)
        sign = 1
        if label.first != "I" and a:
            sign = -sign
        if label.second != "I" and b:
            sign = -sign
        value += sign * p
    return float(value)


def simulate_pauli_estimates(
    rho: DensityMatrix,
    R: ReadoutMatrix,
    shots: int | None,
    seed: int,
    conventions: Conventions = CANONICAL,
    noise: NoiseParams = NOISELESS,
    *,
    durations: GateDurations = DEFAULT_DURATIONS,
    ideal_prerotations: bool = False,
) -> PauliEstimates:
    """Simulated finite-shot (or exact, ``shots=None``) Pauli-set measurement.

    Setting ``k`` draws from ``derive_seed(seed, k)`` so settings are
    independent of evaluation order.
    """

    if shots is not None and shots < 1:
        raise InvalidArgumentError("shots per setting must be >= 1")
    pulse_noise = NOISELESS if ideal_prerotations else noise
    values: dict[PauliLabel, float] = {}
    for k, label in enumerate(pauli_labels()):
        rotated = evolve(rho, prerotation_sequence(label, conventions, durations), pulse_noise, conventions)
        q = outcome_distribution(rotated, R)
        if shots is None:
            frequencies = q
        else:
            frequencies = sample_shots(q, shots, derive_seed(seed, k)) / shots
        value = estimate_from_distribution(label, correct_distribution(frequencies, R))
        # only reachable with a handful of shots per setting
        values[label] = float(np.clip(value, -1.0 - ESTIMATE_SLACK, 1.0 + ESTIMATE_SLACK))
    return PauliEstimates(values, shots)


# ---------- reconstruction ----------


def linear_inversion(est: PauliEstimates | Mapping[PauliLabel, float]) -> ComplexMatrix:
    """(1/4)(I + sum_P <P> P); Hermitian with unit trace by construction."""

    values = est.values if isinstance(est, PauliEstimates) else _complete_estimates(est)
    raw = np.eye(REGISTER_DIM, dtype=complex)
    for label, value in values.items():
        raw = raw + value * pauli_operator(label)
    return raw / REGISTER_DIM


def _simplex_eigenvalues(eigenvalues: np.ndarray) -> np.ndarray:
    """Closest point of the probability simplex for a trace-one spectrum.

    Repeatedly zero the most negative value and spread it evenly over the
    values still in play.
    """

    lam = np.array(eigenvalues, dtype=float)
    lam += (1.0 - lam.sum()) / lam.size
    active = np.ones(lam.size, dtype=bool)
    while lam[active].min() < 0.0:
        worst = np.flatnonzero(active)[np.argmin(lam[active])]
        excess = lam[worst]
        lam[worst] = 0.0
        active[worst] = False
        lam[active] += excess / active.sum()
    return lam


def project_to_physical(raw: ArrayLike) -> ReconstructionResult:
    raw = as_matrix(raw, REGISTER_DIM)
    if np.max(np.abs(raw - raw.conj().T)) > RAW_TOL:
        raise InvalidArgumentError("raw estimate is not Hermitian")
    if abs(np.trace(raw) - 1.0) > RAW_TOL:
        raise InvalidArgumentError(f"raw estimate has trace {np.trace(raw)!r}, expected 1")
    herm = (raw + raw.conj().T) / 2
    eigenvalues, eigenvectors = eigh(herm)
    if eigenvalues.min() >= 0.0:
        physical = DensityMatrix.hermitized(herm / np.trace(herm).real)
    else:
        lam = _simplex_eigenvalues(eigenvalues)
        physical = DensityMatrix.hermitized((eigenvectors * lam) @ eigenvectors.conj().T)
    return ReconstructionResult(raw, physical, hilbert_schmidt_distance(raw, physical.entries))


def reconstruct(
    rho_true: DensityMatrix,
    R: ReadoutMatrix,
    shots: int | None,
    seed: int,
    conventions: Conventions = CANONICAL,
    noise: NoiseParams = NOISELESS,
    *,
    durations: GateDurations = DEFAULT_DURATIONS,
    ideal_prerotations: bool = False,
) -> ReconstructionResult:
    estimates = simulate_pauli_estimates(
        rho_true,
        R,
        shots,
        seed,
        conventions,
        noise,
        durations=durations,
        ideal_prerotations=ideal_prerotations,
    )
    return project_to_physical(linear_inversion(estimates))

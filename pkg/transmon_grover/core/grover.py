"""Four-object Grover search: preparation, oracles, decoding and accounting.

Success probability is computed from raw (uncorrected) single-run outcomes;
the intermediate and final fidelities come from readout-corrected
tomography, matching the two accounting schemes used on the device.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .errors import DegenerateTableError, InvalidArgumentError
from .gates import (
    CANONICAL,
    DEFAULT_DURATIONS,
    Conventions,
    Gate,
    GateDurations,
    GateSequence,
    Target,
    convention_space,
)
from .noise import NOISELESS, NoiseParams, evolve
from .qmat import (
    BASIS_LABELS,
    DensityMatrix,
    PureState,
    basis_state,
    ground_state,
    state_fidelity,
)
from .readout import OUTCOMES, ReadoutMatrix, outcome_distribution, sample_shots
from .rng import derive_seed
from .tomography import DEFAULT_TOMO_SHOTS, ReconstructionResult, reconstruct

TABLE_TOL = 1e-9
CLASSICAL_SUCCESS = 0.25

# Z-rotation signs (qubit I, qubit II) of the oracle tagging each state.
ORACLE_SIGNS: dict[str, tuple[int, int]] = {
    "00": (-1, -1),
    "01": (1, -1),
    "10": (-1, 1),
    "11": (1, 1),
}

# stage indices for derived seeds
_STAGE_SHOTS = 0
_STAGE_TOMO_ORACLE = 1
_STAGE_TOMO_FINAL = 2


@dataclass(frozen=True)
class OracleId:
    tag: str

    def __post_init__(self) -> None:
        if self.tag not in ORACLE_SIGNS:
            raise InvalidArgumentError(f"unknown oracle tag {self.tag!r}")

    @classmethod
    def from_signs(cls, s_i: int, s_ii: int) -> "OracleId":
        for tag, signs in ORACLE_SIGNS.items():
            if signs == (s_i, s_ii):
                return cls(tag)
        raise InvalidArgumentError(f"no oracle with signs {(s_i, s_ii)!r}")

    @property
    def signs(self) -> tuple[int, int]:
        return ORACLE_SIGNS[self.tag]

    @property
    def index(self) -> int:
        return BASIS_LABELS.index(self.tag)

    def __str__(self) -> str:
        return self.tag


ALL_ORACLES = tuple(OracleId(tag) for tag in BASIS_LABELS)


@dataclass(frozen=True)
class DeviceReference:
    success_probability: tuple[float, float, float, float] = (0.67, 0.55, 0.62, 0.52)
    f_int: tuple[float, float, float, float] = (0.87, 0.80, 0.84, 0.82)
    f_final: tuple[float, float, float, float] = (0.70, 0.62, 0.67, 0.66)
    outcome_fidelity: tuple[float, float, float, float] = (0.570, 0.634, 0.565, 0.594)
    average_fidelity: float = 0.591


def device_reference() -> DeviceReference:
    return DeviceReference()


# ---------- sequences ----------


def prep_sequence(
    conventions: Conventions = CANONICAL,
    durations: GateDurations = DEFAULT_DURATIONS,
) -> GateSequence:
    """pi/2 turns about Y on both qubits, producing the uniform superposition."""

    return GateSequence.of(
        [
            Gate.rotation("Y", Target.I, math.pi / 2, durations),
            Gate.rotation("Y", Target.II, math.pi / 2, durations),
        ]
    )


def oracle_sequence(
    oracle: OracleId,
    conventions: Conventions = CANONICAL,
    durations: GateDurations = DEFAULT_DURATIONS,
) -> GateSequence:
    s_i, s_ii = oracle.signs
    return GateSequence.of(
        [
            Gate.iswap(durations),
            Gate.rotation("Z", Target.I, s_i * math.pi / 2, durations),
            Gate.rotation("Z", Target.II, s_ii * math.pi / 2, durations),
        ]
    )


def decode_sequence(
    conventions: Conventions = CANONICAL,
    durations: GateDurations = DEFAULT_DURATIONS,
) -> GateSequence:
    axis = conventions.decode_axis
    return GateSequence.of(
        [
            Gate.iswap(durations),
            Gate.rotation(axis, Target.I, math.pi / 2, durations),
            Gate.rotation(axis, Target.II, math.pi / 2, durations),
        ]
    )


def idle_sequence(duration_ns: float) -> GateSequence:
    """A single IDLE on both qubits, or nothing for a zero duration."""

    return GateSequence.of([Gate.idle(duration_ns)]) if duration_ns > 0 else GateSequence()


def grover_sequence(
    oracle: OracleId,
    conventions: Conventions = CANONICAL,
    durations: GateDurations = DEFAULT_DURATIONS,
    step_idle_ns: float = 0.0,
) -> GateSequence:
    """The whole run; ``step_idle_ns`` separates preparation, oracle and decode."""

    return (
        prep_sequence(conventions, durations)
        + idle_sequence(step_idle_ns)
        + oracle_sequence(oracle, conventions, durations)
        + idle_sequence(step_idle_ns)
        + decode_sequence(conventions, durations)
    )


# ---------- ideal states ----------


def tagged_state(oracle: OracleId) -> PureState:
    """Uniform superposition with the tagged component's sign flipped."""

    amps = np.full(4, 0.5, dtype=complex)
    amps[oracle.index] = -0.5
    return PureState(amps)


def ideal_tagged_state(oracle: OracleId) -> DensityMatrix:
    """rho_rs = exp(i*pi*(delta_rt + delta_st)) / 4."""

    signs = np.ones(4)
    signs[oracle.index] = -1.0
    return DensityMatrix(np.outer(signs, signs).astype(complex) / 4)


# ---------- simulation ----------


@dataclass(frozen=True, eq=False)
class CircuitStates:
    after_prep: DensityMatrix
    after_oracle: DensityMatrix
    final: DensityMatrix


def circuit_states(
    oracle: OracleId,
    noise: NoiseParams = NOISELESS,
    conventions: Conventions = CANONICAL,
    durations: GateDurations = DEFAULT_DURATIONS,
    step_idle_ns: float = 0.0,
) -> CircuitStates:
    """Register state after preparation, after the oracle and after decoding."""

    prepared = evolve(ground_state(), prep_sequence(conventions, durations), noise, conventions)
    tagged = evolve(
        evolve(prepared, idle_sequence(step_idle_ns), noise, conventions),
        oracle_sequence(oracle, conventions, durations),
        noise,
        conventions,
    )
    final = evolve(
        evolve(tagged, idle_sequence(step_idle_ns), noise, conventions),
        decode_sequence(conventions, durations),
        noise,
        conventions,
    )
    return CircuitStates(prepared, tagged, final)


@dataclass(frozen=True, eq=False)
class AlgorithmResult:
    """Outcome of one oracle's run.

    ``outcome_counts`` and ``shots`` are ``None`` on the exact-distribution
    path, where ``success_probability`` is the exact outcome probability.
    """

    oracle: OracleId
    outcome_counts: NDArray[np.int64] | None
    shots: int | None
    success_probability: float
    outcome_probabilities: NDArray[np.float64] = field(repr=False)
    tag_population: float
    rho_after_oracle: DensityMatrix | None = field(default=None, repr=False)
    rho_final: DensityMatrix | None = field(default=None, repr=False)
    f_int: float | None = None
    f_final: float | None = None

    def __post_init__(self) -> None:
        if self.outcome_counts is not None:
            if int(np.sum(self.outcome_counts)) != self.shots:
                raise InvalidArgumentError("outcome counts must sum to the shot count")

    @property
    def beats_classical(self) -> bool:
        return self.success_probability > CLASSICAL_SUCCESS

    @property
    def outcome_frequencies(self) -> NDArray[np.float64]:
        if self.outcome_counts is None:
            return np.asarray(self.outcome_probabilities, dtype=float)
        return np.asarray(self.outcome_counts, dtype=float) / float(self.shots)


def run_algorithm(
    oracle: OracleId,
    noise: NoiseParams,
    R: ReadoutMatrix,
    shots: int | None,
    seed: int,
    conventions: Conventions = CANONICAL,
    with_tomography: bool = False,
    *,
    durations: GateDurations = DEFAULT_DURATIONS,
    step_idle_ns: float = 0.0,
    pre_readout_idle_ns: float = 0.0,
    tomo_shots: int | None = DEFAULT_TOMO_SHOTS,
    ideal_prerotations: bool = False,
) -> AlgorithmResult:
    """Run prep, oracle and decode, then read out single runs.

    ``seed`` is the master seed; every stage of every oracle draws from its
    own derived seed. ``shots=None`` selects the exact-distribution path.
    """

    if shots is not None and shots < 1:
        raise InvalidArgumentError("shots must be >= 1")
    states = circuit_states(oracle, noise, conventions, durations, step_idle_ns)
    read_state = evolve(states.final, idle_sequence(pre_readout_idle_ns), noise, conventions)
    q = outcome_distribution(read_state, R)
    tag = oracle.index
    if shots is None:
        counts = None
        success = float(q[tag])
    else:
        counts = sample_shots(q, shots, derive_seed(seed, oracle.index, _STAGE_SHOTS))
        success = float(counts[tag]) / shots
    tag_population = state_fidelity(states.final, basis_state(oracle.tag))

    rho_oracle = rho_final = None
    f_int = f_final = None
    if with_tomography:
        tomo: list[ReconstructionResult] = [
            reconstruct(
                rho,
                R,
                tomo_shots,
                derive_seed(seed, oracle.index, stage),
                conventions,
                noise,
                durations=durations,
                ideal_prerotations=ideal_prerotations,
            )
            for rho, stage in (
                (states.after_oracle, _STAGE_TOMO_ORACLE),
                (states.final, _STAGE_TOMO_FINAL),
            )
        ]
        rho_oracle, rho_final = tomo[0].physical, tomo[1].physical
        f_int = state_fidelity(rho_oracle, tagged_state(oracle))
        f_final = state_fidelity(rho_final, basis_state(oracle.tag))

    return AlgorithmResult(
        oracle=oracle,
        outcome_counts=counts,
        shots=shots,
        success_probability=success,
        outcome_probabilities=q,
        tag_population=tag_population,
        rho_after_oracle=rho_oracle,
        rho_final=rho_final,
        f_int=f_int,
        f_final=f_final,
    )


# ---------- conditional table and outcome fidelity ----------


@dataclass(frozen=True, eq=False)
class ConditionalTable:
    """entries[ab, uv] = P(outcome ab | oracle tagging |uv>)."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=float, copy=True)
        if arr.shape != (4, 4):
            raise InvalidArgumentError(f"conditional table must be 4x4, got {arr.shape}")
        if arr.min() < 0.0:
            raise InvalidArgumentError("conditional probabilities must be >= 0")
        if np.max(np.abs(arr.sum(axis=0) - 1.0)) > TABLE_TOL:
            raise InvalidArgumentError("every column of a conditional table must sum to 1")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_results(cls, results: Sequence[AlgorithmResult]) -> "ConditionalTable":
        by_tag = {r.oracle.tag: r for r in results}
        if sorted(by_tag) != list(BASIS_LABELS):
            raise InvalidArgumentError("a conditional table needs one result per oracle")
        return cls(np.column_stack([by_tag[tag].outcome_frequencies for tag in BASIS_LABELS]))

    def to_csv(self, digits: int = 6) -> str:
        lines = ["ab/uv," + ",".join(f"|{s}>" for s in BASIS_LABELS)]
        for outcome, row in zip(OUTCOMES, self.entries):
            lines.append(outcome.label + "," + ",".join(f"{v:.{digits}g}" for v in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "ConditionalTable":
        rows = [line.strip() for line in io.StringIO(text) if line.strip() and not line.startswith("#")]
        if len(rows) != 5:
            raise InvalidArgumentError("conditional table CSV needs a header row and four outcome rows")
        body = []
        for outcome, line in zip(OUTCOMES, rows[1:]):
            cells = [c.strip() for c in line.split(",")]
            if cells[0] != outcome.label or len(cells) != 5:
                raise InvalidArgumentError(f"malformed conditional table row {line!r}")
            body.append([float(c) for c in cells[1:]])
        return cls(np.array(body))


@dataclass(frozen=True)
class OutcomeFidelity:
    per_outcome: tuple[float, float, float, float]
    average: float


def outcome_fidelity(table: ConditionalTable) -> OutcomeFidelity:
    """f_ab = p(ab | ab) / sum_uv p(ab | uv), the row-normalised diagonal."""

    row_sums = table.entries.sum(axis=1)
    if np.any(row_sums <= 0.0):
        raise DegenerateTableError("an outcome row of the conditional table sums to zero")
    f = np.diag(table.entries) / row_sums
    return OutcomeFidelity(tuple(float(v) for v in f), float(np.mean(f)))


def conditional_table(
    noise: NoiseParams,
    R: ReadoutMatrix,
    shots: int | None,
    seed: int,
    conventions: Conventions = CANONICAL,
    **options,
) -> ConditionalTable:
    results = [run_algorithm(o, noise, R, shots, seed, conventions, **options) for o in ALL_ORACLES]
    return ConditionalTable.from_results(results)


# ---------- convention pinning ----------


def convention_passes(conventions: Conventions, tol: float = 1e-10) -> bool:
    """True when every oracle tags its state and the noiseless run finds it with certainty."""

    for oracle in ALL_ORACLES:
        states = circuit_states(oracle, NOISELESS, conventions)
        if abs(state_fidelity(states.after_oracle, tagged_state(oracle)) - 1.0) > tol:
            return False
        if abs(state_fidelity(states.final, basis_state(oracle.tag)) - 1.0) > tol:
            return False
    return True


def pinning_conventions() -> list[Conventions]:
    """Every point of the convention space that satisfies ``convention_passes``."""

    return [c for c in convention_space() if convention_passes(c)]


def success_probabilities(results: Sequence[AlgorithmResult]) -> NDArray[np.float64]:
    return np.array([r.success_probability for r in sorted(results, key=lambda r: r.oracle.index)])

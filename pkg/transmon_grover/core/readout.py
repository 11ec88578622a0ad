"""Single-shot readout: assignment errors, crosstalk and error correction.

The 4x4 readout matrix R has entry (ab, uv) = P(outcome ab | projected |uv>);
rows are outcomes 00, 01, 10, 11 and columns the projected register states
in the same order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import InvalidArgumentError, SingularMatrixError
from .qmat import BASIS_LABELS, DensityMatrix, iter_bits
from .rng import shot_uniforms

STOCHASTIC_TOL = 1e-12
DISTRIBUTION_TOL = 1e-9
MAX_CONDITION = 1e12
MAX_CHI = 0.1
DEFAULT_CHI = 0.01

ReadoutPreset = Literal["operation", "optimal"]

# (e0_I, e1_I, e0_II, e1_II); with shelving the e1 slots hold the e2 rates.
READOUT_TABLES: dict[tuple[str, bool], tuple[float, float, float, float]] = {
    ("operation", False): (0.10, 0.16, 0.12, 0.15),
    ("operation", True): (0.05, 0.11, 0.05, 0.12),
    ("optimal", False): (0.05, 0.13, 0.055, 0.12),
    ("optimal", True): (0.025, 0.095, 0.03, 0.08),
}


@dataclass(frozen=True)
class ReadoutErrorRates:
    e0_i: float
    e1_i: float
    e0_ii: float
    e1_ii: float
    shelving: bool = True
    chi: float = 0.0

    def __post_init__(self) -> None:
        for name in ("e0_i", "e1_i", "e0_ii", "e1_ii"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidArgumentError(f"{name} must lie in [0, 1], got {value!r}")
        if not 0.0 <= self.chi <= MAX_CHI:
            raise InvalidArgumentError(f"chi must lie in [0, {MAX_CHI}], got {self.chi!r}")
        if self.e0_i + self.e1_i >= 1.0 or self.e0_ii + self.e1_ii >= 1.0:
            raise InvalidArgumentError("each qubit needs positive contrast (e0 + e1 < 1)")

    @property
    def qubit_i(self) -> tuple[float, float]:
        return self.e0_i, self.e1_i

    @property
    def qubit_ii(self) -> tuple[float, float]:
        return self.e0_ii, self.e1_ii


IDEAL_RATES = ReadoutErrorRates(0.0, 0.0, 0.0, 0.0, shelving=False, chi=0.0)


def readout_rates(
    preset: ReadoutPreset = "operation",
    shelving: bool = True,
    chi: float = DEFAULT_CHI,
) -> ReadoutErrorRates:
    """Calibrated error rates at the processor operating point or the optimal point."""

    try:
        e0_i, e1_i, e0_ii, e1_ii = READOUT_TABLES[(preset, bool(shelving))]
    except KeyError:
        raise InvalidArgumentError(f"unknown readout preset {preset!r}") from None
    return ReadoutErrorRates(e0_i, e1_i, e0_ii, e1_ii, shelving=bool(shelving), chi=chi)


def per_qubit_contrast(rates: ReadoutErrorRates) -> tuple[float, float]:
    return 1.0 - rates.e0_i - rates.e1_i, 1.0 - rates.e0_ii - rates.e1_ii


@dataclass(frozen=True)
class ShotOutcome:
    """Reported bits (a, b) for qubits I and II."""

    bits: tuple[int, int]

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.bits) or len(self.bits) != 2:
            raise InvalidArgumentError(f"outcome bits must be two 0/1 values, got {self.bits!r}")

    @classmethod
    def from_index(cls, index: int) -> "ShotOutcome":
        return cls(tuple(iter_bits(index)))

    @property
    def index(self) -> int:
        return 2 * self.bits[0] + self.bits[1]

    @property
    def label(self) -> str:
        return f"{self.bits[0]}{self.bits[1]}"


OUTCOMES = tuple(ShotOutcome.from_index(i) for i in range(4))


@dataclass(frozen=True, eq=False)
class ReadoutMatrix:
    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=float, copy=True)
        if arr.shape != (4, 4):
            raise InvalidArgumentError(f"readout matrix must be 4x4, got {arr.shape}")
        if arr.min() < -STOCHASTIC_TOL or arr.max() > 1.0 + STOCHASTIC_TOL:
            raise InvalidArgumentError("readout probabilities must lie in [0, 1]")
        if np.max(np.abs(arr.sum(axis=0) - 1.0)) > STOCHASTIC_TOL:
            raise InvalidArgumentError("readout matrix columns must sum to 1")
        if np.linalg.cond(arr) > MAX_CONDITION:
            raise SingularMatrixError("readout matrix is numerically singular")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def identity(cls) -> "ReadoutMatrix":
        return cls(np.eye(4))

    def column(self, state: str) -> NDArray[np.float64]:
        return self.entries[:, BASIS_LABELS.index(state)].copy()

    def to_csv(self) -> str:
        """CSV block: columns are input states, rows are outcomes."""

        lines = ["outcome," + ",".join(f"|{s}>" for s in BASIS_LABELS)]
        for outcome, row in zip(OUTCOMES, self.entries):
            lines.append(outcome.label + "," + ",".join(f"{v:.6f}" for v in row))
        return "\n".join(lines) + "\n"


def _confusion(e0: float, e1: float) -> NDArray[np.float64]:
    return np.array([[1.0 - e0, e1], [e0, 1.0 - e1]])


def _flip(chi: float) -> NDArray[np.float64]:
    return np.array([[1.0 - chi, chi], [chi, 1.0 - chi]])


def build_readout_matrix(rates: ReadoutErrorRates) -> ReadoutMatrix:
    """Tensor product of per-qubit confusion matrices plus conditional crosstalk.

    With crosstalk chi, each reported bit flips with probability chi when the
    partner qubit was projected onto |1>.
    """

    c_i = _confusion(*rates.qubit_i)
    c_ii = _confusion(*rates.qubit_ii)
    flip = _flip(rates.chi)
    columns = []
    for u in (0, 1):
        for v in (0, 1):
            reported_i = c_i[:, u]
            reported_ii = c_ii[:, v]
            if v == 1:
                reported_i = flip @ reported_i
            if u == 1:
                reported_ii = flip @ reported_ii
            col = np.kron(reported_i, reported_ii)
            columns.append(col / col.sum())
    return ReadoutMatrix(np.column_stack(columns))


def _normalized_populations(populations: ArrayLike) -> NDArray[np.float64]:
    p = np.real(np.asarray(populations, dtype=complex)).astype(float)
    if p.shape != (4,):
        raise InvalidArgumentError("expected four populations")
    # physical states only carry rounding-level negatives here
    p = np.maximum(p, 0.0)
    total = p.sum()
    if total <= 0:
        raise InvalidArgumentError("populations sum to zero")
    return p / total


def outcome_distribution(rho: DensityMatrix, R: ReadoutMatrix) -> NDArray[np.float64]:
    """Outcome probabilities q = R p, p the computational-basis populations."""

    return R.entries @ _normalized_populations(np.diag(rho.entries))


def _check_distribution(q: ArrayLike) -> NDArray[np.float64]:
    q = np.asarray(q, dtype=float)
    if q.shape != (4,) or q.min() < -DISTRIBUTION_TOL or abs(q.sum() - 1.0) > DISTRIBUTION_TOL:
        raise InvalidArgumentError(f"not a normalised outcome distribution: {q!r}")
    return np.clip(q, 0.0, None)


def sample_outcomes(q: ArrayLike, seed: int, start: int, stop: int) -> NDArray[np.int64]:
    """Outcome index of every shot in [start, stop)."""

    q = _check_distribution(q)
    cdf = np.cumsum(q)
    cdf[-1] = 1.0
    picks = np.searchsorted(cdf, shot_uniforms(seed, start, stop), side="right")
    return np.minimum(picks, 3).astype(np.int64)


def sample_shots(q: ArrayLike, n: int, seed: int) -> NDArray[np.int64]:
    """Counts per outcome for ``n`` independent shots."""

    if n < 1:
        raise InvalidArgumentError("shot count must be >= 1")
    return np.bincount(sample_outcomes(q, seed, 0, n), minlength=4).astype(np.int64)


def correct_distribution(q_hat: ArrayLike, R: ReadoutMatrix) -> NDArray[np.float64]:
    """p_hat = R^-1 q_hat. Entries may leave [0, 1]; no clipping here."""

    q_hat = np.asarray(q_hat, dtype=float)
    if q_hat.shape != (4,):
        raise InvalidArgumentError("expected four outcome frequencies")
    if np.linalg.cond(R.entries) > MAX_CONDITION:
        raise SingularMatrixError("readout matrix is numerically singular")
    try:
        return np.linalg.solve(R.entries, q_hat)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(str(exc)) from exc

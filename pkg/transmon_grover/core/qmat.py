"""Dense complex linear algebra for one and two qubits.

Basis ordering is |00>, |01>, |10>, |11> with qubit I as the left
(most-significant) tensor factor. sigma_z|0> = +|0>, so |0> is the ground
state of -nu*sigma_z/2.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import eigvalsh

from .errors import ConsistencyError, InvalidArgumentError

ComplexMatrix = NDArray[np.complex128]

# ---------- tolerances (single source of truth) ----------
NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
UNITARY_TOL = 1e-10
IMAG_TOL = 1e-10

REGISTER_DIM = 4
BASIS_LABELS = ("00", "01", "10", "11")

# ---------- single-qubit Pauli matrices ----------
SIGMA = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
PAULI_LETTERS = ("I", "X", "Y", "Z")


def as_matrix(values: ArrayLike, dim: int | None = None) -> ComplexMatrix:
    """Return ``values`` as a square complex matrix, checking its dimension."""

    arr = np.asarray(values, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise InvalidArgumentError(f"expected dimension {dim}, got {arr.shape[0]}")
    if arr.shape[0] not in (2, 4):
        raise InvalidArgumentError(f"only dimensions 2 and 4 are supported, got {arr.shape[0]}")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalised state vector of dimension 2 or 4."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size not in (2, 4):
            raise InvalidArgumentError(f"state dimension must be 2 or 4, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidArgumentError(f"state norm is {norm!r}, expected 1")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def normalized(cls, amplitudes: ArrayLike) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise InvalidArgumentError("cannot normalise the zero vector")
        return cls(amps / norm)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    def projector(self) -> ComplexMatrix:
        return np.outer(self.amplitudes, self.amplitudes.conj())


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Physical two-qubit density matrix (Hermitian, trace one, PSD).

    Raw tomography output that may be unphysical stays a plain
    ``ComplexMatrix``.
    """

    entries: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        arr = as_matrix(self.entries, REGISTER_DIM)
        if np.max(np.abs(arr - arr.conj().T)) > HERMITIAN_TOL:
            raise InvalidArgumentError("density matrix is not Hermitian")
        tr = np.trace(arr)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidArgumentError(f"density matrix trace is {tr!r}, expected 1")
        if eigvalsh(arr).min() < -PSD_TOL:
            raise InvalidArgumentError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "entries", _frozen(arr))

    @classmethod
    def from_pure(cls, psi: PureState) -> "DensityMatrix":
        if psi.dim != REGISTER_DIM:
            raise InvalidArgumentError("density matrices are two-qubit only")
        return cls(psi.projector())

    @classmethod
    def hermitized(cls, values: ArrayLike) -> "DensityMatrix":
        """Build from a numerically Hermitian matrix, symmetrising rounding noise."""

        arr = as_matrix(values, REGISTER_DIM)
        return cls((arr + arr.conj().T) / 2)

    def populations(self) -> NDArray[np.float64]:
        return np.real(np.diag(self.entries)).copy()

    def eigenvalues(self) -> NDArray[np.float64]:
        return eigvalsh(self.entries)


@dataclass(frozen=True, order=True)
class PauliLabel:
    """Two-qubit Pauli operator label, qubit I first."""

    first: str
    second: str

    def __post_init__(self) -> None:
        for letter in (self.first, self.second):
            if letter not in SIGMA:
                raise InvalidArgumentError(f"unknown Pauli letter {letter!r}")

    @classmethod
    def parse(cls, text: str) -> "PauliLabel":
        text = text.strip().upper()
        if len(text) != 2:
            raise InvalidArgumentError(f"Pauli label must have two letters, got {text!r}")
        return cls(text[0], text[1])

    @property
    def is_identity(self) -> bool:
        return self.first == "I" and self.second == "I"

    def __str__(self) -> str:
        return f"{self.first}{self.second}"


def all_pauli_labels() -> list[PauliLabel]:
    """All 16 labels, first factor major, ordering I, X, Y, Z."""

    return [PauliLabel(a, b) for a, b in itertools.product(PAULI_LETTERS, repeat=2)]


def pauli_labels() -> list[PauliLabel]:
    """The 15 non-identity labels forming the extended Pauli set."""

    return [label for label in all_pauli_labels() if not label.is_identity]


# ---------- operations ----------


def tensor_product(a: ArrayLike, b: ArrayLike) -> ComplexMatrix:
    """Kronecker product of two single-qubit operators, ``a`` acting on qubit I."""

    return np.kron(as_matrix(a, 2), as_matrix(b, 2))


def pauli_operator(label: PauliLabel) -> ComplexMatrix:
    return tensor_product(SIGMA[label.first], SIGMA[label.second])


def is_unitary(u: ArrayLike, tol: float = UNITARY_TOL) -> bool:
    arr = np.asarray(u, dtype=complex)
    return bool(np.max(np.abs(arr.conj().T @ arr - np.eye(arr.shape[0]))) <= tol)


def apply_unitary(rho: DensityMatrix, u: ArrayLike) -> DensityMatrix:
    """Return u rho u^dagger."""

    u = as_matrix(u, REGISTER_DIM)
    if not is_unitary(u):
        raise InvalidArgumentError("operator is not unitary")
    return DensityMatrix.hermitized(u @ rho.entries @ u.conj().T)


def expectation(rho: DensityMatrix, label: PauliLabel) -> float:
    value = np.trace(rho.entries @ pauli_operator(label))
    if abs(value.imag) > IMAG_TOL:
        raise ConsistencyError(f"<{label}> has imaginary part {value.imag!r}")
    return float(value.real)


def state_fidelity(rho: DensityMatrix, psi: PureState) -> float:
    """<psi|rho|psi>, the probability of finding the register in ``psi``."""

    if psi.dim != REGISTER_DIM:
        raise InvalidArgumentError("fidelity requires a two-qubit state")
    value = psi.amplitudes.conj() @ rho.entries @ psi.amplitudes
    if abs(value.imag) > IMAG_TOL:
        raise ConsistencyError(f"fidelity has imaginary part {value.imag!r}")
    return float(value.real)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    diff = a.entries - b.entries
    return float(0.5 * np.sum(np.abs(eigvalsh((diff + diff.conj().T) / 2))))


def hilbert_schmidt_distance(a: ArrayLike, b: ArrayLike) -> float:
    """Frobenius norm of ``a - b``."""

    return float(np.linalg.norm(np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex)))


# ---------- common states ----------


def basis_state(label: str) -> PureState:
    """Computational basis state from a two-bit label such as ``"01"``."""

    if label not in BASIS_LABELS:
        raise InvalidArgumentError(f"unknown basis state {label!r}")
    amps = np.zeros(REGISTER_DIM, dtype=complex)
    amps[BASIS_LABELS.index(label)] = 1.0
    return PureState(amps)


def uniform_superposition() -> PureState:
    return PureState(np.full(REGISTER_DIM, 0.5, dtype=complex))


def maximally_mixed() -> DensityMatrix:
    return DensityMatrix(np.eye(REGISTER_DIM, dtype=complex) / REGISTER_DIM)


def ground_state() -> DensityMatrix:
    return DensityMatrix.from_pure(basis_state("00"))


# ---------- text serialisation ----------

_ENTRY_RE = re.compile(r"^([+-]?[0-9.]+(?:e[+-]?\d+)?)([+-][0-9.]+(?:e[+-]?\d+)?)i$")


def _format_entry(z: complex) -> str:
    # adding 0.0 turns -0.0 into 0.0 so dumps stay byte-stable
    return f"{z.real + 0.0:.11e}{z.imag + 0.0:+.11e}i"


def format_matrix(matrix: ArrayLike) -> str:
    """Rows of ``re+im i`` entries, 12 significant digits, row-major."""

    arr = as_matrix(matrix, REGISTER_DIM)
    return "\n".join("  ".join(_format_entry(z) for z in row) for row in arr) + "\n"


def parse_matrix(text: str) -> ComplexMatrix:
    rows: list[list[complex]] = []
    for line in text.strip().splitlines():
        entries: list[complex] = []
        for token in line.split():
            match = _ENTRY_RE.match(token)
            if match is None:
                raise InvalidArgumentError(f"malformed matrix entry {token!r}")
            entries.append(complex(float(match.group(1)), float(match.group(2))))
        rows.append(entries)
    if len(rows) != REGISTER_DIM or any(len(r) != REGISTER_DIM for r in rows):
        raise InvalidArgumentError("matrix dump must be 4 rows of 4 entries")
    return np.array(rows, dtype=complex)


def iter_bits(index: int) -> Iterator[int]:
    """Bits (qubit I first) of a register basis index."""

    yield (index >> 1) & 1
    yield index & 1


"""Symbolic gates compiled to unitaries under an explicit convention set.

Rotation signs, the iSWAP phase and the decode axis are not fixed by the
hardware description alone; ``Conventions`` makes them explicit so the
noiseless end-to-end search can pin them down in tests.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from enum import StrEnum
from typing import Iterable, Iterator

import numpy as np
from numpy.typing import ArrayLike
from scipy.linalg import expm

from .errors import InvalidArgumentError
from .qmat import SIGMA, ComplexMatrix, is_unitary, tensor_product

ROTATION_AXES = ("X", "Y", "Z")


class GateKind(StrEnum):
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    ISWAP = "ISWAP"
    SQRT_ISWAP = "SQRT_ISWAP"
    IDLE = "IDLE"


class Target(StrEnum):
    I = "I"  # noqa: E741 - qubit name used throughout the device description
    II = "II"
    BOTH = "BOTH"


ROTATION_KINDS = {GateKind.RX: "X", GateKind.RY: "Y", GateKind.RZ: "Z"}
TWO_QUBIT_KINDS = {GateKind.ISWAP, GateKind.SQRT_ISWAP, GateKind.IDLE}


@dataclass(frozen=True)
class Conventions:
    """Frame and sign choices used when compiling gates.

    rotation_sign: rotation about n is exp(-i*sign*theta*sigma_n/2).
    iswap_phase: phase picked up by the swapped |01>, |10> amplitudes.
    decode_axis: equatorial axis of the final decode rotations.
    """

    rotation_sign: int = 1
    iswap_phase: complex = -1j
    decode_axis: str = "X"

    def __post_init__(self) -> None:
        if self.rotation_sign not in (1, -1):
            raise InvalidArgumentError("rotation_sign must be +1 or -1")
        if complex(self.iswap_phase) not in (1j, -1j):
            raise InvalidArgumentError("iswap_phase must be +i or -i")
        if self.decode_axis not in ("X", "Y"):
            raise InvalidArgumentError("decode_axis must be X or Y")
        object.__setattr__(self, "iswap_phase", complex(self.iswap_phase))

    def describe(self) -> str:
        phase = "-i" if self.iswap_phase == -1j else "+i"
        return f"rotation_sign={self.rotation_sign:+d} iswap_phase={phase} decode_axis={self.decode_axis}"


CANONICAL = Conventions()


def convention_space() -> list[Conventions]:
    """All eight combinations of sign, iSWAP phase and decode axis."""

    return [
        Conventions(sign, phase, axis)
        for sign, phase, axis in itertools.product((1, -1), (-1j, 1j), ("X", "Y"))
    ]


def parse_iswap_phase(text: str) -> complex:
    mapping = {"-i": -1j, "+i": 1j, "i": 1j, "-1j": -1j, "1j": 1j, "+1j": 1j}
    try:
        return mapping[text.strip().lower()]
    except KeyError:
        raise InvalidArgumentError(f"iswap_phase must be +i or -i, got {text!r}") from None


@dataclass(frozen=True)
class GateDurations:
    """Pulse lengths in ns; coupling in MHz fixes the two-qubit gate times."""

    single_qubit_ns: float = 25.0
    z_rotation_ns: float = 5.0
    coupling_mhz: float = 4.6

    def __post_init__(self) -> None:
        if self.single_qubit_ns < 0 or self.z_rotation_ns < 0:
            raise InvalidArgumentError("gate durations must be >= 0")
        if self.coupling_mhz <= 0:
            raise InvalidArgumentError("coupling must be > 0")

    @property
    def iswap_ns(self) -> float:
        return 1e3 / (4.0 * self.coupling_mhz)

    @property
    def sqrt_iswap_ns(self) -> float:
        return 1e3 / (8.0 * self.coupling_mhz)


DEFAULT_DURATIONS = GateDurations()


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    target: Target
    angle: float = 0.0
    duration: float = 0.0

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "kind", GateKind(self.kind))
            object.__setattr__(self, "target", Target(self.target))
        except ValueError:
            raise InvalidArgumentError(f"unknown gate {self.kind!r} on {self.target!r}") from None
        if self.duration < 0 or not math.isfinite(self.duration):
            raise InvalidArgumentError(f"gate duration must be >= 0, got {self.duration!r}")
        if self.kind in TWO_QUBIT_KINDS:
            if self.target is not Target.BOTH:
                raise InvalidArgumentError(f"{self.kind} acts on BOTH qubits")
        elif self.target is Target.BOTH:
            raise InvalidArgumentError(f"{self.kind} targets qubit I or II")
        if not math.isfinite(self.angle):
            raise InvalidArgumentError("gate angle must be finite")

    @classmethod
    def rotation(
        cls,
        axis: str,
        target: Target | str,
        angle: float,
        durations: GateDurations = DEFAULT_DURATIONS,
    ) -> "Gate":
        if axis not in ROTATION_AXES:
            raise InvalidArgumentError(f"rotation axis must be X, Y or Z, got {axis!r}")
        duration = durations.z_rotation_ns if axis == "Z" else durations.single_qubit_ns
        return cls(GateKind(f"R{axis}"), target, float(angle), duration)

    @classmethod
    def iswap(cls, durations: GateDurations = DEFAULT_DURATIONS) -> "Gate":
        return cls(GateKind.ISWAP, Target.BOTH, 0.0, durations.iswap_ns)

    @classmethod
    def sqrt_iswap(cls, durations: GateDurations = DEFAULT_DURATIONS) -> "Gate":
        return cls(GateKind.SQRT_ISWAP, Target.BOTH, 0.0, durations.sqrt_iswap_ns)

    @classmethod
    def idle(cls, duration_ns: float) -> "Gate":
        return cls(GateKind.IDLE, Target.BOTH, 0.0, float(duration_ns))

    @property
    def axis(self) -> str | None:
        return ROTATION_KINDS.get(self.kind)

    def with_angle(self, angle: float) -> "Gate":
        return replace(self, angle=float(angle))

    def to_line(self) -> str:
        if self.axis is None:
            return f"{self.kind} {self.target} {self.duration:.17g}"
        return f"{self.kind} {self.target} {self.angle:.17g} {self.duration:.17g}"

    @classmethod
    def from_line(cls, line: str) -> "Gate":
        parts = line.split()
        if not parts:
            raise InvalidArgumentError("empty gate line")
        try:
            kind = GateKind(parts[0].upper())
            if kind in ROTATION_KINDS:
                _, target, angle, duration = parts
                return cls(kind, Target(target.upper()), float(angle), float(duration))
            _, target, duration = parts
            return cls(kind, Target(target.upper()), 0.0, float(duration))
        except ValueError as exc:
            if isinstance(exc, InvalidArgumentError):
                raise
            raise InvalidArgumentError(f"malformed gate line {line!r}") from exc


@dataclass(frozen=True)
class GateSequence:
    gates: tuple[Gate, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: "GateSequence") -> "GateSequence":
        return GateSequence(self.gates + other.gates)

    @property
    def total_duration(self) -> float:
        return float(sum(g.duration for g in self.gates))

    def to_text(self) -> str:
        return "".join(g.to_line() + "\n" for g in self.gates)

    @classmethod
    def from_text(cls, text: str) -> "GateSequence":
        gates = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if line:
                gates.append(Gate.from_line(line))
        return cls(tuple(gates))

    @classmethod
    def of(cls, gates: Iterable[Gate]) -> "GateSequence":
        return cls(tuple(gates))


# ---------- unitaries ----------


def rotation_unitary(axis: str, angle: float, conventions: Conventions = CANONICAL) -> ComplexMatrix:
    """exp(-i*sign*angle*sigma_axis/2)."""

    if axis not in ROTATION_AXES:
        raise InvalidArgumentError(f"unknown rotation axis {axis!r}")
    half = conventions.rotation_sign * angle / 2.0
    return math.cos(half) * SIGMA["I"] - 1j * math.sin(half) * SIGMA[axis]


def iswap_unitary(conventions: Conventions = CANONICAL) -> ComplexMatrix:
    p = conventions.iswap_phase
    return np.array(
        [[1, 0, 0, 0], [0, 0, p, 0], [0, p, 0, 0], [0, 0, 0, 1]],
        dtype=complex,
    )


def sqrt_iswap_unitary(conventions: Conventions = CANONICAL) -> ComplexMatrix:
    """Half-angle rotation of the {|01>, |10>} subspace; squares to iSWAP."""

    p = conventions.iswap_phase
    r = 1.0 / math.sqrt(2.0)
    return np.array(
        [[1, 0, 0, 0], [0, r, r * p, 0], [0, r * p, r, 0], [0, 0, 0, 1]],
        dtype=complex,
    )


FLIP_FLOP = (tensor_product(SIGMA["X"], SIGMA["X"]) + tensor_product(SIGMA["Y"], SIGMA["Y"])) / 2


def coupling_evolution(g_mhz: float, t_ns: float) -> ComplexMatrix:
    """Resonant rotating-frame evolution under the flip-flop coupling.

    exp(-i*2*pi*g*t*(XX + YY)/2) with g in MHz and t in ns. At t = 1/(4g) this
    is iSWAP with phase -i, at t = 1/(8g) its square root.
    """

    if g_mhz <= 0:
        raise InvalidArgumentError("coupling g must be > 0")
    if t_ns < 0:
        raise InvalidArgumentError("evolution time must be >= 0")
    theta = 2.0 * math.pi * g_mhz * 1e-3 * t_ns
    return expm(-1j * theta * FLIP_FLOP)


def embed_single(op: ArrayLike, target: Target | str) -> ComplexMatrix:
    """Lift a 2x2 operator to the register, identity on the other qubit."""

    target = Target(target)
    if target is Target.I:
        return tensor_product(op, SIGMA["I"])
    if target is Target.II:
        return tensor_product(SIGMA["I"], op)
    raise InvalidArgumentError("single-qubit operators target qubit I or II")


def gate_unitary(gate: Gate, conventions: Conventions = CANONICAL) -> ComplexMatrix:
    if not isinstance(gate, Gate):
        raise InvalidArgumentError(f"not a gate: {gate!r}")
    if gate.axis is not None:
        return embed_single(rotation_unitary(gate.axis, gate.angle, conventions), gate.target)
    if gate.kind is GateKind.ISWAP:
        return iswap_unitary(conventions)
    if gate.kind is GateKind.SQRT_ISWAP:
        return sqrt_iswap_unitary(conventions)
    return np.eye(4, dtype=complex)


def sequence_unitary(seq: GateSequence, conventions: Conventions = CANONICAL) -> ComplexMatrix:
    """Ordered product; later gates multiply on the left."""

    u = np.eye(4, dtype=complex)
    for gate in seq:
        u = gate_unitary(gate, conventions) @ u
    if not is_unitary(u):
        raise InvalidArgumentError("sequence product lost unitarity")
    return u

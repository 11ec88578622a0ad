"""Relaxation and pure-dephasing channels applied after each gate."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .errors import InvalidArgumentError
from .gates import CANONICAL, Conventions, Gate, GateSequence, Target, embed_single, gate_unitary
from .qmat import SIGMA, ComplexMatrix, DensityMatrix, apply_unitary

KRAUS_TOL = 1e-12


@dataclass(frozen=True)
class NoiseParams:
    """Coherence times in ns for qubits I and II.

    ``rotation_error`` is the relative over-rotation of every resonant X/Y
    pulse (theta -> theta*(1 + rotation_error)).
    """

    t1_i: float = 450.0
    t1_ii: float = 500.0
    tphi_i: float = 2000.0
    tphi_ii: float = 2000.0
    enabled: bool = True
    rotation_error: float = 0.0

    def __post_init__(self) -> None:
        if self.enabled:
            for name in ("t1_i", "t1_ii", "tphi_i", "tphi_ii"):
                value = getattr(self, name)
                if not value > 0:
                    raise InvalidArgumentError(f"{name} must be > 0 when noise is enabled, got {value!r}")
        if not -1.0 < self.rotation_error < 1.0:
            raise InvalidArgumentError("rotation_error must lie in (-1, 1)")

    def t1(self, target: Target) -> float:
        return self.t1_i if Target(target) is Target.I else self.t1_ii

    def tphi(self, target: Target) -> float:
        return self.tphi_i if Target(target) is Target.I else self.tphi_ii


DEVICE_NOISE = NoiseParams()
NOISELESS = NoiseParams(enabled=False)


@dataclass(frozen=True)
class KrausChannel:
    operators: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        if not ops or any(k.shape != (2, 2) for k in ops):
            raise InvalidArgumentError("Kraus operators must be 2x2")
        object.__setattr__(self, "operators", ops)

    def completeness_error(self) -> float:
        total = sum(k.conj().T @ k for k in self.operators)
        return float(np.max(np.abs(total - np.eye(2))))

    def is_complete(self, tol: float = KRAUS_TOL) -> bool:
        return self.completeness_error() <= tol

    def apply_single(self, rho: ArrayLike) -> ComplexMatrix:
        """Act on a single-qubit density matrix."""

        rho = np.asarray(rho, dtype=complex)
        return sum(k @ rho @ k.conj().T for k in self.operators)


IDENTITY_CHANNEL = KrausChannel((SIGMA["I"],))


def _check_times(t: float, scale: float, scale_name: str) -> None:
    if not t >= 0 or not math.isfinite(t):
        raise InvalidArgumentError(f"duration must be >= 0, got {t!r}")
    if not scale > 0:
        raise InvalidArgumentError(f"{scale_name} must be > 0, got {scale!r}")


def amplitude_damping(t: float, t1: float) -> KrausChannel:
    """Energy relaxation over ``t`` ns with decay probability 1 - exp(-t/t1)."""

    _check_times(t, t1, "t1")
    gamma = -math.expm1(-t / t1)
    k0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausChannel((k0, k1))


def pure_dephasing(t: float, tphi: float) -> KrausChannel:
    """Phase damping that scales coherences by exp(-t/tphi), populations untouched."""

    _check_times(t, tphi, "tphi")
    keep = math.exp(-t / tphi)
    lam = max(0.0, 1.0 - keep * keep)
    k0 = np.array([[1, 0], [0, keep]], dtype=complex)
    k1 = np.array([[0, 0], [0, math.sqrt(lam)]], dtype=complex)
    return KrausChannel((k0, k1))


def apply_channel(rho: DensityMatrix, ch: KrausChannel, target: Target | str) -> DensityMatrix:
    if not ch.is_complete():
        raise InvalidArgumentError(
            f"Kraus channel is not trace preserving (error {ch.completeness_error():.3g})"
        )
    out = np.zeros((4, 4), dtype=complex)
    for k in ch.operators:
        big = embed_single(k, target)
        out += big @ rho.entries @ big.conj().T
    return DensityMatrix.hermitized(out)


def decohere(rho: DensityMatrix, duration: float, params: NoiseParams) -> DensityMatrix:
    """Relaxation then dephasing on both qubits for ``duration`` ns."""

    if not params.enabled or duration <= 0:
        return rho
    for target in (Target.I, Target.II):
        rho = apply_channel(rho, amplitude_damping(duration, params.t1(target)), target)
        rho = apply_channel(rho, pure_dephasing(duration, params.tphi(target)), target)
    return rho


def effective_gate(gate: Gate, params: NoiseParams) -> Gate:
    """The gate actually played, including pulse over-rotation."""

    if params.enabled and params.rotation_error and gate.axis in ("X", "Y"):
        return gate.with_angle(gate.angle * (1.0 + params.rotation_error))
    return gate


def evolve_step(
    rho: DensityMatrix,
    gate: Gate,
    params: NoiseParams,
    conventions: Conventions = CANONICAL,
) -> DensityMatrix:
    """Ideal gate unitary followed by decoherence for the gate's duration."""

    played = effective_gate(gate, params)
    rho = apply_unitary(rho, gate_unitary(played, conventions))
    return decohere(rho, gate.duration, params)


def evolve(
    rho: DensityMatrix,
    seq: GateSequence,
    params: NoiseParams,
    conventions: Conventions = CANONICAL,
) -> DensityMatrix:
    for gate in seq:
        rho = evolve_step(rho, gate, params, conventions)
    return rho

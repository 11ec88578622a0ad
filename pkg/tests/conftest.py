"""Shared fixtures for the simulator tests."""
from __future__ import annotations

from typing import Callable

import numpy as np
import pytest

from transmon_grover.config import get_settings
from transmon_grover.core.gates import CANONICAL, Conventions
from transmon_grover.core.qmat import DensityMatrix, PureState
from transmon_grover.core.readout import ReadoutMatrix, build_readout_matrix, readout_rates


def random_density_matrix(rng: np.random.Generator, rank: int = 4) -> DensityMatrix:
    """Ginibre-distributed mixed state of the given rank."""

    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    return DensityMatrix.hermitized(rho / np.trace(rho).real)


def random_pure_state(rng: np.random.Generator) -> PureState:
    return PureState.normalized(rng.normal(size=4) + 1j * rng.normal(size=4))


def random_hermitian_trace_one(rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = (a + a.conj().T) / 2
    return h - (np.trace(h).real - 1.0) / 4 * np.eye(4)


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch: pytest.MonkeyPatch) -> None:
    """Isolate tests from the caller's environment and the settings cache."""

    for name in ("TRANSMON_GROVER_LOG_LEVEL", "TRANSMON_GROVER_CONFIG", "TRANSMON_GROVER_OUT_DIR"):
        monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def conventions() -> Conventions:
    return CANONICAL


@pytest.fixture
def ideal_R() -> ReadoutMatrix:
    return ReadoutMatrix.identity()


@pytest.fixture
def device_R() -> ReadoutMatrix:
    """Operating-point shelving rates without crosstalk."""

    return build_readout_matrix(readout_rates("operation", shelving=True, chi=0.0))


@pytest.fixture
def random_states(rng: np.random.Generator) -> Callable[[int], list[DensityMatrix]]:
    def factory(count: int) -> list[DensityMatrix]:
        return [random_density_matrix(rng, rank=int(rng.integers(1, 5))) for _ in range(count)]

    return factory


@pytest.fixture
def random_pure_states(rng: np.random.Generator) -> Callable[[int], list[PureState]]:
    def factory(count: int) -> list[PureState]:
        return [random_pure_state(rng) for _ in range(count)]

    return factory


@pytest.fixture
def random_hermitians(rng: np.random.Generator) -> Callable[[int], list[np.ndarray]]:
    def factory(count: int) -> list[np.ndarray]:
        return [random_hermitian_trace_one(rng) for _ in range(count)]

    return factory

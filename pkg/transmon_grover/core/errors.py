"""Error types raised by the simulator."""

from __future__ import annotations


class SimulationError(Exception):
    """Base class for every error raised by the simulator."""


class InvalidArgumentError(SimulationError, ValueError):
    """An argument violates the documented preconditions."""


class ConsistencyError(SimulationError):
    """A numerical result broke an internal invariant (e.g. complex expectation)."""


class SingularMatrixError(SimulationError):
    """The readout matrix cannot be inverted."""


class DegenerateTableError(SimulationError):
    """A conditional table has a zero row sum."""


class ConfigError(SimulationError):
    """Invalid run configuration.

    ``key`` names the offending configuration key so the CLI can report it.
    """

    def __init__(self, key: str, message: str) -> None:
        super().__init__(f"{key}: {message}")
        self.key = key
        self.message = message

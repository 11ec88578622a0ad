"""Deterministic randomness.

Sub-seeds come from ``numpy.random.SeedSequence`` spawn keys, so every stage
(oracle, tomography setting, ...) owns an independent stream. Per-shot
uniforms are a splitmix64 hash of (sub-seed, shot index): shot ``i`` gets
the same draw whatever range or partition it is evaluated in.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV_2_53 = 1.0 / float(1 << 53)

SEED_MASK = (1 << 64) - 1


def derive_seed(seed: int, *path: int) -> int:
    """64-bit child seed for the stage identified by ``path``."""

    seq = np.random.SeedSequence(entropy=int(seed) & SEED_MASK, spawn_key=tuple(int(p) for p in path))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _splitmix64(z: NDArray[np.uint64]) -> NDArray[np.uint64]:
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


def shot_uniforms(seed: int, start: int, stop: int) -> NDArray[np.float64]:
    """Uniform [0, 1) draws for shots ``start`` .. ``stop - 1``."""

    index = np.arange(start, stop, dtype=np.uint64)
    with np.errstate(over="ignore"):
        state = np.uint64(int(seed) & SEED_MASK) + (index + np.uint64(1)) * _GOLDEN
        bits = _splitmix64(state)
    return (bits >> _S11).astype(np.float64) * _INV_2_53

"""
Experiment runners shared by the CLI and the calibration sweep.

The four oracle runs are independent; ``run_all_oracles`` fans them out to
worker threads and gathers the results in tag order. Each run derives its
own seeds from the master seed, so the outcome is the same as running the
oracles one after another.
"""

from __future__ import annotations

import asyncio
import logging
from dataclasses import dataclass
from typing import List

import numpy as np

from ..config import RunConfig
from ..core.gates import Conventions, GateDurations, GateSequence, parse_iswap_phase
from ..core.grover import ALL_ORACLES, AlgorithmResult, OracleId, run_algorithm
from ..core.noise import NoiseParams, evolve
from ..core.qmat import DensityMatrix, ground_state
from ..core.readout import (
    ReadoutErrorRates,
    ReadoutMatrix,
    build_readout_matrix,
    outcome_distribution,
    sample_shots,
)
from ..core.rng import derive_seed

logger = logging.getLogger(__name__)

# seed stream after the four per-oracle streams
SEQUENCE_STREAM = len(ALL_ORACLES)


@dataclass(frozen=True)
class Experiment:
    """Everything one Grover run needs besides the oracle."""

    noise: NoiseParams
    rates: ReadoutErrorRates
    conventions: Conventions
    durations: GateDurations
    shots: int | None
    tomo_shots: int | None
    seed: int
    step_idle_ns: float = 0.0
    pre_readout_idle_ns: float = 0.0
    ideal_prerotations: bool = False
    with_tomography: bool = False

    @property
    def readout_matrix(self) -> ReadoutMatrix:
        return build_readout_matrix(self.rates)


def experiment_from_config(config: RunConfig, *, with_tomography: bool = False) -> Experiment:
    """Translate a validated ``RunConfig`` into domain objects."""

    noise = NoiseParams(
        t1_i=config.t1_i_ns,
        t1_ii=config.t1_ii_ns,
        tphi_i=config.tphi_i_ns,
        tphi_ii=config.tphi_ii_ns,
        enabled=config.noise_enabled,
        rotation_error=config.rotation_error,
    )
    rates = config.readout_error_rates()
    conventions = Conventions(
        rotation_sign=config.rotation_sign,
        iswap_phase=parse_iswap_phase(config.iswap_phase),
        decode_axis=config.decode_axis,
    )
    durations = GateDurations(
        single_qubit_ns=config.single_qubit_ns,
        z_rotation_ns=config.z_rotation_ns,
        coupling_mhz=config.coupling_mhz,
    )
    return Experiment(
        noise=noise,
        rates=rates,
        conventions=conventions,
        durations=durations,
        shots=None if config.exact else config.shots,
        tomo_shots=None if config.exact else config.tomo_shots,
        seed=config.seed,
        step_idle_ns=config.step_idle_ns,
        pre_readout_idle_ns=config.pre_readout_idle_ns,
        ideal_prerotations=config.ideal_prerotations,
        with_tomography=with_tomography,
    )


def run_oracle(oracle: OracleId, experiment: Experiment, R: ReadoutMatrix | None = None) -> AlgorithmResult:
    R = experiment.readout_matrix if R is None else R
    result = run_algorithm(
        oracle,
        experiment.noise,
        R,
        experiment.shots,
        experiment.seed,
        experiment.conventions,
        experiment.with_tomography,
        durations=experiment.durations,
        step_idle_ns=experiment.step_idle_ns,
        pre_readout_idle_ns=experiment.pre_readout_idle_ns,
        tomo_shots=experiment.tomo_shots,
        ideal_prerotations=experiment.ideal_prerotations,
    )
    logger.debug("oracle %s: P_S=%.6g", oracle, result.success_probability)
    return result


async def run_all_oracles(experiment: Experiment, workers: int = 4) -> List[AlgorithmResult]:
    """Run the four oracles concurrently, results ordered 00, 01, 10, 11."""

    R = experiment.readout_matrix
    limit = asyncio.Semaphore(max(1, workers))

    async def _one(oracle: OracleId) -> AlgorithmResult:
        async with limit:
            return await asyncio.to_thread(run_oracle, oracle, experiment, R)

    logger.info("running %d oracles on %d worker(s)", len(ALL_ORACLES), max(1, workers))
    return list(await asyncio.gather(*(_one(o) for o in ALL_ORACLES)))


def run_all_oracles_sync(experiment: Experiment, workers: int = 4) -> List[AlgorithmResult]:
    """Blocking wrapper around ``run_all_oracles``."""

    return asyncio.run(run_all_oracles(experiment, workers))


def run_all_oracles_sequential(experiment: Experiment) -> List[AlgorithmResult]:
    R = experiment.readout_matrix
    return [run_oracle(o, experiment, R) for o in ALL_ORACLES]



@dataclass(frozen=True, eq=False)
class SequenceResult:
    sequence: GateSequence
    final_state: DensityMatrix
    outcome_probabilities: np.ndarray
    outcome_counts: np.ndarray | None
    shots: int | None


def run_sequence(sequence: GateSequence, experiment: Experiment) -> SequenceResult:
    """Play a gate sequence from |00> and read both qubits out.

    Noise, conventions and readout come from ``experiment``; the shots use
    their own seed stream so they never coincide with an oracle's.
    """

    rho = evolve(ground_state(), sequence, experiment.noise, experiment.conventions)
    q = outcome_distribution(rho, experiment.readout_matrix)
    counts = None
    if experiment.shots is not None:
        counts = sample_shots(q, experiment.shots, derive_seed(experiment.seed, SEQUENCE_STREAM))
    logger.debug("sequence of %d gates, %.6g ns", len(sequence), sequence.total_duration)
    return SequenceResult(sequence, rho, q, counts, experiment.shots)

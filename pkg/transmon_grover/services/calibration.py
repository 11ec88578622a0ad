"""
Crosstalk and timing sweep fitted to the measured success probabilities.

Every grid point is evaluated on the exact-distribution path. The register
dynamics depend only on the step idle and the pre-readout idle, so they are
computed once per pair and only the readout matrix is rebuilt for each chi.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..core.errors import InvalidArgumentError
from ..core.grover import ALL_ORACLES, circuit_states, device_reference, idle_sequence
from ..core.noise import evolve
from ..core.qmat import DensityMatrix
from ..core.readout import build_readout_matrix, outcome_distribution
from .experiments import Experiment

logger = logging.getLogger(__name__)

CHI_GRID = tuple(round(0.01 * k, 2) for k in range(6))
PRE_READOUT_IDLE_GRID = tuple(float(50 * k) for k in range(7))
STEP_IDLE_GRID = tuple(float(25 * k) for k in range(9))


@dataclass(frozen=True)
class CalibrationPoint:
    chi: float
    pre_readout_idle_ns: float
    step_idle_ns: float
    success: Tuple[float, float, float, float]
    residual: float


@dataclass(frozen=True)
class CalibrationResult:
    best: CalibrationPoint
    points: Tuple[CalibrationPoint, ...]
    targets: Tuple[float, float, float, float]

    def overrides(self) -> Dict[str, float | bool]:
        """Config keys that reproduce the best point."""

        return {
            "chi": self.best.chi,
            "pre_readout_idle_ns": self.best.pre_readout_idle_ns,
            "step_idle_ns": self.best.step_idle_ns,
            "exact": True,
        }

    def sweep_in_chi(self, pre_readout_idle_ns: float, step_idle_ns: float) -> List[CalibrationPoint]:
        return sorted(
            (
                p
                for p in self.points
                if p.pre_readout_idle_ns == pre_readout_idle_ns and p.step_idle_ns == step_idle_ns
            ),
            key=lambda p: p.chi,
        )


def _read_states(experiment: Experiment, step_idle_ns: float, pre_idles: Sequence[float]) -> Dict[float, List[DensityMatrix]]:
    finals = [
        circuit_states(o, experiment.noise, experiment.conventions, experiment.durations, step_idle_ns).final
        for o in ALL_ORACLES
    ]
    return {
        pre: [evolve(rho, idle_sequence(pre), experiment.noise, experiment.conventions) for rho in finals]
        for pre in pre_idles
    }


def calibrate(
    experiment: Experiment,
    chis: Sequence[float] = CHI_GRID,
    pre_readout_idles: Sequence[float] = PRE_READOUT_IDLE_GRID,
    step_idles: Sequence[float] = STEP_IDLE_GRID,
    targets: Sequence[float] | None = None,
) -> CalibrationResult:
    """Grid search minimising the squared error to ``targets``.

    Ties keep the first point in (step idle, pre-readout idle, chi) order.
    """

    targets = tuple(targets or device_reference().success_probability)
    matrices = {chi: build_readout_matrix(replace(experiment.rates, chi=chi)) for chi in chis}
    points: List[CalibrationPoint] = []
    best: CalibrationPoint | None = None
    for step in step_idles:
        for pre, states in _read_states(experiment, step, pre_readout_idles).items():
            for chi in chis:
                R = matrices[chi]
                success = tuple(
                    float(outcome_distribution(rho, R)[o.index]) for o, rho in zip(ALL_ORACLES, states)
                )
                residual = float(np.sum((np.array(success) - np.array(targets)) ** 2))
                point = CalibrationPoint(chi, pre, step, success, residual)
                points.append(point)
                if best is None or residual < best.residual:
                    best = point
        logger.debug("step idle %.6g ns done, best residual so far %.6g", step, best.residual if best else float("nan"))
    if best is None:
        raise InvalidArgumentError("calibration grid is empty")
    logger.info(
        "best fit chi=%.6g pre_readout_idle=%.6g step_idle=%.6g residual=%.6g",
        best.chi,
        best.pre_readout_idle_ns,
        best.step_idle_ns,
        best.residual,
    )
    return CalibrationResult(best, tuple(points), targets)


def format_calibration_report(result: CalibrationResult) -> str:
    best = result.best
    lines = [
        "# calibration report",
        f"best chi={best.chi:.6g} pre_readout_idle_ns={best.pre_readout_idle_ns:.6g} "
        f"step_idle_ns={best.step_idle_ns:.6g}",
        "oracle P_S measured_P_S",
    ]
    for oracle, achieved, target in zip(ALL_ORACLES, best.success, result.targets):
        lines.append(f"|{oracle.tag}> {achieved:.6g} {target:.6g}")
    lines.append(f"residual={best.residual:.6g} rms={np.sqrt(best.residual / 4):.6g}")
    lines += ["", "# sweep: chi pre_readout_idle_ns step_idle_ns P_S(00) P_S(01) P_S(10) P_S(11) residual"]
    for p in result.points:
        cells = [p.chi, p.pre_readout_idle_ns, p.step_idle_ns, *p.success, p.residual]
        lines.append(" ".join(f"{v:.6g}" for v in cells))
    return "\n".join(lines) + "\n"

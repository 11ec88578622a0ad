"""
Report text, golden data and artifact writing.

Reports use 6 significant digits and matrix dumps 12, so repeated runs with
the same configuration produce byte-identical files. Artifacts are written
atomically: a temporary file in the target directory is renamed into place.
"""

from __future__ import annotations

import logging
import os
import tempfile
from importlib import resources
from pathlib import Path
from typing import Dict, Mapping, Sequence

from ..core.errors import DegenerateTableError
from ..core.grover import (
    AlgorithmResult,
    ConditionalTable,
    DeviceReference,
    OutcomeFidelity,
    device_reference,
    outcome_fidelity,
)
from ..core.qmat import format_matrix
from ..core.readout import OUTCOMES, ReadoutErrorRates, ReadoutMatrix, per_qubit_contrast
from .experiments import Experiment, SequenceResult

logger = logging.getLogger(__name__)

TABLE1_RESOURCE = "table1.csv"


def load_table1() -> ConditionalTable:
    """The measured conditional table shipped with the package."""

    text = resources.files("transmon_grover.data").joinpath(TABLE1_RESOURCE).read_text(encoding="utf-8")
    return ConditionalTable.from_csv(text)


def write_atomic(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise
    logger.info("wrote %s", path)
    return path


def write_artifacts(out_dir: str | Path, files: Mapping[str, str]) -> Dict[str, Path]:
    """Write every ``name -> text`` pair once all of them have been computed."""

    out = Path(out_dir)
    return {name: write_atomic(out / name, text) for name, text in files.items()}


def _g(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.6g}"


def format_fidelity_summary(fidelity: OutcomeFidelity) -> str:
    parts = [f"f_{label}={100 * value:.1f}%" for label, value in zip(("00", "01", "10", "11"), fidelity.per_outcome)]
    return " ".join(parts) + f" average={100 * fidelity.average:.1f}%"


def format_readout(rates: ReadoutErrorRates, R: ReadoutMatrix) -> str:
    c_i, c_ii = per_qubit_contrast(rates)
    return R.to_csv() + f"# contrast_I={c_i:.6g} contrast_II={c_ii:.6g} chi={rates.chi:.6g}\n"


def format_sequence_outcomes(result: SequenceResult) -> str:
    seq = result.sequence
    shots = "exact" if result.shots is None else str(result.shots)
    lines = [f"# gates={len(seq)} duration_ns={seq.total_duration:.6g} shots={shots}"]
    if result.outcome_counts is None:
        lines.append("outcome,probability")
        lines += [f"{o.label},{p:.6f}" for o, p in zip(OUTCOMES, result.outcome_probabilities)]
    else:
        lines.append("outcome,probability,counts")
        lines += [
            f"{o.label},{p:.6f},{int(n)}"
            for o, p, n in zip(OUTCOMES, result.outcome_probabilities, result.outcome_counts)
        ]
    return "\n".join(lines) + "\n"


def format_report(
    results: Sequence[AlgorithmResult],
    experiment: Experiment,
    reference: DeviceReference | None = None,
) -> str:
    """Per-oracle counts and metrics, the conditional table and f_ab."""

    reference = reference or device_reference()
    ordered = sorted(results, key=lambda r: r.oracle.index)
    shots = "exact" if experiment.shots is None else str(experiment.shots)
    rates = experiment.rates
    lines = [
        "# grover report",
        f"seed={experiment.seed} shots={shots} noise={'on' if experiment.noise.enabled else 'off'} "
        f"shelving={'on' if rates.shelving else 'off'} chi={rates.chi:.6g} "
        f"step_idle_ns={experiment.step_idle_ns:.6g} pre_readout_idle_ns={experiment.pre_readout_idle_ns:.6g}",
        experiment.conventions.describe(),
        "",
        "oracle counts(00,01,10,11) P_S measured_P_S beats_classical tag_population F_int measured_F_int F_final measured_F_final",
    ]
    for r in ordered:
        i = r.oracle.index
        counts = "-" if r.outcome_counts is None else ",".join(str(int(c)) for c in r.outcome_counts)
        lines.append(
            " ".join(
                [
                    f"|{r.oracle.tag}>",
                    counts,
                    _g(r.success_probability),
                    _g(reference.success_probability[i]),
                    "yes" if r.beats_classical else "no",
                    _g(r.tag_population),
                    _g(r.f_int),
                    _g(reference.f_int[i]),
                    _g(r.f_final),
                    _g(reference.f_final[i]),
                ]
            )
        )

    table = ConditionalTable.from_results(ordered)
    lines += ["", "# conditional table p(ab | uv)", table.to_csv().rstrip("\n"), ""]
    try:
        lines.append(format_fidelity_summary(outcome_fidelity(table)))
    except DegenerateTableError as exc:
        lines.append(f"f_ab undefined: {exc}")
    lines.append(f"measured average={100 * reference.average_fidelity:.1f}%")

    for r in ordered:
        if r.rho_after_oracle is not None:
            lines += ["", f"# rho_after_oracle |{r.oracle.tag}>", format_matrix(r.rho_after_oracle.entries).rstrip("\n")]
        if r.rho_final is not None:
            lines += ["", f"# rho_final |{r.oracle.tag}>", format_matrix(r.rho_final.entries).rstrip("\n")]
    return "\n".join(lines) + "\n"

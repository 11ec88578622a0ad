"""Command-line entry point for the transmon Grover simulator."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Sequence

from .config import RunConfig, format_config, get_settings, load_run_config
from .core.errors import ConfigError, InvalidArgumentError, SimulationError
from .core.gates import GateSequence
from .core.grover import ConditionalTable, OracleId, outcome_fidelity, tagged_state
from .core.qmat import DensityMatrix, PureState, basis_state, format_matrix, uniform_superposition
from .core.tomography import reconstruct
from .services.calibration import calibrate, format_calibration_report
from .services.experiments import experiment_from_config, run_all_oracles_sync, run_sequence
from .services.reporting import (
    format_fidelity_summary,
    format_readout,
    format_report,
    format_sequence_outcomes,
    load_table1,
    write_artifacts,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def _on_off(text: str) -> bool:
    value = text.strip().lower()
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected on or off")
    return value == "on"


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="Flat key = value configuration file.")
    common.add_argument("--seed", type=int, help="Master seed.")
    common.add_argument("--shots", type=int, help="Single runs per oracle.")
    common.add_argument("--tomo-shots", type=int, help="Shots per tomography setting.")
    common.add_argument("--no-noise", action="store_true", help="Disable relaxation and dephasing.")
    common.add_argument("--chi", type=float, help="Readout crosstalk probability.")
    common.add_argument("--shelving", type=_on_off, metavar="on|off", help="Use the shelving readout rates.")
    common.add_argument("--preset", choices=("operation", "optimal"), help="Readout rate table.")
    common.add_argument("--rotation-error", type=float, help="Relative over-rotation of X/Y pulses.")
    common.add_argument("--ideal-prerotations", action="store_true", help="Noiseless tomography pulses.")
    common.add_argument("--pre-readout-idle", type=float, metavar="NS", help="Idle before the final readout.")
    common.add_argument("--step-idle", type=float, metavar="NS", help="Idle between algorithm steps.")
    common.add_argument("--exact", action="store_true", help="Use exact outcome distributions, no sampling.")
    common.add_argument("--workers", type=int, help="Concurrent oracle runs.")
    common.add_argument("--out", metavar="DIR", help="Output directory.")
    common.add_argument("--table1", action="store_true", help="Use the shipped measured table instead of simulating.")
    common.add_argument("-v", "--verbose", action="count", default=0, help="More logging (repeatable).")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="transmon_grover",
        description="Simulate a two-transmon processor running the four-object Grover search.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    grover = commands.add_parser("grover", parents=[common], help="Run all four oracles and write the report.")
    grover.add_argument("--tomography", action="store_true", help="Also reconstruct the intermediate and final states.")
    tomo = commands.add_parser("tomo", parents=[common], help="Simulate tomography of an ideal state.")
    tomo.add_argument("state", help="phi, tagged:uv or basis:uv")
    commands.add_parser("calibrate", parents=[common], help="Fit crosstalk and timing to the measured P_S.")
    commands.add_parser("readout", parents=[common], help="Write the readout matrix and contrasts.")
    run = commands.add_parser("run", parents=[common], help="Play a gate sequence file from |00> and read it out.")
    run.add_argument("sequence", metavar="FILE", help="One gate per line: KIND TARGET [ANGLE_RAD] DURATION_NS.")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {
        "seed": args.seed,
        "shots": args.shots,
        "tomo_shots": args.tomo_shots,
        "noise_enabled": False if args.no_noise else None,
        "chi": args.chi,
        "shelving": args.shelving,
        "readout_preset": args.preset,
        "rotation_error": args.rotation_error,
        "ideal_prerotations": True if args.ideal_prerotations else None,
        "pre_readout_idle_ns": args.pre_readout_idle,
        "step_idle_ns": args.step_idle,
        "exact": True if args.exact else None,
        "workers": args.workers,
        "out_dir": args.out,
    }


def _configure_logging(verbosity: int, default_level: str) -> None:
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, default_level.upper(), logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def parse_state(text: str) -> PureState:
    """``phi``, ``tagged:uv`` or ``basis:uv``."""

    kind, _, tag = text.strip().partition(":")
    try:
        if kind == "phi" and not tag:
            return uniform_superposition()
        if kind == "tagged":
            return tagged_state(OracleId(tag))
        if kind == "basis":
            return basis_state(tag)
    except InvalidArgumentError as exc:
        raise ConfigError("state", str(exc)) from exc
    raise ConfigError("state", f"unknown state {text!r}; expected phi, tagged:uv or basis:uv")


# ---------- commands ----------


def cmd_grover(config: RunConfig, *, table1: bool = False, tomography: bool = False) -> int:
    if table1:
        table = load_table1()
        print(table.to_csv(), end="")
        print(format_fidelity_summary(outcome_fidelity(table)))
        return EXIT_OK

    experiment = experiment_from_config(config, with_tomography=tomography)
    results = run_all_oracles_sync(experiment, config.workers)
    table = ConditionalTable.from_results(results)
    report = format_report(results, experiment)
    write_artifacts(config.out_dir, {"report.txt": report, "conditional_table.csv": table.to_csv()})
    for r in results:
        print(f"|{r.oracle.tag}> P_S={r.success_probability:.6g}")
    return EXIT_OK


def cmd_tomo(config: RunConfig, state_arg: str) -> int:
    psi = parse_state(state_arg)
    experiment = experiment_from_config(config)
    result = reconstruct(
        DensityMatrix.from_pure(psi),
        experiment.readout_matrix,
        experiment.tomo_shots,
        experiment.seed,
        experiment.conventions,
        experiment.noise,
        durations=experiment.durations,
        ideal_prerotations=experiment.ideal_prerotations,
    )
    report = f"# state {state_arg}\n" + result.to_text(psi, experiment.tomo_shots, experiment.seed)
    write_artifacts(
        config.out_dir,
        {
            "raw_matrix.txt": format_matrix(result.raw),
            "physical_matrix.txt": format_matrix(result.physical.entries),
            "tomo_report.txt": report,
        },
    )
    print(report.splitlines()[-1])
    return EXIT_OK


def cmd_calibrate(config: RunConfig) -> int:
    result = calibrate(experiment_from_config(config))
    values = config.model_dump(exclude={"out_dir", "workers"})
    values.update(result.overrides())
    header = f"best fit to the measured success probabilities, residual {result.best.residual:.6g}"
    write_artifacts(
        config.out_dir,
        {
            "calibration.cfg": format_config(values, header=header),
            "calibration_report.txt": format_calibration_report(result),
        },
    )
    best = result.best
    print(
        f"chi={best.chi:.6g} pre_readout_idle_ns={best.pre_readout_idle_ns:.6g} "
        f"step_idle_ns={best.step_idle_ns:.6g} residual={best.residual:.6g}"
    )
    return EXIT_OK


def cmd_readout(config: RunConfig) -> int:
    experiment = experiment_from_config(config)
    text = format_readout(experiment.rates, experiment.readout_matrix)
    write_artifacts(config.out_dir, {"readout_matrix.csv": text})
    print(text, end="")
    return EXIT_OK


def cmd_run(config: RunConfig, sequence_path: str) -> int:
    text = Path(sequence_path).read_text(encoding="utf-8")
    try:
        sequence = GateSequence.from_text(text)
    except InvalidArgumentError as exc:
        raise ConfigError("sequence", str(exc)) from exc
    result = run_sequence(sequence, experiment_from_config(config))
    outcomes = format_sequence_outcomes(result)
    write_artifacts(
        config.out_dir,
        {"final_matrix.txt": format_matrix(result.final_state.entries), "outcomes.csv": outcomes},
    )
    print(outcomes, end="")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    """Parse CLI arguments and dispatch to the requested command."""

    parser = build_parser()
    args = parser.parse_args(None if argv is None else list(argv))
    settings = get_settings()
    _configure_logging(args.verbose, settings.log_level)

    try:
        config = load_run_config(
            args.config or settings.config_path,
            _overrides(args),
            defaults={"out_dir": settings.out_dir},
        )
        if args.command == "grover":
            return cmd_grover(config, table1=args.table1, tomography=args.tomography)
        if args.command == "tomo":
            return cmd_tomo(config, args.state)
        if args.command == "calibrate":
            return cmd_calibrate(config)
        if args.command == "run":
            return cmd_run(config, args.sequence)
        return cmd_readout(config)
    except ConfigError as exc:
        print(f"error: invalid configuration key {exc.key!r}: {exc.message}", file=sys.stderr)
        return EXIT_CONFIG
    except InvalidArgumentError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SimulationError as exc:
        logger.exception("simulation failed")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    raise SystemExit(main())

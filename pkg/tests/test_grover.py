"""Tests for the Grover sequences, result accounting and outcome fidelity."""
import math
from dataclasses import replace

import numpy as np
import pytest

from transmon_grover.core.errors import DegenerateTableError, InvalidArgumentError
from transmon_grover.core.gates import CANONICAL, Conventions, GateKind
from transmon_grover.core.grover import (
    ALL_ORACLES,
    ConditionalTable,
    OracleId,
    circuit_states,
    conditional_table,
    convention_passes,
    device_reference,
    grover_sequence,
    ideal_tagged_state,
    outcome_fidelity,
    pinning_conventions,
    run_algorithm,
    success_probabilities,
    tagged_state,
)
from transmon_grover.core.noise import DEVICE_NOISE, NOISELESS
from transmon_grover.core.qmat import basis_state, state_fidelity, trace_distance, uniform_superposition
from transmon_grover.core.readout import build_readout_matrix, readout_rates
from transmon_grover.services.reporting import load_table1


def test_oracle_signs() -> None:
    """Each oracle's Z-rotation signs identify it uniquely."""

    assert OracleId("00").signs == (-1, -1)
    assert OracleId("11").signs == (1, 1)
    assert OracleId.from_signs(1, -1) == OracleId("01")
    assert [o.index for o in ALL_ORACLES] == [0, 1, 2, 3]
    with pytest.raises(InvalidArgumentError):
        OracleId("2")


def test_preparation_gives_uniform_superposition() -> None:
    """Both pi/2 Y pulses put equal weight on every basis state."""

    states = circuit_states(OracleId("00"))
    assert state_fidelity(states.after_prep, uniform_superposition()) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("oracle", ALL_ORACLES, ids=str)
def test_oracle_marks_the_tagged_state(oracle) -> None:
    """After the oracle |rho_rs| = 1/4 and only the tagged phase is flipped."""

    rho = circuit_states(oracle).after_oracle
    assert np.allclose(np.abs(rho.entries), 0.25, atol=1e-12)
    t = oracle.index
    for r in range(4):
        for s in range(4):
            expected = math.pi * ((r == t) + (s == t))
            assert np.exp(1j * expected) * 0.25 == pytest.approx(rho.entries[r, s], abs=1e-12)
    assert trace_distance(rho, ideal_tagged_state(oracle)) < 1e-10


def test_tagged_states_are_orthonormal() -> None:
    """The four marked superpositions form a basis."""

    amps = np.array([tagged_state(o).amplitudes for o in ALL_ORACLES])
    assert np.allclose(amps.conj() @ amps.T, np.eye(4), atol=1e-12)


@pytest.mark.parametrize("oracle", ALL_ORACLES, ids=str)
def test_noiseless_run_finds_the_tag(oracle, ideal_R) -> None:
    """Without noise the decoded state is the tagged basis state."""

    states = circuit_states(oracle)
    assert state_fidelity(states.final, basis_state(oracle.tag)) == pytest.approx(1.0, abs=1e-12)
    result = run_algorithm(oracle, NOISELESS, ideal_R, 1000, seed=1)
    assert result.success_probability == 1.0
    assert result.outcome_counts[oracle.index] == 1000


def test_sequence_layout() -> None:
    """Step idles sit between the three stages only."""

    plain = grover_sequence(OracleId("01"))
    assert [g.kind for g in plain][:3] == [GateKind.RY, GateKind.RY, GateKind.ISWAP]
    spaced = grover_sequence(OracleId("01"), step_idle_ns=50.0)
    kinds = [g.kind for g in spaced]
    assert kinds.count(GateKind.IDLE) == 2
    assert kinds.index(GateKind.IDLE) == 2
    assert spaced.total_duration == pytest.approx(plain.total_duration + 100.0)


def test_device_readout_limits_success(device_R) -> None:
    """A perfect register read through the measured R succeeds 90.25% of the time."""

    result = run_algorithm(OracleId("00"), NOISELESS, device_R, None, seed=0)
    assert result.outcome_counts is None
    assert result.success_probability == pytest.approx(0.9025, abs=1e-12)
    assert np.allclose(result.outcome_frequencies, device_R.column("00"))


def test_canonical_conventions_are_the_only_pass() -> None:
    """The fixed conventions work; flipping any single one breaks the run."""

    assert convention_passes(CANONICAL)
    assert not convention_passes(replace(CANONICAL, decode_axis="Y"))
    assert not convention_passes(replace(CANONICAL, iswap_phase=1j))
    assert not convention_passes(replace(CANONICAL, rotation_sign=-1))
    assert CANONICAL in pinning_conventions()


def test_identity_table_has_perfect_fidelity() -> None:
    """Every outcome is certain: f_ab = 1 and the average is 1."""

    fid = outcome_fidelity(ConditionalTable(np.eye(4)))
    assert fid.per_outcome == (1.0, 1.0, 1.0, 1.0)
    assert fid.average == 1.0


def test_measured_table_fidelities() -> None:
    """The stored measurement reproduces the measured outcome fidelities."""

    fid = outcome_fidelity(load_table1())
    ref = device_reference()
    assert np.allclose(fid.per_outcome, ref.outcome_fidelity, atol=5e-4)
    assert fid.average == pytest.approx(ref.average_fidelity, abs=5e-4)


def test_table_validation() -> None:
    """Bad shapes, negative entries, unnormalised columns and empty rows."""

    with pytest.raises(InvalidArgumentError):
        ConditionalTable(np.eye(3))
    with pytest.raises(InvalidArgumentError):
        ConditionalTable(np.eye(4) * 0.9)
    bad = np.eye(4)
    bad[0, 0], bad[1, 0] = 1.1, -0.1
    with pytest.raises(InvalidArgumentError):
        ConditionalTable(bad)
    all_zero_outcome = np.zeros((4, 4))
    all_zero_outcome[0, :] = 1.0
    with pytest.raises(DegenerateTableError):
        outcome_fidelity(ConditionalTable(all_zero_outcome))


def test_table_csv_round_trip() -> None:
    """Full precision CSV parses back to the same table."""

    table = load_table1()
    text = table.to_csv(digits=17)
    assert text.splitlines()[0] == "ab/uv,|00>,|01>,|10>,|11>"
    assert np.array_equal(ConditionalTable.from_csv(text).entries, table.entries)
    with pytest.raises(InvalidArgumentError):
        ConditionalTable.from_csv("\n".join(text.splitlines()[:3]))


def test_conditional_table_of_noiseless_runs(ideal_R) -> None:
    """Perfect hardware gives the identity table."""

    table = conditional_table(NOISELESS, ideal_R, 500, seed=9)
    assert np.array_equal(table.entries, np.eye(4))


@pytest.mark.parametrize(
    "noise, chis",
    [
        (NOISELESS, [0.0, 0.01, 0.02, 0.05, 0.1]),
        (DEVICE_NOISE, [0.0, 0.01, 0.02, 0.05]),
    ],
    ids=["noiseless", "device"],
)
def test_success_never_rises_with_crosstalk(noise, chis) -> None:
    """More readout crosstalk never raises P_S at the default timing."""

    curves = []
    for chi in chis:
        R = build_readout_matrix(readout_rates("operation", shelving=True, chi=chi))
        results = [run_algorithm(o, noise, R, None, seed=0) for o in ALL_ORACLES]
        curves.append(success_probabilities(results))
    curves = np.array(curves)
    assert np.all(np.diff(curves, axis=0) <= 1e-12)
    assert curves[-1, 3] < curves[0, 3]


def test_noisy_run_beats_classical_but_not_population(device_R) -> None:
    """Decoherence and readout both cost success; 25% is still beaten."""

    for oracle in ALL_ORACLES:
        result = run_algorithm(oracle, DEVICE_NOISE, device_R, None, seed=0)
        assert result.beats_classical
        assert result.tag_population < 1.0
        assert result.tag_population > result.success_probability


def test_shot_runs_are_reproducible(device_R) -> None:
    """Same master seed, same counts; oracles draw from separate streams."""

    first = run_algorithm(OracleId("10"), DEVICE_NOISE, device_R, 2000, seed=42)
    again = run_algorithm(OracleId("10"), DEVICE_NOISE, device_R, 2000, seed=42)
    assert np.array_equal(first.outcome_counts, again.outcome_counts)
    assert first.outcome_counts.sum() == 2000
    assert first.success_probability == first.outcome_counts[2] / 2000


def test_tomography_fidelities(device_R) -> None:
    """Noiseless fidelities are one; noisy ones stay inside the unit interval."""

    clean = run_algorithm(OracleId("01"), NOISELESS, device_R, None, 0, with_tomography=True, tomo_shots=None)
    assert clean.f_int == pytest.approx(1.0, abs=1e-9)
    assert clean.f_final == pytest.approx(1.0, abs=1e-9)

    noisy = run_algorithm(OracleId("01"), DEVICE_NOISE, device_R, 1000, 5, with_tomography=True, tomo_shots=2000)
    assert noisy.f_int < 1.0
    assert 0.0 <= noisy.f_int <= 1.0
    assert 0.0 <= noisy.f_final <= 1.0
    assert noisy.rho_after_oracle is not None and noisy.rho_final is not None


def test_results_without_tomography_carry_no_states(ideal_R) -> None:
    """Fidelity fields stay empty unless tomography is requested."""

    result = run_algorithm(OracleId("11"), NOISELESS, ideal_R, 10, seed=0)
    assert result.f_int is None and result.rho_final is None
    with pytest.raises(InvalidArgumentError):
        run_algorithm(OracleId("11"), NOISELESS, ideal_R, 0, seed=0)


def test_conventions_are_frozen_choices() -> None:
    """Conventions are plain values usable as dictionary keys."""

    assert Conventions() == CANONICAL
    assert len({CANONICAL, Conventions()}) == 1

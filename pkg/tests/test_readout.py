"""Tests for the readout model, shot sampling and error correction."""
import numpy as np
import pytest

from transmon_grover.core.errors import InvalidArgumentError, SingularMatrixError
from transmon_grover.core.qmat import DensityMatrix, basis_state, ground_state, maximally_mixed
from transmon_grover.core.readout import (
    IDEAL_RATES,
    OUTCOMES,
    ReadoutErrorRates,
    ReadoutMatrix,
    ShotOutcome,
    build_readout_matrix,
    correct_distribution,
    outcome_distribution,
    per_qubit_contrast,
    readout_rates,
    sample_outcomes,
    sample_shots,
)
from transmon_grover.core.rng import derive_seed, shot_uniforms

DEVICE_COLUMN_00 = [0.9025, 0.0475, 0.0475, 0.0025]


def _random_rates(rng: np.random.Generator) -> ReadoutErrorRates:
    e0_i, e1_i, e0_ii, e1_ii = rng.uniform(0, 0.45, size=4)
    return ReadoutErrorRates(e0_i, e1_i, e0_ii, e1_ii, chi=rng.uniform(0, 0.1))


def test_ideal_rates_give_identity() -> None:
    """No assignment errors and no crosstalk is the identity matrix."""

    assert np.array_equal(build_readout_matrix(IDEAL_RATES).entries, np.eye(4))


def test_device_rates_column(device_R) -> None:
    """The |00> column is the product of the two ground-state fidelities."""

    assert np.allclose(device_R.column("00"), DEVICE_COLUMN_00, atol=1e-12)


def test_readout_matrix_is_column_stochastic(rng) -> None:
    """Random valid rates always give columns summing to one."""

    for _ in range(100):
        R = build_readout_matrix(_random_rates(rng))
        assert np.max(np.abs(R.entries.sum(axis=0) - 1.0)) < 1e-12
        assert R.entries.min() >= 0.0


def test_zero_crosstalk_factorises(rng) -> None:
    """Without crosstalk R is the Kronecker product of the confusion matrices."""

    for _ in range(20):
        rates = _random_rates(rng)
        rates = ReadoutErrorRates(rates.e0_i, rates.e1_i, rates.e0_ii, rates.e1_ii, chi=0.0)
        c_i = np.array([[1 - rates.e0_i, rates.e1_i], [rates.e0_i, 1 - rates.e1_i]])
        c_ii = np.array([[1 - rates.e0_ii, rates.e1_ii], [rates.e0_ii, 1 - rates.e1_ii]])
        assert np.allclose(build_readout_matrix(rates).entries, np.kron(c_i, c_ii), atol=1e-15)


def test_crosstalk_acts_only_through_excited_partners() -> None:
    """The |00> column ignores chi; the |11> column loses weight on outcome 11."""

    base = build_readout_matrix(readout_rates(chi=0.0))
    noisy = build_readout_matrix(readout_rates(chi=0.05))
    assert np.allclose(noisy.column("00"), base.column("00"))
    assert noisy.column("11")[3] < base.column("11")[3]


def test_contrasts_match_measured_values() -> None:
    """Shelving lifts the contrasts from 0.74/0.73 to 0.84/0.83."""

    c_i, c_ii = per_qubit_contrast(readout_rates("operation", shelving=True))
    assert abs(c_i - 0.84) < 1e-12 and abs(c_ii - 0.83) < 1e-12
    c_i, c_ii = per_qubit_contrast(readout_rates("operation", shelving=False))
    assert abs(c_i - 0.74) < 1e-12 and abs(c_ii - 0.73) < 1e-12
    c_i, c_ii = per_qubit_contrast(readout_rates("optimal", shelving=True))
    assert c_i == pytest.approx(0.88) and c_ii == pytest.approx(0.89)
    c_i, c_ii = per_qubit_contrast(readout_rates("optimal", shelving=False))
    assert c_i == pytest.approx(0.82) and c_ii == pytest.approx(0.825)


def test_rate_validation() -> None:
    """Rates outside [0, 1], zero contrast or large chi are rejected."""

    with pytest.raises(InvalidArgumentError):
        ReadoutErrorRates(-0.1, 0.1, 0.1, 0.1)
    with pytest.raises(InvalidArgumentError):
        ReadoutErrorRates(0.6, 0.5, 0.1, 0.1)
    with pytest.raises(InvalidArgumentError):
        ReadoutErrorRates(0.1, 0.1, 0.1, 0.1, chi=0.2)
    with pytest.raises(InvalidArgumentError):
        readout_rates("midpoint")


def test_singular_matrix_is_refused() -> None:
    """A matrix with identical columns cannot serve as a readout matrix."""

    with pytest.raises(SingularMatrixError):
        ReadoutMatrix(np.full((4, 4), 0.25))
    with pytest.raises(InvalidArgumentError):
        ReadoutMatrix(np.eye(4) * 0.5)


def test_outcome_distribution_examples(device_R, ideal_R) -> None:
    """Ground state, maximally mixed state and |11> through R."""

    assert np.allclose(outcome_distribution(ground_state(), ideal_R), [1, 0, 0, 0])
    assert np.allclose(outcome_distribution(maximally_mixed(), device_R), device_R.entries.sum(axis=1) / 4)
    eleven = DensityMatrix.from_pure(basis_state("11"))
    assert np.allclose(outcome_distribution(eleven, device_R), device_R.column("11"))


def test_sampling_examples() -> None:
    """Deterministic outcome, fixed-seed reproducibility and uniform statistics."""

    assert sample_shots([1, 0, 0, 0], 500, seed=7).tolist() == [500, 0, 0, 0]
    q = [0.25, 0.25, 0.25, 0.25]
    first = sample_shots(q, 10_000, seed=42)
    assert np.array_equal(first, sample_shots(q, 10_000, seed=42))
    assert first.sum() == 10_000
    sigma = np.sqrt(10_000 * 0.25 * 0.75)
    assert sigma == pytest.approx(43.3, abs=0.1)
    assert np.all(np.abs(first - 2500) < 5 * sigma)


def test_sampling_is_partition_independent() -> None:
    """Shot i draws the same outcome whatever range it is evaluated in."""

    q = [0.4, 0.3, 0.2, 0.1]
    whole = sample_outcomes(q, 99, 0, 1000)
    pieces = np.concatenate([sample_outcomes(q, 99, 0, 333), sample_outcomes(q, 99, 333, 1000)])
    assert np.array_equal(whole, pieces)
    assert np.array_equal(sample_outcomes(q, 99, 500, 501), whole[500:501])


def test_sampling_rejects_bad_input() -> None:
    """Unnormalised distributions and empty runs are errors."""

    with pytest.raises(InvalidArgumentError):
        sample_shots([0.5, 0.5, 0.5, 0.0], 10, seed=1)
    with pytest.raises(InvalidArgumentError):
        sample_shots([1, 0, 0, 0], 0, seed=1)


def test_correction_examples(device_R, ideal_R) -> None:
    """Identity R, exact round trip and the |00> column."""

    q = np.array([0.4, 0.3, 0.2, 0.1])
    assert np.allclose(correct_distribution(q, ideal_R), q)
    p = np.array([0.1, 0.2, 0.3, 0.4])
    assert np.allclose(correct_distribution(device_R.entries @ p, device_R), p, atol=1e-10)
    assert np.allclose(correct_distribution(device_R.column("00"), device_R), [1, 0, 0, 0], atol=1e-10)


def test_correction_may_leave_unit_interval(device_R) -> None:
    """Frequencies impossible under R correct to negative entries without clipping."""

    corrected = correct_distribution([1.0, 0.0, 0.0, 0.0], device_R)
    assert corrected.min() < 0.0
    assert corrected.sum() == pytest.approx(1.0, abs=1e-10)


def test_correction_recovers_populations(device_R, random_states) -> None:
    """Correcting the exact outcome distribution recovers the diagonal of rho."""

    for rho in random_states(100):
        recovered = correct_distribution(outcome_distribution(rho, device_R), device_R)
        assert np.max(np.abs(recovered - rho.populations())) < 1e-9


def test_readout_csv_layout(device_R) -> None:
    """Columns are input states, rows are outcomes, six decimals."""

    lines = device_R.to_csv().splitlines()
    assert lines[0] == "outcome,|00>,|01>,|10>,|11>"
    assert lines[1].startswith("00,0.902500,")
    assert [line.split(",")[0] for line in lines[1:]] == [o.label for o in OUTCOMES]


def test_shot_outcome_bits() -> None:
    """Index 2 is outcome 10: qubit I reported 1."""

    outcome = ShotOutcome.from_index(2)
    assert outcome.bits == (1, 0)
    assert outcome.label == "10"
    assert outcome.index == 2
    with pytest.raises(InvalidArgumentError):
        ShotOutcome((2, 0))


def test_seed_derivation() -> None:
    """Derived seeds are deterministic and differ across paths."""

    assert derive_seed(5, 1, 2) == derive_seed(5, 1, 2)
    assert len({derive_seed(5), derive_seed(5, 0), derive_seed(5, 1), derive_seed(6, 0)}) == 4
    u = shot_uniforms(derive_seed(5, 0), 0, 10_000)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 0.02

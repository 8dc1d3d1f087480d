from fractions import Fraction

import numpy as np
import pytest
from conftest import within_sigma

from qswarm.errors import ProtocolError
from qswarm.qsim import Basis
from qswarm.security import (
    BasisMode,
    EveStrategy,
    Verdict,
    detection_probability,
    draw_schedule,
    estimate_qber,
    honest_sift,
    parse_schedule,
    run_detection_rounds,
)
from qswarm.utils.seeds import SeedStreams


def sifted_disagreements(records, valid):
    r1, r2 = records["r1"], records["r2"]
    return sum(1 for i in valid if r1.outcome(i) != r2.outcome(i))


def test_passive_channel_has_zero_error():
    records = run_detection_rounds(2000, BasisMode.RANDOM, EveStrategy.PASSIVE, SeedStreams(1))
    valid = honest_sift(records)
    assert sifted_disagreements(records, valid) == 0
    # the central entity's reference qubit agrees as well
    assert all(records["c"].outcome(i) == records["r1"].outcome(i) for i in valid)
    assert "eve" not in records


def test_random_bases_sift_a_quarter_of_rounds():
    rounds = 8000
    records = run_detection_rounds(rounds, BasisMode.RANDOM, EveStrategy.PASSIVE, SeedStreams(2))
    assert within_sigma(len(honest_sift(records)), rounds, 0.25)


def test_intercept_resend_error_rate_is_a_quarter():
    records = run_detection_rounds(
        20000, BasisMode.RANDOM, EveStrategy.INTERCEPT_RANDOM, SeedStreams(3)
    )
    valid = honest_sift(records)
    assert len(valid) > 4500
    assert within_sigma(sifted_disagreements(records, valid), len(valid), 0.25)


def test_fixed_basis_eve_on_z_only_channel_is_invisible():
    records = run_detection_rounds(500, BasisMode.Z, EveStrategy.INTERCEPT_FIXED_Z, SeedStreams(4))
    valid = honest_sift(records)
    assert len(valid) == 500
    assert sifted_disagreements(records, valid) == 0
    assert all(records["eve"].outcome(i) == records["r1"].outcome(i) for i in valid)


def test_eve_knowing_the_schedule_is_invisible():
    schedule = draw_schedule(1000, np.random.default_rng(5))
    records = run_detection_rounds(
        1000, BasisMode.PREDEFINED, EveStrategy.INTERCEPT_SCHEDULE, SeedStreams(5), schedule
    )
    valid = honest_sift(records)
    assert len(valid) == 1000
    assert sifted_disagreements(records, valid) == 0


def test_wrong_fixed_basis_on_predefined_schedule_is_caught():
    schedule = parse_schedule("ZX" * 500)
    records = run_detection_rounds(
        1000, BasisMode.PREDEFINED, EveStrategy.INTERCEPT_FIXED_Z, SeedStreams(6), schedule
    )
    # Z rounds pass untouched, X rounds disagree half the time
    assert within_sigma(sifted_disagreements(records, range(1000)), 1000, 0.25)


def test_enabling_eve_does_not_change_honest_bases():
    passive = run_detection_rounds(300, BasisMode.RANDOM, EveStrategy.PASSIVE, SeedStreams(7))
    active = run_detection_rounds(
        300, BasisMode.RANDOM, EveStrategy.INTERCEPT_RANDOM, SeedStreams(7)
    )
    for party in ("c", "r1", "r2"):
        assert passive[party].bases() == active[party].bases()


def test_estimate_qber_splits_sampled_and_remaining_rounds():
    records = run_detection_rounds(400, BasisMode.Z, EveStrategy.PASSIVE, SeedStreams(8))
    valid = honest_sift(records)
    report = estimate_qber(records, valid, 64, np.random.default_rng(0))
    assert report.verdict is Verdict.CLEAN
    assert report.qber == 0
    assert len(report.sampled_rounds) == 64
    assert len(report.remaining_rounds) == 400 - 64
    assert not set(report.sampled_rounds) & set(report.remaining_rounds)


def test_estimate_qber_needs_enough_valid_rounds():
    records = run_detection_rounds(40, BasisMode.RANDOM, EveStrategy.PASSIVE, SeedStreams(9))
    with pytest.raises(ProtocolError):
        estimate_qber(records, honest_sift(records), 64, np.random.default_rng(0))


def test_detection_rate_with_64_samples():
    # Eve guesses Z or X on a Z channel: a quarter of the rounds disagree
    trials = 1000
    sampling = np.random.default_rng(10)
    detected = 0
    for trial in range(trials):
        records = run_detection_rounds(
            64, BasisMode.Z, EveStrategy.INTERCEPT_RANDOM, SeedStreams(trial)
        )
        report = estimate_qber(records, honest_sift(records), 64, sampling, threshold=0.1)
        detected += int(report.verdict is Verdict.EAVESDROPPER_DETECTED)
    assert detected / trials >= 0.99


def test_exact_detection_probability():
    assert detection_probability(64, Fraction(1, 4), 0.1) >= Fraction(99, 100)
    assert detection_probability(64, Fraction(0), 0.1) == 0
    powers = [detection_probability(n, Fraction(1, 4), 0.1) for n in (16, 32, 64)]
    assert powers == sorted(powers)


def test_parse_schedule_rejects_other_letters():
    assert parse_schedule("zx") == [Basis.Z, Basis.X]
    with pytest.raises(ProtocolError):
        parse_schedule("ZY")

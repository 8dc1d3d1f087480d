"""
Eavesdropper detection by random-basis sifting and error-rate estimation.

Each round the central entity c prepares a GHZ resource over (c, r1, r2) in
the basis it chose, keeping qubit 0 and sending qubits 1 and 2 to the robots.
For two robots this is the Phi+ exchange, with c's reference outcome added.
An active Eve intercepts r1's qubit, measures it and forwards it collapsed.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import comb
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from ..errors import ProtocolError
from ..protocols.sifting import MeasurementEntry, MeasurementRecord, sift
from ..qsim import Basis, EntangledResource, StateSpec
from ..utils.logger import get_logger
from ..utils.seeds import SeedStreams

logger = get_logger(__name__)

SOURCE = "c"
ROBOTS = ("r1", "r2")
PARTIES = (SOURCE,) + ROBOTS
EVE = "eve"

DEFAULT_THRESHOLD = 0.1
DEFAULT_SAMPLE_SIZE = 64


class BasisMode(Enum):
    """How honest parties pick measurement bases."""

    Z = "z"
    PREDEFINED = "predefined"
    RANDOM = "random"


class EveStrategy(Enum):
    PASSIVE = "passive"
    INTERCEPT_RANDOM = "intercept-random"
    INTERCEPT_FIXED_Z = "intercept-fixed-z"
    INTERCEPT_FIXED_X = "intercept-fixed-x"
    # Eve learned the predefined schedule
    INTERCEPT_SCHEDULE = "intercept-schedule"

    @property
    def active(self) -> bool:
        return self is not EveStrategy.PASSIVE


class Verdict(Enum):
    CLEAN = "clean"
    EAVESDROPPER_DETECTED = "eavesdropper-detected"


@dataclass
class DetectionReport:
    rounds_used: int
    disagreements: int
    qber: float
    threshold: float
    verdict: Verdict
    sampled_rounds: List[int] = field(default_factory=list)
    remaining_rounds: List[int] = field(default_factory=list)


def draw_schedule(rounds: int, rng: np.random.Generator) -> List[Basis]:
    """Uniform Z/X basis schedule shared by the honest parties."""
    return [Basis.Z if bit == 0 else Basis.X for bit in rng.integers(0, 2, size=rounds)]


def parse_schedule(text: str) -> List[Basis]:
    """Schedule from a string such as 'ZXXZ'."""
    try:
        return [Basis(ch) for ch in text.upper()]
    except ValueError as e:
        raise ProtocolError(f"Basis schedule must be over 'ZX', got {text!r}") from e


def _random_basis(rng: np.random.Generator) -> Basis:
    return Basis.Z if rng.integers(0, 2) == 0 else Basis.X


def _eve_basis(
    eve: EveStrategy,
    round_index: int,
    rng: np.random.Generator,
    schedule: Optional[Sequence[Basis]],
) -> Basis:
    if eve is EveStrategy.INTERCEPT_FIXED_Z:
        return Basis.Z
    if eve is EveStrategy.INTERCEPT_FIXED_X:
        return Basis.X
    if eve is EveStrategy.INTERCEPT_SCHEDULE:
        if schedule is None:
            raise ProtocolError("intercept-schedule needs a predefined basis schedule")
        return schedule[round_index % len(schedule)]
    return _random_basis(rng)


def run_detection_round(
    round_index: int,
    basis_mode: BasisMode,
    eve: EveStrategy,
    streams: SeedStreams,
    schedule: Optional[Sequence[Basis]] = None,
) -> Dict[str, MeasurementEntry]:
    """
    Emit, (possibly) intercept and measure one detection round.

    Args:
        round_index: Round number
        basis_mode: Basis selection of the honest parties
        eve: Eavesdropper strategy
        streams: Seed streams ('bases:<party>', 'eve', 'measurement')
        schedule: Shared basis schedule for PREDEFINED mode

    Returns:
        Party -> logged entry, including 'eve' when she is active
    """
    if basis_mode is BasisMode.RANDOM:
        bases = {party: _random_basis(streams.stream(f"bases:{party}")) for party in PARTIES}
    else:
        if basis_mode is BasisMode.Z:
            shared = Basis.Z
        else:
            if not schedule:
                raise ProtocolError("Predefined basis mode needs a schedule")
            shared = schedule[round_index % len(schedule)]
        bases = {party: shared for party in PARTIES}

    resource = EntangledResource.prepare(
        round_index, StateSpec.ghz(len(PARTIES), bases[SOURCE]), label="detection"
    )
    entries: Dict[str, MeasurementEntry] = {}

    if eve.active:
        eve_rng = streams.stream(EVE)
        eve_basis = _eve_basis(eve, round_index, eve_rng, schedule)
        eve_outcome = resource.measure(PARTIES.index("r1"), eve_basis, eve_rng)
        entries[EVE] = MeasurementEntry(round_index, eve_basis, eve_outcome)

    measurement = streams.stream("measurement")
    for qubit, party in enumerate(PARTIES):
        outcome = resource.measure(qubit, bases[party], measurement)
        entries[party] = MeasurementEntry(
            round_index, bases[party], outcome, resource.max_norm_drift
        )
    return entries


def run_detection_rounds(
    rounds: int,
    basis_mode: BasisMode,
    eve: EveStrategy,
    streams: SeedStreams,
    schedule: Optional[Sequence[Basis]] = None,
) -> Dict[str, MeasurementRecord]:
    """
    Run many detection rounds.

    Returns:
        Party -> measurement record (c, r1, r2 and, when active, eve)
    """
    parties = PARTIES + ((EVE,) if eve.active else ())
    records = {party: MeasurementRecord(party) for party in parties}
    for i in range(rounds):
        for party, entry in run_detection_round(i, basis_mode, eve, streams, schedule).items():
            records[party].entries.append(entry)
    logger.debug(f"Ran {rounds} detection rounds ({basis_mode.value} bases, eve={eve.value})")
    return records


def honest_sift(records: Mapping[str, MeasurementRecord]) -> List[int]:
    """Valid rounds: c, r1 and r2 all used the same basis. Eve's log is ignored."""
    return sift({party: records[party] for party in PARTIES})


def estimate_qber(
    records: Mapping[str, MeasurementRecord],
    valid_rounds: Sequence[int],
    sample_size: int,
    rng: np.random.Generator,
    threshold: float = DEFAULT_THRESHOLD,
) -> DetectionReport:
    """
    Publish a random sample of valid rounds and compare r1 with r2.

    Sampled rounds are consumed; only the remaining rounds may later serve as
    movement bits.

    Args:
        records: Measurement records of at least r1 and r2
        valid_rounds: Sifted round indices
        sample_size: Rounds to publish
        rng: Sampling randomness
        threshold: Error rate above which Eve is declared present

    Returns:
        Detection report

    Raises:
        ProtocolError: If there are fewer valid rounds than the sample size
    """
    if sample_size <= 0:
        raise ProtocolError(f"Sample size must be positive, got {sample_size}")
    if sample_size > len(valid_rounds):
        raise ProtocolError(
            f"Insufficient valid rounds: need {sample_size}, have {len(valid_rounds)}"
        )
    chosen = rng.choice(len(valid_rounds), size=sample_size, replace=False)
    sampled = sorted(int(valid_rounds[i]) for i in chosen)
    r1, r2 = records["r1"], records["r2"]
    disagreements = sum(1 for i in sampled if r1.outcome(i) != r2.outcome(i))
    qber = disagreements / sample_size
    verdict = Verdict.EAVESDROPPER_DETECTED if qber > threshold else Verdict.CLEAN
    sampled_set = set(sampled)
    remaining = [int(i) for i in valid_rounds if i not in sampled_set]
    logger.debug(f"QBER {qber:.4f} over {sample_size} sampled rounds -> {verdict.value}")
    return DetectionReport(
        rounds_used=sample_size,
        disagreements=disagreements,
        qber=qber,
        threshold=threshold,
        verdict=verdict,
        sampled_rounds=sampled,
        remaining_rounds=remaining,
    )


def detection_probability(sample_size: int, error_rate: Fraction, threshold: float) -> Fraction:
    """
    Exact probability that the sampled error rate exceeds the threshold.

    Args:
        sample_size: Published rounds
        error_rate: Per-round disagreement probability
        threshold: Detection threshold (decimal, read exactly)

    Returns:
        P(Bin(sample_size, error_rate) / sample_size > threshold)
    """
    p = Fraction(error_rate)
    limit = Fraction(str(threshold))
    total = Fraction(0)
    for k in range(sample_size + 1):
        if Fraction(k, sample_size) > limit:
            total += comb(sample_size, k) * p**k * (1 - p) ** (sample_size - k)
    return total

"""
Byzantine robots in a predefined-basis simultaneous walk.

Honest robots share a per-step basis schedule and move identically. Byzantine
robots lack the schedule and either guess a basis, pick a random direction,
or wait for the honest robots to move and copy them. Time is counted in
sub-ticks: the step deadline of step s is s * TICKS_PER_STEP, honest robots
move exactly at the deadline.
"""

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Set

from ..errors import ProtocolError
from ..protocols.source import EntanglementSource
from ..protocols.walks import measure_pair
from ..qsim import Basis, StateSpec, enumerate_outcomes, make_state
from ..swarm import Direction, decode_direction
from ..utils.logger import get_logger
from ..utils.seeds import SeedStreams

logger = get_logger(__name__)

TICKS_PER_STEP = 10

# The commonly quoted 50% match rate for basis guessing; the physical value
# is 5/8 because a wrong-basis outcome still matches 1 time in 4.
STATED_GUESS_BASIS_MATCH = 0.5


class ByzantineStrategy(Enum):
    GUESS_BASIS = "guess-basis"
    RANDOM_DIRECTION = "random-direction"
    FOLLOW_WITH_DELAY = "follow"


@dataclass(frozen=True)
class ByzantineSpec:
    strategy: ByzantineStrategy
    delay: int = 1  # sub-ticks after the deadline, FOLLOW_WITH_DELAY only

    def __post_init__(self) -> None:
        if self.strategy is ByzantineStrategy.FOLLOW_WITH_DELAY and not (
            1 <= self.delay < TICKS_PER_STEP
        ):
            raise ProtocolError(
                f"Follower delay must be in [1, {TICKS_PER_STEP}), got {self.delay}"
            )


@dataclass(frozen=True)
class MoveRecord:
    step: int
    robot_id: str
    direction: Direction
    tick: int
    matched: bool


@dataclass
class ByzantineStepResult:
    step: int
    basis: Basis
    honest_direction: Direction
    moves: Dict[str, Direction]
    bits: Dict[str, tuple]
    records: List[MoveRecord] = field(default_factory=list)
    guessed_bases: Dict[str, Basis] = field(default_factory=dict)
    norm_drift: float = 0.0

    @property
    def matches(self) -> Dict[str, bool]:
        return {r.robot_id: r.matched for r in self.records}


def byzantine_walk_step(
    step: int,
    honest: Sequence[str],
    byzantine: Mapping[str, ByzantineSpec],
    basis: Basis,
    source: EntanglementSource,
    streams: SeedStreams,
) -> ByzantineStepResult:
    """
    One step of the walk with Byzantine participants.

    The source emits two GHZ resources over all honest and Byzantine robots
    (honest robots take the first qubits). Honest robots measure first, in the
    scheduled basis; Byzantine robots then act on their own streams.

    Args:
        step: Step number
        honest: Honest robot ids
        byzantine: Byzantine robot id -> strategy
        basis: This step's scheduled basis
        source: GHZ source of width len(honest) + len(byzantine)
        streams: Seed streams ('measurement', 'byzantine:<id>')

    Returns:
        Per-robot moves, match flags and move timestamps
    """
    if not honest:
        raise ProtocolError("At least one honest robot is required")
    participants = list(honest) + list(byzantine)
    if source.width != len(participants):
        raise ProtocolError(
            f"Source width {source.width} does not cover {len(participants)} robots"
        )
    resources = source.emit(basis)
    honest_bits = measure_pair(
        honest, resources, streams.stream("measurement"), {rid: basis for rid in honest}
    )

    honest_moves = {rid: decode_direction(bits) for rid, bits in honest_bits.items()}
    reference = _majority(list(honest_moves.values()))
    deadline = step * TICKS_PER_STEP

    moves: Dict[str, Direction] = dict(honest_moves)
    bits: Dict[str, tuple] = dict(honest_bits)
    ticks = {rid: deadline for rid in honest}
    guessed: Dict[str, Basis] = {}

    for offset, (robot_id, spec) in enumerate(byzantine.items()):
        qubit = len(honest) + offset
        rng = streams.stream(f"byzantine:{robot_id}")
        if spec.strategy is ByzantineStrategy.GUESS_BASIS:
            guess = Basis.Z if rng.integers(0, 2) == 0 else Basis.X
            guessed[robot_id] = guess
            pair = (
                resources[0].measure(qubit, guess, rng),
                resources[1].measure(qubit, guess, rng),
            )
            moves[robot_id] = decode_direction(pair)
            ticks[robot_id] = deadline
        elif spec.strategy is ByzantineStrategy.RANDOM_DIRECTION:
            draw = rng.integers(0, 2, size=2)
            pair = (int(draw[0]), int(draw[1]))
            moves[robot_id] = decode_direction(pair)
            ticks[robot_id] = deadline
        else:
            # waits for the honest robots to start moving, then copies them
            moves[robot_id] = reference
            pair = None
            ticks[robot_id] = deadline + spec.delay
        bits[robot_id] = pair

    records = [
        MoveRecord(step, rid, moves[rid], ticks[rid], moves[rid] == reference)
        for rid in participants
    ]
    return ByzantineStepResult(
        step=step,
        basis=basis,
        honest_direction=reference,
        moves=moves,
        bits=bits,
        records=records,
        guessed_bases=guessed,
        norm_drift=max(r.max_norm_drift for r in resources),
    )


def _majority(directions: Sequence[Direction]) -> Direction:
    counts = Counter(directions)
    return min(counts, key=lambda d: (-counts[d], d.value))


def identify_byzantine(
    log: Sequence[MoveRecord],
    window: int,
    start_step: Optional[int] = None,
    min_match_rate: float = 1.0,
) -> Set[str]:
    """
    Flag robots that move late or stray from the synchronized majority.

    The reference move of each step is the majority direction among moves
    made at the deadline, so no knowledge of who is honest is needed.

    Args:
        log: Move records
        window: Number of consecutive steps to examine
        start_step: First step of the window (default: the last `window` steps)
        min_match_rate: Robots matching the reference less often are flagged

    Returns:
        Suspect robot ids

    Raises:
        ProtocolError: If the window is empty
    """
    if window <= 0:
        raise ProtocolError(f"Window must cover at least one step, got {window}")
    if not log:
        raise ProtocolError("Empty move log")
    if start_step is None:
        start_step = max(r.step for r in log) - window + 1
    in_window = [r for r in log if start_step <= r.step < start_step + window]
    if not in_window:
        raise ProtocolError(f"No moves in window [{start_step}, {start_step + window})")

    by_step: Dict[int, List[MoveRecord]] = {}
    for record in in_window:
        by_step.setdefault(record.step, []).append(record)

    late: Set[str] = set()
    matched: Counter = Counter()
    moved: Counter = Counter()
    for step, records in by_step.items():
        deadline = step * TICKS_PER_STEP
        on_time = [r.direction for r in records if r.tick <= deadline]
        reference = _majority(on_time) if on_time else None
        for r in records:
            moved[r.robot_id] += 1
            if r.tick > deadline:
                late.add(r.robot_id)
            if r.direction == reference:
                matched[r.robot_id] += 1

    suspects = set(late)
    for robot_id, count in moved.items():
        if matched[robot_id] / count < min_match_rate:
            suspects.add(robot_id)
    return suspects


def byzantine_match_probability(spec: ByzantineSpec, n_honest: int = 2) -> float:
    """
    Exact per-step probability that a Byzantine move equals the honest move.

    GUESS_BASIS is evaluated by enumerating every measurement branch of the
    two GHZ resources for both scheduled bases and both guesses.

    Args:
        spec: Byzantine strategy
        n_honest: Number of honest robots sharing the resources

    Returns:
        Match probability
    """
    if spec.strategy is ByzantineStrategy.RANDOM_DIRECTION:
        return 0.25
    if spec.strategy is ByzantineStrategy.FOLLOW_WITH_DELAY:
        return 1.0

    width = n_honest + 1
    total = 0.0
    for scheduled in Basis:
        for guess in Basis:
            # one resource: honest qubits in the scheduled basis, last qubit in the guess
            order = [(q, scheduled) for q in range(n_honest)] + [(n_honest, guess)]
            outcomes = enumerate_outcomes(make_state(StateSpec.ghz(width, scheduled)), order)
            bit_match = sum(p for bits, p in outcomes.items() if bits[-1] == bits[0])
            # two independent resources per step, uniform schedule and guess
            total += 0.25 * bit_match**2
    return total

"""
Scenario runner.

run_scenario executes one validated scenario from its seed and returns the
trace together with summary statistics. Every probability in the statistics
carries its count and number of trials so confidence bounds can be
recomputed from the stats file alone.
"""

from collections import Counter
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import ProtocolError
from .magic_square import classical_optimum, classical_round, quantum_round, sensor_board_check
from .protocols import (
    EntanglementSource,
    MeasurementRecord,
    StepOutcome,
    avoidance_step,
    controlled_step,
    coordinated_step,
    enumerate_avoidance_outcomes,
    ghz_sifted_step,
    independent_step,
    sift_subsets,
    usable_rounds,
)
from .qsim import Basis
from .scenario import Coordination, GameStrategy, Protocol, Scenario
from .security import (
    STATED_GUESS_BASIS_MATCH,
    TICKS_PER_STEP,
    BasisMode,
    ByzantineStrategy,
    MoveRecord,
    Verdict,
    byzantine_match_probability,
    byzantine_walk_step,
    draw_schedule,
    estimate_qber,
    honest_sift,
    identify_byzantine,
    parse_schedule,
    run_detection_rounds,
)
from .security.eavesdrop import EVE, PARTIES, SOURCE
from .swarm import Board, CrashEvent, Direction, Position, decode_direction, distance
from .trace import Trace, TraceEvent, TraceKind
from .utils.logger import get_logger
from .utils.seeds import SeedStreams

logger = get_logger(__name__)

Stats = Dict[str, Any]


def rate(count: int, trials: int) -> Dict[str, Any]:
    """A frequency with the numbers it was computed from."""
    return {"count": count, "trials": trials, "value": count / trials if trials else 0.0}


class _Tally:
    """Direction counts and the largest normalization drift seen."""

    def __init__(self, robots: Sequence[str]):
        self.directions: Dict[str, Counter] = {rid: Counter() for rid in robots}
        self.max_norm_drift = 0.0

    def add(self, outcome: StepOutcome) -> None:
        for robot_id, direction in outcome.directions.items():
            self.directions[robot_id][direction.value] += 1
        self.drift(outcome.norm_drift)

    def drift(self, value: float) -> None:
        self.max_norm_drift = max(self.max_norm_drift, value)

    def summary(self) -> Stats:
        counts = {
            rid: {d.value: counter[d.value] for d in Direction}
            for rid, counter in self.directions.items()
        }
        first = next(iter(self.directions))
        total = sum(self.directions[first].values())
        return {
            "direction_counts": counts,
            "direction_frequencies": {
                d.value: rate(self.directions[first][d.value], total) for d in Direction
            },
            "max_norm_drift": self.max_norm_drift,
        }


def _place_robots(s: Scenario) -> Board:
    board = Board(bounds=s.bounds, swap_crash=s.swap_crash)
    for robot_id, position in zip(s.robot_ids, s.positions):
        board.add_robot(robot_id, Position(*position))
    return board


def _board_summary(board: Board, s: Scenario, with_paths: bool = False) -> Stats:
    summary: Stats = {
        "initial_positions": {rid: list(pos) for rid, pos in zip(s.robot_ids, s.positions)},
        "final_positions": {rid: list(r.position) for rid, r in board.robots.items()},
        "crashed_robots": sorted(rid for rid, r in board.robots.items() if r.crashed),
        "moves_made": {rid: len(r.path) - 1 for rid, r in board.robots.items()},
    }
    if with_paths:
        summary["paths"] = {rid: [list(p) for p in r.path] for rid, r in board.robots.items()}
    return summary


def _record_step(trace: Trace, step: int, outcome: StepOutcome, **move_fields: Any) -> None:
    if outcome.resource_ids:
        trace.record(
            step,
            TraceKind.EMIT,
            resources=list(outcome.resource_ids),
            config=outcome.config.value if outcome.config else None,
        )
        for robot_id, bits in outcome.bits.items():
            basis = outcome.bases.get(robot_id, Basis.Z)
            trace.record(
                step, TraceKind.MEASURE, party=robot_id, basis=basis.value, bits=list(bits)
            )
    for robot_id, direction in outcome.directions.items():
        trace.record(
            step,
            TraceKind.MOVE,
            robot=robot_id,
            direction=direction.value,
            position=list(outcome.positions[robot_id]),
            **move_fields,
        )
    _record_crashes(trace, step, outcome.crashes)


def _record_crashes(trace: Trace, step: int, crashes: Sequence[CrashEvent]) -> None:
    for crash in crashes:
        trace.record(
            step,
            TraceKind.CRASH,
            robots=list(crash.robot_ids),
            position=list(crash.position),
            crash=crash.kind,
        )


def _basis_schedule(s: Scenario, streams: SeedStreams) -> Optional[List[Basis]]:
    if s.basis_mode is not BasisMode.PREDEFINED:
        return None
    if s.basis_schedule:
        return parse_schedule(s.basis_schedule)
    return draw_schedule(s.steps, streams.stream("schedule"))


def _scheduled(schedule: Optional[Sequence[Basis]], step: int) -> Basis:
    return schedule[step % len(schedule)] if schedule else Basis.Z


def _random_basis(streams: SeedStreams, party: str) -> Basis:
    return Basis.Z if streams.stream(f"bases:{party}").integers(0, 2) == 0 else Basis.X


def _run_walk(s: Scenario, streams: SeedStreams, trace: Trace) -> Stats:
    board = _place_robots(s)
    robots = s.robot_ids
    first, second = robots
    source = EntanglementSource.epr_pair()
    measurement = streams.stream("measurement")
    private = {rid: streams.stream(f"walk:{rid}") for rid in robots}
    schedule = _basis_schedule(s, streams)
    tally = _Tally(robots)

    coordinated = s.coordination is Coordination.GLOBAL
    started_at: Optional[int] = 0 if coordinated else None
    offset = board.relative_offset(first, second)
    offset_preserved = True
    coordinated_steps = agreements = 0
    min_distance = distance(board.position(first), board.position(second))
    halted_at: Optional[int] = None

    for step in range(s.steps):
        apart = distance(board.position(first), board.position(second))
        if not coordinated and apart <= s.coordination_distance:
            coordinated, started_at = True, step
            offset = board.relative_offset(first, second)
            logger.debug(f"Robots within distance {s.coordination_distance} at step {step}")
        if coordinated:
            outcome = coordinated_step(
                board, robots, source, measurement, _scheduled(schedule, step)
            )
            coordinated_steps += 1
            agreements += int(outcome.directions[first] == outcome.directions[second])
            if board.relative_offset(first, second) != offset:
                offset_preserved = False
        else:
            outcome = independent_step(board, robots, private)
        _record_step(trace, step, outcome, mode="coordinated" if coordinated else "independent")
        tally.add(outcome)
        if outcome.crashes:
            halted_at = step
            break
        min_distance = min(min_distance, distance(board.position(first), board.position(second)))

    stats = tally.summary()
    stats.update(_board_summary(board, s))
    stats.update(
        {
            "coordination": s.coordination.value,
            "coordination_started_at": started_at,
            "coordinated_steps": coordinated_steps,
            "direction_agreement": rate(agreements, coordinated_steps),
            "offset_preserved": offset_preserved,
            "min_distance": min_distance,
            "halted_at": halted_at,
        }
    )
    return stats


def _run_ghz_walk(s: Scenario, streams: SeedStreams, trace: Trace) -> Stats:
    board = _place_robots(s)
    robots = s.robot_ids
    source = EntanglementSource.ghz(len(robots))
    measurement = streams.stream("measurement")
    schedule = _basis_schedule(s, streams)
    tally = _Tally(robots)
    records = {party: MeasurementRecord(party) for party in [SOURCE] + robots}
    identical = 0

    for step in range(s.steps):
        if s.basis_mode is BasisMode.RANDOM:
            source_basis = _random_basis(streams, SOURCE)
            bases = {rid: _random_basis(streams, rid) for rid in robots}
        else:
            source_basis = _scheduled(schedule, step)
            bases = {rid: source_basis for rid in robots}
        outcome = ghz_sifted_step(board, robots, source, measurement, source_basis, bases)
        records[SOURCE].log(step, source_basis, None)
        for rid in robots:
            records[rid].log(step, bases[rid], None)
        _record_step(trace, step, outcome)
        if s.basis_mode is BasisMode.RANDOM:
            published = {SOURCE: source_basis.value}
            published.update({rid: bases[rid].value for rid in robots})
            trace.record(step, TraceKind.PUBLISH, bases=published, valid=outcome.valid)
        if outcome.valid:
            identical += int(len(set(outcome.bits.values())) == 1)
        tally.add(outcome)

    subsets = sift_subsets(records, source=SOURCE)
    all_valid = len(usable_rounds(subsets, robots))
    subset_counts = {
        ",".join(sorted(subset)): len(rounds)
        for subset, rounds in sorted(subsets.items(), key=lambda kv: (-len(kv[0]), sorted(kv[0])))
    }
    expected = 0.5 ** len(robots) if s.basis_mode is BasisMode.RANDOM else 1.0

    stats = tally.summary()
    stats.update(_board_summary(board, s))
    stats.update(
        {
            "basis_mode": s.basis_mode.value,
            "all_match": rate(all_valid, s.steps),
            "expected_all_match": expected,
            "identical_bits_on_valid_rounds": rate(identical, all_valid),
            "subset_counts": subset_counts,
        }
    )
    return stats


def _run_control(s: Scenario, streams: SeedStreams, trace: Trace) -> Stats:
    board = _place_robots(s)
    robots = s.robot_ids
    source = EntanglementSource.product_directive(s.directives)
    measurement = streams.stream("measurement")
    tally = _Tally(robots)
    halted_at: Optional[int] = None
    for step in range(s.steps):
        outcome = controlled_step(board, robots, source, measurement)
        _record_step(trace, step, outcome)
        tally.add(outcome)
        if outcome.crashes:
            halted_at = step
            break
    stats = tally.summary()
    stats.update(_board_summary(board, s, with_paths=True))
    stats.update({"directives": len(s.directives), "halted_at": halted_at})
    return stats


def _run_avoid(s: Scenario, streams: SeedStreams, trace: Trace) -> Stats:
    board = _place_robots(s)
    robots = s.robot_ids
    first, second = robots
    source = EntanglementSource.avoidance_pair(s.avoidance_policy, streams.stream("source"))
    measurement = streams.stream("measurement")
    tally = _Tally(robots)
    configs: Counter = Counter()
    outside_table = decreases = 0
    halted_at: Optional[int] = None
    min_distance = distance(board.position(first), board.position(second))

    for step in range(s.steps):
        before = distance(board.position(first), board.position(second))
        outcome = avoidance_step(board, robots, source, measurement)
        assert outcome.config is not None
        configs[outcome.config.value] += 1
        pair = (outcome.bits[first], outcome.bits[second])
        if pair not in enumerate_avoidance_outcomes(outcome.config):
            outside_table += 1
        _record_step(trace, step, outcome)
        tally.add(outcome)
        if outcome.crashes:
            halted_at = step
            break
        after = distance(board.position(first), board.position(second))
        decreases += int(after < before)
        min_distance = min(min_distance, after)

    stats = tally.summary()
    stats.update(_board_summary(board, s))
    stats.update(
        {
            "avoidance_policy": s.avoidance_policy.value,
            "config_counts": dict(sorted(configs.items())),
            "outcomes_outside_table": outside_table,
            "distance_decreases": decreases,
            "min_distance": min_distance,
            "halted_at": halted_at,
        }
    )
    return stats


def _run_qkd(s: Scenario, streams: SeedStreams, trace: Trace) -> Stats:
    schedule = _basis_schedule(s, streams)
    records = run_detection_rounds(s.steps, s.basis_mode, s.eve, streams, schedule)
    max_drift = 0.0
    for i in range(s.steps):
        trace.record(i, TraceKind.EMIT, resources=[i], parties=list(PARTIES))
        for party in ((EVE,) if s.eve.active else ()) + PARTIES:
            entry = records[party].entries[i]
            max_drift = max(max_drift, entry.norm_drift)
            trace.record(
                i, TraceKind.MEASURE, party=party, basis=entry.basis.value, bits=[entry.outcome]
            )
        trace.record(
            i,
            TraceKind.PUBLISH,
            bases={party: records[party].entries[i].basis.value for party in PARTIES},
        )

    valid = honest_sift(records)
    report = estimate_qber(
        records, valid, s.sample_size, streams.stream("sampling"), threshold=s.threshold
    )
    trace.record(
        s.steps,
        TraceKind.VERDICT,
        verdict=report.verdict.value,
        qber=report.qber,
        disagreements=report.disagreements,
        sample_size=report.rounds_used,
        threshold=report.threshold,
    )
    logger.info(f"Detection verdict: {report.verdict.value} (QBER {report.qber:.4f})")

    r1, r2 = records["r1"], records["r2"]
    sifted_disagreements = sum(1 for i in valid if r1.outcome(i) != r2.outcome(i))
    stats: Stats = {
        "basis_mode": s.basis_mode.value,
        "eve": s.eve.value,
        "verdict": report.verdict.value,
        "qber": rate(report.disagreements, report.rounds_used),
        "threshold": report.threshold,
        "sifted": rate(len(valid), s.steps),
        "expected_sifted": 0.25 if s.basis_mode is BasisMode.RANDOM else 1.0,
        "sifted_disagreement": rate(sifted_disagreements, len(valid)),
        "max_norm_drift": max_drift,
    }
    if s.eve.active:
        eve = records[EVE]
        same_basis = [i for i in range(s.steps) if eve.entries[i].basis is r1.entries[i].basis]
        stats["eve_r1_agreement"] = rate(
            sum(1 for i in same_basis if eve.outcome(i) == r1.outcome(i)), len(same_basis)
        )

    board = _place_robots(s)
    movement_steps = agreements = 0
    if report.verdict is Verdict.CLEAN:
        movement_steps, agreements = _move_on_key(
            s, board, records, report.remaining_rounds, trace
        )
    stats["movement_steps"] = movement_steps
    stats["movement_agreement"] = rate(agreements, movement_steps)
    stats["unused_rounds"] = len(report.remaining_rounds) - 2 * movement_steps
    stats.update(_board_summary(board, s))
    return stats


def _move_on_key(
    s: Scenario,
    board: Board,
    records: Mapping[str, MeasurementRecord],
    remaining: Sequence[int],
    trace: Trace,
) -> Tuple[int, int]:
    """
    Spend the unsampled sifted rounds two at a time as movement bits.

    Returns:
        Tuple of (movement steps taken, steps where both robots agreed)
    """
    movement_steps = agreements = 0
    for k in range(len(remaining) // 2):
        a, b = remaining[2 * k], remaining[2 * k + 1]
        moves: Dict[str, Direction] = {}
        for rid in s.robot_ids:
            bits = (records[rid].outcome(a), records[rid].outcome(b))
            moves[rid] = decode_direction(bits)
        _, crashes = board.apply_moves(moves)
        step = s.steps + k
        movement_steps += 1
        agreements += int(len(set(moves.values())) == 1)
        for rid, direction in moves.items():
            trace.record(
                step,
                TraceKind.MOVE,
                robot=rid,
                direction=direction.value,
                position=list(board.position(rid)),
                rounds=[a, b],
            )
        _record_crashes(trace, step, crashes)
        if crashes:
            break
    return movement_steps, agreements


def _run_byzantine(s: Scenario, streams: SeedStreams, trace: Trace) -> Stats:
    board = _place_robots(s)
    honest = s.honest_ids
    byzantine = dict(zip(s.byzantine_ids, s.byzantine))
    source = EntanglementSource.ghz(s.robots)
    if s.basis_schedule:
        schedule = parse_schedule(s.basis_schedule)
    else:
        schedule = draw_schedule(s.steps, streams.stream("schedule"))
    log: List[MoveRecord] = []
    max_drift = 0.0
    windows = 0
    flagged: Counter = Counter()

    for step in range(s.steps):
        result = byzantine_walk_step(
            step, honest, byzantine, _scheduled(schedule, step), source, streams
        )
        max_drift = max(max_drift, result.norm_drift)
        alive = set(board.live_robots())
        live = {rid: d for rid, d in result.moves.items() if rid in alive}
        _, crashes = board.apply_moves(live)
        trace.record(step, TraceKind.EMIT, basis=result.basis.value, width=s.robots)
        for rid, bits in result.bits.items():
            if rid in honest or rid in result.guessed_bases:
                basis = result.guessed_bases.get(rid, result.basis)
                trace.record(
                    step, TraceKind.MEASURE, party=rid, basis=basis.value, bits=list(bits)
                )
        for record in result.records:
            if record.robot_id in live:
                log.append(record)
                trace.record(
                    step,
                    TraceKind.MOVE,
                    robot=record.robot_id,
                    direction=record.direction.value,
                    position=list(board.position(record.robot_id)),
                    tick=record.tick,
                    matched=record.matched,
                )
        _record_crashes(trace, step, crashes)

        start = step + 1 - s.window
        if (step + 1) % s.window == 0 and any(r.step >= start for r in log):
            windows += 1
            suspects = identify_byzantine(log, s.window, start, s.match_threshold)
            flagged.update(suspects)
            trace.record(
                step, TraceKind.VERDICT, window=[start, step + 1], suspects=sorted(suspects)
            )

    robots_stats: Stats = {}
    for rid in s.robot_ids:
        mine = [r for r in log if r.robot_id == rid]
        entry: Stats = {
            "role": "byzantine" if rid in byzantine else "honest",
            "match": rate(sum(1 for r in mine if r.matched), len(mine)),
            "late_moves": sum(1 for r in mine if r.tick > r.step * TICKS_PER_STEP),
            "flagged_windows": rate(flagged[rid], windows),
        }
        if rid in byzantine:
            spec = byzantine[rid]
            entry["strategy"] = spec.strategy.value
            entry["predicted_match"] = byzantine_match_probability(spec, len(honest))
            if spec.strategy is ByzantineStrategy.GUESS_BASIS:
                entry["stated_match"] = STATED_GUESS_BASIS_MATCH
            if spec.strategy is ByzantineStrategy.FOLLOW_WITH_DELAY:
                entry["delay"] = spec.delay
        robots_stats[rid] = entry

    stats: Stats = {
        "window": s.window,
        "match_threshold": s.match_threshold,
        "windows": windows,
        "robots_detail": robots_stats,
        "max_norm_drift": max_drift,
    }
    stats.update(_board_summary(board, s))
    return stats


def _run_magic_square(s: Scenario, streams: SeedStreams, trace: Trace) -> Stats:
    referee = streams.stream("referee")
    measurement = streams.stream("measurement")
    quantum = s.game_strategy is GameStrategy.QUANTUM
    optimum, strategy = classical_optimum()
    wins = parity_violations = 0
    per_input: Dict[Tuple[int, int], List[int]] = {
        (r, c): [0, 0] for r in range(3) for c in range(3)
    }
    bits: Counter = Counter()
    max_drift = 0.0

    for i in range(s.steps):
        row, col = int(referee.integers(3)), int(referee.integers(3))
        if quantum:
            game = quantum_round(row, col, measurement)
        else:
            game = classical_round(strategy, row, col)
        fired = sensor_board_check(game)
        max_drift = max(max_drift, game.norm_drift)
        wins += int(game.win)
        per_input[(row, col)][0] += int(game.win)
        per_input[(row, col)][1] += 1
        product_row = game.row_values[0] * game.row_values[1] * game.row_values[2]
        product_col = game.col_values[0] * game.col_values[1] * game.col_values[2]
        parity_violations += int(product_row != 1 or product_col != -1)
        coordination_bit = (0 if game.shared_value == 1 else 1) if game.win else None
        if coordination_bit is not None:
            bits[coordination_bit] += 1
        trace.record(
            i,
            TraceKind.GAME_ROUND,
            row=row,
            col=col,
            row_values=list(game.row_values),
            col_values=list(game.col_values),
            win=game.win,
            fired=[list(f) for f in fired],
            coordination_bit=coordination_bit,
        )

    return {
        "game_strategy": s.game_strategy.value,
        "win_rate": rate(wins, s.steps),
        "expected_win_rate": 1.0 if quantum else float(optimum),
        "classical_optimum": str(optimum),
        "per_input": {f"{r},{c}": rate(w, n) for (r, c), (w, n) in sorted(per_input.items())},
        "parity_violations": parity_violations,
        "coordination_bits": {"0": bits[0], "1": bits[1]},
        "max_norm_drift": max_drift,
    }


_RUNNERS: Dict[Protocol, Callable[[Scenario, SeedStreams, Trace], Stats]] = {
    Protocol.WALK: _run_walk,
    Protocol.GHZ_WALK: _run_ghz_walk,
    Protocol.CONTROL: _run_control,
    Protocol.AVOID: _run_avoid,
    Protocol.QKD: _run_qkd,
    Protocol.BYZANTINE: _run_byzantine,
    Protocol.MAGIC_SQUARE: _run_magic_square,
}


def run_scenario(scenario: Scenario) -> Tuple[List[TraceEvent], Stats]:
    """
    Run a scenario deterministically from its seed.

    Args:
        scenario: Validated scenario

    Returns:
        Tuple of (trace events, summary statistics)

    Raises:
        ProtocolError: If a protocol precondition fails during the run, e.g.
            too few sifted rounds for the detection sample
    """
    if scenario.protocol not in _RUNNERS:
        raise ProtocolError(f"No runner for protocol {scenario.protocol}")
    logger.info(
        f"Running scenario '{scenario.name}' ({scenario.protocol.value}, "
        f"{scenario.steps} steps, seed {scenario.seed})"
    )
    streams = SeedStreams(scenario.seed)
    trace = Trace()
    stats: Stats = {
        "scenario": scenario.name,
        "protocol": scenario.protocol.value,
        "seed": scenario.seed,
        "robots": scenario.robots,
        "steps": scenario.steps,
    }
    stats.update(_RUNNERS[scenario.protocol](scenario, streams, trace))
    stats["crashes"] = trace.count(TraceKind.CRASH)
    stats["trace_events"] = len(trace)
    logger.info(
        f"Scenario '{scenario.name}' finished: {len(trace)} events, {stats['crashes']} crashes"
    )
    return trace.events, stats

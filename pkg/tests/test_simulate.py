import pytest
from conftest import within_sigma

from qswarm.errors import ProtocolError, QSwarmError
from qswarm.simulate import rate, run_scenario
from qswarm.trace import Trace, TraceKind


def kinds(events):
    return [event.kind for event in events]


def moves_of(events, robot_id):
    return [e for e in events if e.kind is TraceKind.MOVE and e.payload["robot"] == robot_id]


def test_rate_keeps_counts():
    assert rate(1, 4) == {"count": 1, "trials": 4, "value": 0.25}
    assert rate(0, 0)["value"] == 0.0


def test_trace_steps_must_not_decrease():
    trace = Trace()
    trace.record(2, TraceKind.EMIT)
    with pytest.raises(QSwarmError):
        trace.record(1, TraceKind.EMIT)
    assert trace.events[0].to_json() == '{"kind":"emit","step":2}'


def test_identical_seeds_give_identical_traces(scenario_text):
    scenario = scenario_text("protocol: walk\ncoordination: local\nsteps: 300\nseed: 11\n")
    first, first_stats = run_scenario(scenario)
    second, second_stats = run_scenario(scenario)
    assert [e.to_json() for e in first] == [e.to_json() for e in second]
    assert first_stats == second_stats


def test_different_seeds_give_different_traces(scenario_text):
    a, _ = run_scenario(scenario_text("protocol: walk\nsteps: 50\nseed: 1\n"))
    b, _ = run_scenario(scenario_text("protocol: walk\nsteps: 50\nseed: 2\n"))
    assert [e.to_json() for e in a] != [e.to_json() for e in b]


def test_global_walk(scenario_text):
    scenario = scenario_text("protocol: walk\nsteps: 10000\nseed: 3\n")
    events, stats = run_scenario(scenario)
    assert stats["offset_preserved"]
    assert stats["direction_agreement"]["value"] == 1.0
    assert stats["crashes"] == 0
    for entry in stats["direction_frequencies"].values():
        assert within_sigma(entry["count"], entry["trials"], 0.25)
    assert stats["max_norm_drift"] <= 1e-12
    steps = [e.step for e in events]
    assert steps == sorted(steps)


def test_every_position_change_has_a_move_event(scenario_text):
    events, stats = run_scenario(scenario_text("protocol: walk\nsteps: 40\nseed: 4\n"))
    for robot_id, final in stats["final_positions"].items():
        robot_moves = moves_of(events, robot_id)
        assert len(robot_moves) == stats["moves_made"][robot_id]
        assert robot_moves[-1].payload["position"] == final


def test_local_walk_switches_to_coordination(scenario_text):
    scenario = scenario_text(
        """
        protocol: walk
        coordination: local
        coordination_distance: 3
        positions: [[0, 0], [2, 0]]
        steps: 50
        """
    )
    events, stats = run_scenario(scenario)
    assert stats["coordination_started_at"] == 0
    assert stats["coordinated_steps"] == 50
    assert stats["crashes"] == 0
    assert {e.payload["mode"] for e in events if e.kind is TraceKind.MOVE} == {"coordinated"}


def test_ghz_walk_moves_everyone_identically(scenario_text):
    _, stats = run_scenario(scenario_text("protocol: ghz-walk\nrobots: 3\nsteps: 2000\n"))
    assert stats["all_match"]["value"] == 1.0
    assert stats["identical_bits_on_valid_rounds"]["value"] == 1.0


def test_ghz_walk_random_bases_sift_rate(scenario_text):
    scenario = scenario_text(
        "protocol: ghz-walk\nrobots: 2\nbasis_mode: random\nsteps: 10000\nseed: 5\n"
    )
    events, stats = run_scenario(scenario)
    assert stats["expected_all_match"] == 0.25
    assert within_sigma(stats["all_match"]["count"], 10000, 0.25)
    assert stats["identical_bits_on_valid_rounds"]["value"] == 1.0
    assert TraceKind.PUBLISH in kinds(events)
    assert len(moves_of(events, "r1")) == stats["all_match"]["count"]


def test_control_is_seed_independent(scenario_text):
    paths = set()
    for seed in range(10):
        scenario = scenario_text(
            f"protocol: control\ndirectives: [['00', '01'], ['11', '11']]\nseed: {seed}\n"
        )
        _, stats = run_scenario(scenario)
        paths.add(str(stats["paths"]))
    assert len(paths) == 1


def test_avoid_never_crashes(scenario_text):
    scenario = scenario_text(
        "protocol: avoid\nsteps: 20000\nseed: 6\npositions: [[0, 0], [1, 1]]\n"
    )
    _, stats = run_scenario(scenario)
    assert stats["crashes"] == 0
    assert stats["outcomes_outside_table"] == 0
    assert stats["min_distance"] >= 1
    assert sum(stats["config_counts"].values()) == 20000


def test_avoid_with_a_fixed_unsafe_configuration_crashes(scenario_text):
    crashes = 0
    for seed in range(20):
        scenario = scenario_text(
            "protocol: avoid\navoidance_policy: config2\npositions: [[0, 0], [1, 1]]\n"
            f"steps: 1\nseed: {seed}\n"
        )
        events, stats = run_scenario(scenario)
        crashes += stats["crashes"]
        if stats["crashes"]:
            assert stats["halted_at"] == 0
            assert events[-1].kind is TraceKind.CRASH
    # half of the configuration's outcomes send both robots to one tile
    assert crashes > 0


def test_qkd_passive_is_clean_and_moves_on_the_key(scenario_text):
    _, stats = run_scenario(scenario_text("protocol: qkd\nsteps: 400\nseed: 7\n"))
    assert stats["verdict"] == "clean"
    assert stats["qber"]["count"] == 0
    assert stats["movement_steps"] == (400 - 64) // 2
    assert stats["movement_agreement"]["value"] == 1.0


def test_qkd_intercept_resend_is_detected(scenario_text):
    scenario = scenario_text(
        "protocol: qkd\nsteps: 2000\nbasis_mode: random\neve: intercept-random\n"
        "sample_size: 200\nseed: 8\n"
    )
    events, stats = run_scenario(scenario)
    assert stats["verdict"] == "eavesdropper-detected"
    assert stats["movement_steps"] == 0
    assert within_sigma(
        stats["sifted_disagreement"]["count"], stats["sifted_disagreement"]["trials"], 0.25
    )
    assert [e for e in events if e.kind is TraceKind.VERDICT][0].step == 2000
    assert not [e for e in events if e.kind is TraceKind.MOVE]


def test_qkd_schedule_aware_eve_goes_unnoticed(scenario_text):
    scenario = scenario_text(
        "protocol: qkd\nsteps: 300\nbasis_mode: predefined\neve: intercept-schedule\n"
    )
    _, stats = run_scenario(scenario)
    assert stats["verdict"] == "clean"
    assert stats["sifted_disagreement"]["count"] == 0
    assert stats["eve_r1_agreement"]["value"] == 1.0


def test_qkd_without_enough_sifted_rounds(scenario_text):
    scenario = scenario_text("protocol: qkd\nsteps: 100\nbasis_mode: random\n")
    with pytest.raises(ProtocolError):
        run_scenario(scenario)


def test_byzantine_run(scenario_text):
    scenario = scenario_text(
        """
        protocol: byzantine
        robots: 5
        steps: 400
        window: 20
        byzantine:
          - strategy: follow
            delay: 2
          - strategy: random-direction
        """
    )
    events, stats = run_scenario(scenario)
    detail = stats["robots_detail"]
    assert stats["windows"] == 20
    for rid in ("r1", "r2", "r3"):
        assert detail[rid]["role"] == "honest"
        assert detail[rid]["match"]["value"] == 1.0
        assert detail[rid]["flagged_windows"]["count"] == 0
    assert detail["r4"]["flagged_windows"]["value"] == 1.0
    assert detail["r4"]["late_moves"] == 400
    assert detail["r5"]["flagged_windows"]["value"] == 1.0
    assert detail["r5"]["predicted_match"] == 0.25
    steps = [e.step for e in events]
    assert steps == sorted(steps)


def test_magic_square_quantum_wins_everything(scenario_text):
    _, stats = run_scenario(scenario_text("protocol: magic-square\nsteps: 900\n"))
    assert stats["win_rate"]["value"] == 1.0
    assert stats["parity_violations"] == 0
    assert stats["classical_optimum"] == "8/9"
    assert sum(stats["coordination_bits"].values()) == 900
    assert all(entry["value"] == 1.0 for entry in stats["per_input"].values())


def test_magic_square_classical_plays_the_optimum(scenario_text):
    scenario = scenario_text("protocol: magic-square\ngame_strategy: classical\nsteps: 900\n")
    events, stats = run_scenario(scenario)
    assert stats["expected_win_rate"] == pytest.approx(8 / 9)
    lost_inputs = [key for key, entry in stats["per_input"].items() if entry["value"] < 1.0]
    assert len(lost_inputs) == 1
    assert all(e.kind is TraceKind.GAME_ROUND for e in events)


def test_crash_count_matches_crash_events(scenario_text):
    scenario = scenario_text(
        "protocol: avoid\navoidance_policy: config2\npositions: [[0, 0], [1, 1]]\n"
        "steps: 500\nseed: 9\n"
    )
    events, stats = run_scenario(scenario)
    assert stats["crashes"] == sum(1 for e in events if e.kind is TraceKind.CRASH)


def test_default_local_walk_reaches_coordination(scenario_text):
    started = 0
    for seed in range(10):
        scenario = scenario_text(
            f"protocol: walk\ncoordination: local\nsteps: 2000\nseed: {seed}\n"
        )
        assert scenario.positions == ((0, 0), (3, 0))
        _, stats = run_scenario(scenario)
        # an odd start distance stays odd, so the robots never share a tile
        assert stats["crashes"] == 0
        if stats["coordination_started_at"] is not None:
            started += 1
            assert stats["offset_preserved"]
            assert stats["min_distance"] >= 1
    assert started > 0

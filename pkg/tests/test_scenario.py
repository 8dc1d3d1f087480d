import glob
import os

import pytest

from qswarm.errors import ScenarioError
from qswarm.scenario import (
    DEFAULT_SPACING,
    LOCAL_SPACING,
    Coordination,
    Protocol,
    load_scenario,
    parse_scenario,
    render_scenario,
    scenario_to_dict,
    with_overrides,
)
from qswarm.security import BasisMode, ByzantineStrategy, EveStrategy
from qswarm.swarm import Bounds


def test_minimal_walk(scenario_text):
    scenario = scenario_text(
        """
        protocol: walk
        robots: 2
        steps: 100
        seed: 7
        """
    )
    assert scenario.protocol is Protocol.WALK
    assert scenario.steps == 100
    assert scenario.seed == 7
    assert scenario.positions == ((0, 0), (DEFAULT_SPACING, 0))
    assert scenario.robot_ids == ["r1", "r2"]


def test_local_walks_start_close(scenario_text):
    scenario = scenario_text("protocol: walk\ncoordination: local\n")
    assert scenario.coordination is Coordination.LOCAL
    assert scenario.positions == ((0, 0), (LOCAL_SPACING, 0))
    assert LOCAL_SPACING % 2 == 1


@pytest.mark.parametrize(
    "positions, threshold",
    [("[[0, 0], [4, 0]]", 1), ("[[0, 0], [2, 2]]", 1), ("[[0, 0], [3, 0]]", 0)],
)
def test_local_walk_with_unreachable_threshold_is_rejected(scenario_text, positions, threshold):
    with pytest.raises(ScenarioError) as info:
        scenario_text(
            f"protocol: walk\ncoordination: local\ncoordination_distance: {threshold}\n"
            f"positions: {positions}\n"
        )
    assert "parity" in str(info.value)
    assert info.value.line == 4


@pytest.mark.parametrize(
    "positions, threshold",
    [("[[0, 0], [4, 0]]", 2), ("[[0, 0], [5, 0]]", 1), ("[[0, 0], [1, 0]]", 1)],
)
def test_local_walk_with_reachable_threshold_is_accepted(scenario_text, positions, threshold):
    scenario = scenario_text(
        f"protocol: walk\ncoordination: local\ncoordination_distance: {threshold}\n"
        f"positions: {positions}\n"
    )
    assert scenario.coordination_distance == threshold


def test_duplicate_positions_are_rejected(scenario_text):
    with pytest.raises(ScenarioError) as info:
        scenario_text(
            """
            protocol: walk
            positions: [[0, 0], [0, 0]]
            """
        )
    assert "duplicate" in str(info.value)


def test_qkd_sample_larger_than_rounds(scenario_text):
    with pytest.raises(ScenarioError) as info:
        scenario_text(
            """
            protocol: qkd
            steps: 32
            sample_size: 64
            """
        )
    # the dedented document starts with a blank line
    assert info.value.line == 4


def test_unknown_key_reports_its_line():
    with pytest.raises(ScenarioError) as info:
        parse_scenario("protocol: walk\nsteps: 10\nspeed: 3\n")
    assert info.value.line == 3
    assert "speed" in str(info.value)
    assert str(info.value).startswith("line 3:")


@pytest.mark.parametrize(
    "text",
    [
        "protocol: teleport\n",
        "protocol: walk\nsteps: 0\n",
        "protocol: walk\nrobots: -2\n",
        "protocol: walk\nseed: -1\n",
        "protocol: walk\nthreshold: 1.5\n",
        "protocol: walk\nsteps: ten\n",
        "steps: 10\n",
        "- protocol: walk\n",
        "protocol: [walk\n",
    ],
)
def test_invalid_documents(text):
    with pytest.raises(ScenarioError):
        parse_scenario(text)


def test_protocol_specific_rules(scenario_text):
    with pytest.raises(ScenarioError):
        scenario_text("protocol: walk\nbasis_mode: random\n")
    with pytest.raises(ScenarioError):
        scenario_text("protocol: avoid\nrobots: 3\n")
    with pytest.raises(ScenarioError):
        scenario_text("protocol: ghz-walk\nrobots: 9\n")
    with pytest.raises(ScenarioError):
        scenario_text("protocol: qkd\neve: intercept-schedule\n")
    with pytest.raises(ScenarioError):
        scenario_text("protocol: control\n")
    with pytest.raises(ScenarioError):
        scenario_text("protocol: walk\nbyzantine: [{strategy: follow}]\n")


def test_control_directives_must_be_quoted(scenario_text):
    with pytest.raises(ScenarioError):
        scenario_text("protocol: control\ndirectives: [[01, 10]]\n")
    scenario = scenario_text("protocol: control\ndirectives: [['01', '10']]\n")
    assert scenario.directives == (("01", "10"),)


def test_byzantine_roster(scenario_text):
    scenario = scenario_text(
        """
        protocol: byzantine
        robots: 5
        byzantine:
          - strategy: guess-basis
          - strategy: follow
            delay: 4
        """
    )
    assert scenario.honest_ids == ["r1", "r2", "r3"]
    assert scenario.byzantine_ids == ["r4", "r5"]
    assert scenario.byzantine[1].strategy is ByzantineStrategy.FOLLOW_WITH_DELAY
    assert scenario.byzantine[1].delay == 4


def test_byzantine_robots_must_be_outnumbered(scenario_text):
    with pytest.raises(ScenarioError):
        scenario_text(
            """
            protocol: byzantine
            robots: 4
            byzantine: [{strategy: follow}, {strategy: follow}]
            """
        )


def test_bounds_must_contain_the_start(scenario_text):
    with pytest.raises(ScenarioError):
        scenario_text("protocol: walk\nbounds: [0, 0, 10, 10]\n")
    scenario = scenario_text(
        "protocol: walk\nbounds: [0, 0, 10, 10]\npositions: [[0, 0], [5, 5]]\n"
    )
    assert scenario.bounds == Bounds(0, 0, 10, 10)


def test_render_round_trip(scenario_text):
    scenario = scenario_text(
        """
        name: roundtrip
        protocol: qkd
        steps: 500
        seed: 18446744073709551615
        basis_mode: predefined
        basis_schedule: zxxz
        eve: intercept-schedule
        sample_size: 32
        threshold: 0.05
        bounds: [-50, -50, 50, 50]
        positions: [[0, 0], [3, 4]]
        """
    )
    assert scenario.basis_schedule == "ZXXZ"
    assert scenario.eve is EveStrategy.INTERCEPT_SCHEDULE
    assert parse_scenario(render_scenario(scenario)) == scenario


def test_render_round_trip_with_directives_and_byzantine(scenario_text):
    control = scenario_text("protocol: control\nrobots: 3\ndirectives: [['010', '110']]\n")
    assert parse_scenario(render_scenario(control)) == control
    byzantine = scenario_text(
        "protocol: byzantine\nrobots: 3\nbyzantine: [{strategy: random-direction}]\n"
    )
    assert parse_scenario(render_scenario(byzantine)) == byzantine


def test_with_overrides_revalidates(scenario_text):
    base = scenario_text("protocol: ghz-walk\nrobots: 3\n")
    bigger = with_overrides(base, {"robots": 5, "basis_mode": "random"})
    assert bigger.robots == 5
    assert len(bigger.positions) == 5
    assert bigger.basis_mode is BasisMode.RANDOM
    with pytest.raises(ScenarioError):
        with_overrides(base, {"robots": 12})
    with pytest.raises(ScenarioError):
        with_overrides(base, {"colour": "red"})


def test_scenario_to_dict_is_plain(scenario_text):
    data = scenario_to_dict(scenario_text("protocol: avoid\n"))
    assert data["protocol"] == "avoid"
    assert data["positions"] == [[0, 0], [1, 0]]
    assert data["avoidance_policy"] == "safe"


def test_load_scenario(tmp_path):
    path = tmp_path / "walk.yaml"
    path.write_text("protocol: walk\nsteps: 5\n")
    assert load_scenario(str(path)).steps == 5
    with pytest.raises(OSError):
        load_scenario(str(tmp_path / "missing.yaml"))


EXAMPLES = sorted(glob.glob(os.path.join(os.path.dirname(__file__), "..", "scenarios", "*.yaml")))


@pytest.mark.parametrize("path", EXAMPLES, ids=os.path.basename)
def test_example_scenarios_load(path):
    scenario = load_scenario(path)
    assert scenario.name == os.path.splitext(os.path.basename(path))[0]

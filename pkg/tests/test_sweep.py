import pytest
from conftest import within_sigma

from qswarm.errors import ScenarioError
from qswarm.sweep import expand_grid, parse_grid, parse_seeds, sweep


def test_parse_grid():
    grid = parse_grid("robots=2..4; basis_mode=random,predefined")
    assert grid == {"robots": [2, 3, 4], "basis_mode": ["random", "predefined"]}
    assert parse_grid("threshold=0.05,0.1") == {"threshold": [0.05, 0.1]}


@pytest.mark.parametrize("text", ["", ";", "speed=1,2", "seed=1..3", "robots", "robots=4..2"])
def test_parse_grid_rejects(text):
    with pytest.raises(ScenarioError):
        parse_grid(text)


def test_parse_seeds():
    assert parse_seeds("0..3") == [0, 1, 2, 3]
    assert parse_seeds("5, 9") == [5, 9]
    with pytest.raises(ScenarioError):
        parse_seeds("1,two")


def test_expand_grid_varies_the_last_field_fastest():
    points = expand_grid({"robots": [2, 3], "basis_mode": ["z", "random"]})
    assert points == [
        {"robots": 2, "basis_mode": "z"},
        {"robots": 2, "basis_mode": "random"},
        {"robots": 3, "basis_mode": "z"},
        {"robots": 3, "basis_mode": "random"},
    ]


def test_sweep_needs_seeds(scenario_text):
    base = scenario_text("protocol: ghz-walk\nsteps: 10\n")
    with pytest.raises(ScenarioError):
        sweep(base, {"robots": [2]}, [])


def test_sweep_validates_every_point_before_running(scenario_text):
    base = scenario_text("protocol: ghz-walk\nsteps: 10\n")
    with pytest.raises(ScenarioError):
        sweep(base, {"robots": [2, 12]}, [0])


def test_sweep_rows_and_pooled_rates(scenario_text):
    base = scenario_text("protocol: ghz-walk\nbasis_mode: random\nsteps: 200\n")
    result = sweep(base, {"robots": [2, 3]}, [1, 2, 3])
    assert [(row["point"]["robots"], row["seed"]) for row in result["rows"]] == [
        (2, 1),
        (2, 2),
        (2, 3),
        (3, 1),
        (3, 2),
        (3, 3),
    ]
    assert "final_positions" not in result["rows"][0]["stats"]
    assert result["seeds"] == [1, 2, 3]
    assert result["base"]["protocol"] == "ghz-walk"

    two, three = result["points"]
    assert two["runs"] == 3
    assert two["all_match"]["trials"] == 600
    assert two["all_match"]["count"] == sum(
        row["stats"]["all_match"]["count"] for row in result["rows"][:3]
    )
    assert two["expected_all_match"] == 0.25
    assert three["expected_all_match"] == 0.125
    assert two["crashes"] == 0


def test_sweep_is_deterministic(scenario_text):
    base = scenario_text("protocol: walk\ncoordination: local\nsteps: 30\n")
    grid = {"coordination_distance": [1, 2]}
    assert sweep(base, grid, [4, 5]) == sweep(base, grid, [4, 5])


def test_sweep_pools_detection_verdicts(scenario_text):
    base = scenario_text("protocol: qkd\nsteps: 200\n")
    result = sweep(base, {"eve": ["passive"]}, [0, 1])
    point = result["points"][0]
    assert point["detected"] == {"count": 0, "trials": 2, "value": 0.0}
    assert point["qber"]["count"] == 0


def test_sweep_ghz_random_bases_match_rate_halves_per_robot(scenario_text):
    base = scenario_text("protocol: ghz-walk\nbasis_mode: random\nsteps: 2000\n")
    result = sweep(base, {"robots": [2, 3, 4, 5, 6]}, [0, 1])
    assert [point["point"]["robots"] for point in result["points"]] == [2, 3, 4, 5, 6]
    for point in result["points"]:
        expected = 0.5 ** point["point"]["robots"]
        assert point["expected_all_match"] == pytest.approx(expected)
        assert point["all_match"]["trials"] == 4000
        assert within_sigma(point["all_match"]["count"], 4000, expected)

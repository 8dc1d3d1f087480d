import json
import os

from qswarm.bin.qswarm_cli import OUTPUT_DIR_ENV, main


def write_config(tmp_path, text, name="scenario.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_run_writes_trace_and_stats(tmp_path):
    config = write_config(tmp_path, "name: demo\nprotocol: walk\nsteps: 20\nseed: 3\n")
    out = tmp_path / "out"
    assert main(["run", config, "--output", str(out)]) == 0
    assert (out / "demo.trace.jsonl").exists()
    with open(out / "demo.stats.json") as f:
        stats = json.load(f)
    assert stats["protocol"] == "walk"
    assert stats["seed"] == 3


def test_run_with_report(tmp_path):
    config = write_config(tmp_path, "name: game\nprotocol: magic-square\nsteps: 45\n")
    out = tmp_path / "out"
    assert main(["run", config, "--output", str(out), "--report"]) == 0
    assert (out / "game.md").exists()
    assert (out / "charts" / "game_game.png").exists()


def test_output_dir_from_environment(tmp_path, monkeypatch):
    config = write_config(tmp_path, "name: env\nprotocol: walk\nsteps: 5\n")
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "from-env"))
    assert main(["run", config]) == 0
    assert (tmp_path / "from-env" / "env.stats.json").exists()


def test_scenario_output_dir_is_the_fallback(tmp_path, monkeypatch):
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)
    target = tmp_path / "from-scenario"
    config = write_config(
        tmp_path, f"name: own\nprotocol: walk\nsteps: 5\noutput_dir: '{target}'\n"
    )
    assert main(["run", config]) == 0
    assert (target / "own.trace.jsonl").exists()


def test_invalid_config_exits_with_one(tmp_path):
    config = write_config(tmp_path, "protocol: walk\nsteps: -3\n")
    assert main(["run", config, "--output", str(tmp_path)]) == 1
    assert main(["run", str(tmp_path / "missing.yaml")]) == 1


def test_failed_protocol_precondition_exits_with_one(tmp_path):
    config = write_config(tmp_path, "protocol: qkd\nsteps: 100\nbasis_mode: random\n")
    assert main(["run", config, "--output", str(tmp_path)]) == 1


def test_render_prints_the_normalized_scenario(tmp_path, capsys):
    config = write_config(tmp_path, "protocol: avoid\nsteps: 7\n")
    assert main(["render", config]) == 0
    rendered = capsys.readouterr().out
    assert "protocol: avoid" in rendered
    assert "avoidance_policy: safe" in rendered


def test_sweep_command(tmp_path):
    config = write_config(tmp_path, "name: grid\nprotocol: ghz-walk\nsteps: 20\n")
    out = tmp_path / "out"
    args = ["sweep", config, "--grid", "robots=2..3", "--seeds", "0,1", "--output", str(out)]
    assert main(args) == 0
    with open(out / "grid.sweep.json") as f:
        result = json.load(f)
    assert len(result["rows"]) == 4
    assert main(args[:-2] + ["--jobs", "0", "--output", str(out)]) == 1
    assert main(["sweep", config, "--grid", "colour=red", "--seeds", "0"]) == 1


def test_verify_command(capsys):
    assert main(["verify", "--seed", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 12
    assert all(line.startswith("[    ok]") for line in lines)


def test_verify_rejects_a_bad_seed():
    assert main(["verify", "--seed", "abc"]) == 1


def test_no_files_when_the_run_fails(tmp_path):
    config = write_config(tmp_path, "name: bad\nprotocol: walk\nspeed: 2\n")
    out = tmp_path / "out"
    assert main(["run", config, "--output", str(out)]) == 1
    assert not os.path.exists(out)

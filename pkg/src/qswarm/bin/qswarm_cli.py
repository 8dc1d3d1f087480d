"""
Quantum Swarm Coordination Simulator

Usage:
    qswarm run <config> [--output=<path>] [--report] [--verbose]
    qswarm sweep <config> --grid=<spec> --seeds=<list> [--jobs=<n>] [--output=<path>] [--report] [--verbose]
    qswarm verify [--seed=<seed>] [--verbose]
    qswarm render <config> [--verbose]
    qswarm -h | --help
    qswarm --version

Options:
    --output=<path>     Output directory (overrides QSWARM_OUTPUT_DIR and the scenario).
    --report            Also write a markdown report with charts.
    --grid=<spec>       Parameter grid, e.g. "robots=2..6;basis_mode=random".
    --seeds=<list>      Seeds as "1,2,3" or "0..99".
    --jobs=<n>          Worker processes for the sweep [default: 1].
    --seed=<seed>       Seed for the sampled checks [default: 0].
    -v --verbose        Enable verbose output.
    -h --help           Show this screen.
    --version           Show version.
"""  # noqa: E501

import os
import sys
from typing import Any, Dict, List, Optional

from docopt import docopt

from .. import __version__
from ..errors import QSwarmError
from ..report import generate_report, output_paths, write_json, write_trace
from ..scenario import Scenario, load_scenario, render_scenario
from ..simulate import run_scenario
from ..sweep import parse_grid, parse_seeds, sweep
from ..utils.logger import get_logger, setup_logger
from ..verify import run_checks

OUTPUT_DIR_ENV = "QSWARM_OUTPUT_DIR"


def resolve_output_dir(option: Optional[str], scenario: Scenario) -> str:
    """--output, then the environment, then the scenario's own output_dir."""
    if option:
        return option
    return os.environ.get(OUTPUT_DIR_ENV) or scenario.output_dir


def _positive_int(text: str, option: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise QSwarmError(f"{option} must be an integer, got {text!r}") from None
    if value < 1:
        raise QSwarmError(f"{option} must be positive, got {value}")
    return value


def run_command(args: Dict[str, Any]) -> int:
    logger = get_logger(__name__)
    scenario = load_scenario(args["<config>"])
    output_dir = resolve_output_dir(args["--output"], scenario)
    logger.info(f"Running scenario '{scenario.name}' ({scenario.protocol.value})")

    events, stats = run_scenario(scenario)
    paths = output_paths(output_dir, scenario.name)
    write_trace(events, paths["trace"])
    write_json(stats, paths["stats"])
    if args["--report"]:
        generate_report(stats, output_dir, scenario.name, template="run")

    if "verdict" in stats:
        logger.info(f"Verdict: {stats['verdict']} (qber {stats['qber']['value']:.4f})")
    logger.info(f"{len(events)} trace events, {stats['crashes']} crashes")
    return 0


def sweep_command(args: Dict[str, Any]) -> int:
    logger = get_logger(__name__)
    scenario = load_scenario(args["<config>"])
    grid = parse_grid(args["--grid"])
    seeds = parse_seeds(args["--seeds"])
    jobs = _positive_int(args["--jobs"], "--jobs")
    output_dir = resolve_output_dir(args["--output"], scenario)

    result = sweep(scenario, grid, seeds, jobs=jobs)
    path = output_paths(output_dir, scenario.name)["sweep"]
    write_json(result, path)
    if args["--report"]:
        generate_report(result, output_dir, f"{scenario.name}_sweep", template="sweep")
    logger.info(f"Sweep finished: {len(result['rows'])} runs")
    return 0


def verify_command(args: Dict[str, Any]) -> int:
    logger = get_logger(__name__)
    try:
        seed = int(args["--seed"])
    except ValueError:
        raise QSwarmError(f"--seed must be an integer, got {args['--seed']!r}") from None

    results = run_checks(seed)
    failed: List[str] = []
    for result in results:
        status = "ok" if result.passed else "FAILED"
        print(f"[{status:>6}] {result.name}" + (f": {result.detail}" if result.detail else ""))
        if not result.passed:
            failed.append(result.name)
    if failed:
        logger.error(f"{len(failed)} of {len(results)} checks failed")
        return 1
    logger.info(f"All {len(results)} checks passed")
    return 0


def render_command(args: Dict[str, Any]) -> int:
    sys.stdout.write(render_scenario(load_scenario(args["<config>"])))
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = docopt(__doc__, argv=argv, version=f"qswarm {__version__}")

    setup_logger(level="DEBUG" if args["--verbose"] else "INFO")
    logger = get_logger(__name__)
    logger.debug(f"CLI Arguments: {args}")

    try:
        if args["run"]:
            return run_command(args)
        if args["sweep"]:
            return sweep_command(args)
        if args["verify"]:
            return verify_command(args)
        return render_command(args)
    except (QSwarmError, OSError) as e:
        logger.error(f"An error occurred: {e}", exc_info=args["--verbose"])
        return 1


if __name__ == "__main__":
    sys.exit(main())

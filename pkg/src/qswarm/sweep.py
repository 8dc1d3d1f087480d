"""
Parameter sweeps.

A sweep runs a base scenario over the cartesian product of a parameter grid
and a list of seeds, one row per (grid point, seed), and pools the rates of
each grid point across its seeds.
"""

import itertools
from multiprocessing import Pool
from typing import Any, Dict, List, Mapping, Sequence, Tuple

import yaml

from .errors import ScenarioError
from .scenario import FIELD_NAMES, Scenario, scenario_to_dict, with_overrides
from .simulate import rate, run_scenario
from .utils.logger import get_logger

logger = get_logger(__name__)

Grid = Dict[str, List[Any]]

# per-run stats too bulky for a sweep row
_DROPPED_FIELDS = ("paths", "direction_counts", "initial_positions", "final_positions")


def _parse_value(text: str) -> Any:
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError:
        return text


def _parse_values(text: str) -> List[Any]:
    text = text.strip()
    if ".." in text and "," not in text:
        low, _, high = text.partition("..")
        try:
            start, stop = int(low), int(high)
        except ValueError:
            raise ScenarioError(f"range must be <int>..<int>, got {text!r}") from None
        if start > stop:
            raise ScenarioError(f"empty range {text!r}")
        return list(range(start, stop + 1))
    return [_parse_value(item.strip()) for item in text.split(",") if item.strip()]


def parse_grid(text: str) -> Grid:
    """
    Parse a grid specification.

    Fields are separated by ';', values by ',', and an integer range may be
    written 'low..high', e.g. 'robots=2..6;basis_mode=random'.

    Args:
        text: Grid specification

    Returns:
        Field name -> values, in the order given

    Raises:
        ScenarioError: For malformed entries or unknown fields
    """
    grid: Grid = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        name, sep, values = part.partition("=")
        name = name.strip()
        if not sep or not name:
            raise ScenarioError(f"grid entry must look like field=v1,v2, got {part!r}")
        if name not in FIELD_NAMES or name == "seed":
            raise ScenarioError(f"cannot sweep over '{name}': not a scenario field")
        parsed = _parse_values(values)
        if not parsed:
            raise ScenarioError(f"grid field '{name}' has no values")
        grid[name] = parsed
    if not grid:
        raise ScenarioError("empty parameter grid")
    return grid


def parse_seeds(text: str) -> List[int]:
    """Seeds as '1,2,3' or '0..99'."""
    seeds = _parse_values(text)
    for seed in seeds:
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise ScenarioError(f"seeds must be integers, got {seed!r}")
    return seeds


def expand_grid(grid: Mapping[str, Sequence[Any]]) -> List[Dict[str, Any]]:
    """Every grid point, the last field varying fastest."""
    names = list(grid)
    return [dict(zip(names, values)) for values in itertools.product(*grid.values())]


def _summarize(stats: Mapping[str, Any]) -> Dict[str, Any]:
    return {key: value for key, value in stats.items() if key not in _DROPPED_FIELDS}


def _run_row(scenario: Scenario) -> Dict[str, Any]:
    _, stats = run_scenario(scenario)
    return _summarize(stats)


def _is_rate(value: Any) -> bool:
    return isinstance(value, dict) and set(value) == {"count", "trials", "value"}


def _pool_point(rows: Sequence[Mapping[str, Any]]) -> Dict[str, Any]:
    """Pool the rates of one grid point over its seeds."""
    pooled: Dict[str, Any] = {"runs": len(rows)}
    first = rows[0]["stats"]
    for key, value in first.items():
        if _is_rate(value):
            count = sum(row["stats"][key]["count"] for row in rows)
            trials = sum(row["stats"][key]["trials"] for row in rows)
            pooled[key] = rate(count, trials)
        elif key.startswith("expected_"):
            pooled[key] = value
    if "verdict" in first:
        detected = sum(1 for row in rows if row["stats"]["verdict"] == "eavesdropper-detected")
        pooled["detected"] = rate(detected, len(rows))
    pooled["crashes"] = sum(row["stats"].get("crashes", 0) for row in rows)
    return pooled


def sweep(
    base: Scenario, grid: Mapping[str, Sequence[Any]], seeds: Sequence[int], jobs: int = 1
) -> Dict[str, Any]:
    """
    Run a scenario over a parameter grid and a list of seeds.

    Every run is independent; with jobs > 1 they execute in a process pool.
    Rows come back in (grid point, seed) order regardless of jobs.

    Args:
        base: Base scenario
        grid: Field name -> values
        seeds: Seeds to run each grid point with
        jobs: Worker processes

    Returns:
        Sweep result with the rows and the per-point pooled rates

    Raises:
        ScenarioError: For an empty seed list, unknown fields or grid points
            that do not validate
    """
    if not seeds:
        raise ScenarioError("sweep needs at least one seed")
    if jobs < 1:
        raise ScenarioError(f"jobs must be positive, got {jobs}")
    for name in grid:
        if name not in FIELD_NAMES:
            raise ScenarioError(f"cannot sweep over '{name}': not a scenario field")

    points = expand_grid(grid)
    tasks: List[Tuple[Dict[str, Any], int]] = [(p, s) for p in points for s in seeds]
    # validate every point up front so a bad value fails before any run
    scenarios = [with_overrides(base, {**point, "seed": seed}) for point, seed in tasks]
    logger.info(f"Sweeping {len(points)} grid points x {len(seeds)} seeds ({jobs} jobs)")

    if jobs == 1 or len(scenarios) == 1:
        summaries = [_run_row(s) for s in scenarios]
    else:
        with Pool(min(jobs, len(scenarios))) as pool:
            summaries = pool.map(_run_row, scenarios)

    rows = [
        {"point": point, "seed": seed, "stats": summary}
        for (point, seed), summary in zip(tasks, summaries)
    ]
    pooled = []
    for i, point in enumerate(points):
        point_rows = rows[i * len(seeds) : (i + 1) * len(seeds)]
        pooled.append({"point": point, **_pool_point(point_rows)})

    return {
        "base": scenario_to_dict(base),
        "grid": {name: list(values) for name, values in grid.items()},
        "seeds": list(seeds),
        "rows": rows,
        "points": pooled,
    }

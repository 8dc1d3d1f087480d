"""
Chart generator for run and sweep statistics.

This module draws the charts embedded in the markdown reports.
"""

import os
from typing import Any, Dict, List, Mapping

import matplotlib

matplotlib.use("Agg")  # Use non-interactive backend
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..utils.logger import get_logger  # noqa: E402

logger = get_logger(__name__)


def _sigma(entry: Mapping[str, Any]) -> float:
    trials = entry["trials"]
    if not trials:
        return 0.0
    p = entry["value"]
    return float(np.sqrt(p * (1 - p) / trials))


def generate_charts(stats: Dict[str, Any], output_dir: str) -> Dict[str, str]:
    """
    Generate charts for one run.

    Args:
        stats: Run statistics
        output_dir: Output directory for charts

    Returns:
        Dictionary mapping chart names to file paths
    """
    charts_dir = os.path.join(output_dir, "charts")
    os.makedirs(charts_dir, exist_ok=True)
    name = stats.get("scenario", "run")

    charts = {}
    if "direction_frequencies" in stats:
        charts.update(generate_direction_chart(stats["direction_frequencies"], charts_dir, name))
    if "paths" in stats:
        charts.update(generate_path_chart(stats["paths"], charts_dir, name))
    if "per_input" in stats:
        charts.update(generate_game_chart(stats["per_input"], charts_dir, name))
    if "robots_detail" in stats:
        charts.update(generate_byzantine_chart(stats["robots_detail"], charts_dir, name))
    return charts


def generate_direction_chart(
    frequencies: Mapping[str, Mapping[str, Any]], output_dir: str, name: str
) -> Dict[str, str]:
    """Bar chart of move directions against the uniform 1/4."""
    charts = {}
    try:
        directions = list(frequencies)
        values = [frequencies[d]["value"] for d in directions]
        errors = [3 * _sigma(frequencies[d]) for d in directions]

        fig, ax = plt.subplots(figsize=(8, 5))
        ax.bar(directions, values, yerr=errors, color="skyblue", capsize=6)
        ax.axhline(0.25, color="gray", linestyle="--", label="uniform")
        ax.set_ylabel("Frequency")
        ax.set_title("Move directions (3-sigma error bars)")
        ax.legend()
        plt.tight_layout()

        chart_path = os.path.join(output_dir, f"directions_{name}.png")
        fig.savefig(chart_path)
        plt.close(fig)
        charts["directions"] = chart_path
    except Exception as e:
        logger.error(f"[{name}] Failed to generate direction chart: {e}")
    return charts


def generate_path_chart(
    paths: Mapping[str, List[List[int]]], output_dir: str, name: str
) -> Dict[str, str]:
    """Robot trajectories on the board."""
    charts = {}
    try:
        fig, ax = plt.subplots(figsize=(7, 7))
        for robot_id, path in sorted(paths.items()):
            xs = [p[0] for p in path]
            ys = [p[1] for p in path]
            ax.plot(xs, ys, marker=".", label=robot_id)
            ax.scatter(xs[:1], ys[:1], marker="o", s=60)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_title("Robot paths")
        ax.set_aspect("equal", adjustable="datalim")
        ax.legend()
        plt.tight_layout()

        chart_path = os.path.join(output_dir, f"paths_{name}.png")
        fig.savefig(chart_path)
        plt.close(fig)
        charts["paths"] = chart_path
    except Exception as e:
        logger.error(f"[{name}] Failed to generate path chart: {e}")
    return charts


def generate_game_chart(
    per_input: Mapping[str, Mapping[str, Any]], output_dir: str, name: str
) -> Dict[str, str]:
    """Heatmap of the win rate for each (row, column) input."""
    charts = {}
    try:
        grid = np.zeros((3, 3))
        for key, entry in per_input.items():
            r, c = (int(v) for v in key.split(","))
            grid[r, c] = entry["value"]

        fig, ax = plt.subplots(figsize=(6, 5))
        image = ax.imshow(grid, cmap="RdYlGn", vmin=0.0, vmax=1.0)
        for r in range(3):
            for c in range(3):
                ax.text(c, r, f"{grid[r, c]:.2f}", ha="center", va="center")
        ax.set_xticks(range(3))
        ax.set_yticks(range(3))
        ax.set_xlabel("Column")
        ax.set_ylabel("Row")
        ax.set_title("Win rate per input")
        fig.colorbar(image, ax=ax)
        plt.tight_layout()

        chart_path = os.path.join(output_dir, f"game_{name}.png")
        fig.savefig(chart_path)
        plt.close(fig)
        charts["game"] = chart_path
    except Exception as e:
        logger.error(f"[{name}] Failed to generate game chart: {e}")
    return charts


def generate_byzantine_chart(
    robots: Mapping[str, Mapping[str, Any]], output_dir: str, name: str
) -> Dict[str, str]:
    """Observed match rate of every robot next to its predicted rate."""
    charts = {}
    try:
        ids = sorted(robots)
        observed = [robots[rid]["match"]["value"] for rid in ids]
        errors = [3 * _sigma(robots[rid]["match"]) for rid in ids]
        predicted = [robots[rid].get("predicted_match", 1.0) for rid in ids]
        x = np.arange(len(ids))

        fig, ax = plt.subplots(figsize=(9, 5))
        ax.bar(x - 0.2, observed, width=0.4, yerr=errors, capsize=5, label="observed")
        ax.bar(x + 0.2, predicted, width=0.4, color="lightgray", label="predicted")
        ax.set_xticks(x)
        ax.set_xticklabels(
            [f"{rid}\n{robots[rid].get('strategy', 'honest')}" for rid in ids]
        )
        ax.set_ylabel("Match rate with the honest move")
        ax.set_ylim(0, 1.05)
        ax.set_title("Move agreement per robot")
        ax.legend()
        plt.tight_layout()

        chart_path = os.path.join(output_dir, f"byzantine_{name}.png")
        fig.savefig(chart_path)
        plt.close(fig)
        charts["byzantine"] = chart_path
    except Exception as e:
        logger.error(f"[{name}] Failed to generate byzantine chart: {e}")
    return charts


def generate_sweep_charts(result: Dict[str, Any], output_dir: str, name: str) -> Dict[str, str]:
    """
    Plot every pooled rate of a one-field sweep against the swept values.

    Rates with an `expected_<rate>` companion get the prediction drawn as
    a dashed line.

    Args:
        result: Output of sweep()
        output_dir: Output directory for charts
        name: Sweep name, used in file names

    Returns:
        Dictionary mapping chart names to file paths
    """
    charts_dir = os.path.join(output_dir, "charts")
    os.makedirs(charts_dir, exist_ok=True)
    charts: Dict[str, str] = {}

    grid = result.get("grid", {})
    if len(grid) != 1:
        logger.info("Sweep charts are drawn for single-field grids only")
        return charts
    field = next(iter(grid))
    points = result.get("points", [])
    if not points:
        return charts

    xs = [point["point"][field] for point in points]
    numeric = all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in xs)
    positions = xs if numeric else list(range(len(xs)))
    metrics = [
        key
        for key, value in points[0].items()
        if isinstance(value, dict) and set(value) == {"count", "trials", "value"}
    ]
    for metric in metrics:
        try:
            values = [point[metric]["value"] for point in points]
            errors = [3 * _sigma(point[metric]) for point in points]

            fig, ax = plt.subplots(figsize=(8, 5))
            ax.errorbar(positions, values, yerr=errors, marker="o", capsize=5, label="observed")
            expected_key = f"expected_{metric}"
            if expected_key in points[0]:
                expected = [point[expected_key] for point in points]
                ax.plot(positions, expected, linestyle="--", color="gray", label="predicted")
            if not numeric:
                ax.set_xticks(positions)
                ax.set_xticklabels([str(x) for x in xs])
            ax.set_xlabel(field)
            ax.set_ylabel(metric)
            ax.set_title(f"{metric} over {field}")
            ax.legend()
            plt.tight_layout()

            chart_path = os.path.join(charts_dir, f"sweep_{name}_{metric}.png")
            fig.savefig(chart_path)
            plt.close(fig)
            charts[metric] = chart_path
        except Exception as e:
            logger.error(f"[{name}] Failed to generate sweep chart for {metric}: {e}")
    return charts

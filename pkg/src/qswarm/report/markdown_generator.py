"""
Markdown report generator.

This module renders markdown summaries of runs and sweeps, with charts.
"""

import os
from typing import Any, Dict, List, Mapping

from ..utils.logger import get_logger
from .chart_generator import generate_charts, generate_sweep_charts
from .writers import write_atomic

logger = get_logger(__name__)


def generate_report(
    stats: Dict[str, Any],
    output_dir: str,
    output_name: str,
    template: str = "run",
) -> str:
    """
    Generate a markdown report.

    Args:
        stats: Run statistics or a sweep result
        output_dir: Output directory
        output_name: Output file name (without extension)
        template: Report template to use (run, sweep)

    Returns:
        Path to the generated report
    """
    os.makedirs(output_dir, exist_ok=True)

    if template == "sweep":
        charts = generate_sweep_charts(stats, output_dir, output_name)
        content = generate_sweep_report_content(stats, charts, output_dir)
    elif template == "run":
        charts = generate_charts(stats, output_dir)
        content = generate_run_report_content(stats, charts, output_dir)
    else:
        raise ValueError(f"Unsupported report template: {template}")

    report_path = os.path.join(output_dir, f"{output_name}.md")
    write_atomic(report_path, content)
    logger.info(f"Generated markdown report: {report_path}")
    return report_path


def _format_rate(entry: Mapping[str, Any]) -> str:
    return f"{entry['value']:.4f} ({entry['count']}/{entry['trials']})"


def _is_rate(value: Any) -> bool:
    return isinstance(value, dict) and set(value) == {"count", "trials", "value"}


def _chart_link(title: str, path: str, output_dir: str) -> str:
    return f"![{title}]({os.path.relpath(path, output_dir)})\n"


def generate_run_report_content(
    stats: Dict[str, Any], charts: Dict[str, str], output_dir: str
) -> str:
    """
    Generate content for a single run report.

    Args:
        stats: Run statistics
        charts: Generated charts
        output_dir: Directory the report is written to

    Returns:
        Report content as markdown
    """
    sections: List[str] = []
    name = stats.get("scenario", "run")
    sections.append(f"# Simulation Report: {name}\n")

    sections.append("## Run\n")
    sections.append("| Field | Value |\n|-------|-------|\n")
    for key in ("protocol", "seed", "robots", "steps", "crashes", "trace_events"):
        if key in stats:
            sections.append(f"| {key} | {stats[key]} |\n")
    if "max_norm_drift" in stats:
        sections.append(f"| max_norm_drift | {stats['max_norm_drift']:.3e} |\n")

    rates = [(key, value) for key, value in stats.items() if _is_rate(value)]
    if rates:
        sections.append("\n## Rates\n")
        sections.append("| Metric | Observed | Predicted |\n|--------|----------|-----------|\n")
        for key, value in rates:
            predicted = stats.get(f"expected_{key}", "")
            sections.append(f"| {key} | {_format_rate(value)} | {predicted} |\n")

    if "verdict" in stats:
        sections.append("\n## Eavesdropper Detection\n")
        sections.append(
            f"Verdict **{stats['verdict']}** with QBER {_format_rate(stats['qber'])} "
            f"against threshold {stats['threshold']}.\n"
        )
        if stats["verdict"] == "clean":
            sections.append(
                f"The remaining sifted rounds gave {stats.get('movement_steps', 0)} moves.\n"
            )
        else:
            sections.append("The walk was aborted; no rounds were used as movement bits.\n")

    if "robots_detail" in stats:
        sections.append("\n## Robots\n")
        sections.append(
            "| Robot | Role | Strategy | Match | Predicted | Late moves | Flagged windows |\n"
            "|-------|------|----------|-------|-----------|------------|-----------------|\n"
        )
        for rid, entry in sorted(stats["robots_detail"].items()):
            predicted = entry.get("predicted_match", "")
            if "stated_match" in entry:
                predicted = f"{predicted} (stated {entry['stated_match']})"
            sections.append(
                f"| {rid} | {entry['role']} | {entry.get('strategy', '')} | "
                f"{_format_rate(entry['match'])} | {predicted} | {entry['late_moves']} | "
                f"{_format_rate(entry['flagged_windows'])} |\n"
            )

    if "subset_counts" in stats and stats["subset_counts"]:
        sections.append("\n## Sifted Subsets\n")
        sections.append("| Robots matching the source | Rounds |\n|------|------|\n")
        for subset, count in stats["subset_counts"].items():
            sections.append(f"| {subset} | {count} |\n")

    if "per_input" in stats:
        sections.append("\n## Magic Square\n")
        sections.append(
            f"Strategy **{stats['game_strategy']}**, win rate {_format_rate(stats['win_rate'])}, "
            f"classical optimum {stats['classical_optimum']}, "
            f"parity violations {stats['parity_violations']}.\n"
        )

    if charts:
        sections.append("\n## Charts\n")
        for title, path in charts.items():
            sections.append(_chart_link(title, path, output_dir))

    return "".join(sections)


def generate_sweep_report_content(
    result: Dict[str, Any], charts: Dict[str, str], output_dir: str
) -> str:
    """Generate content for a sweep report: one table row per grid point."""
    sections: List[str] = []
    base = result.get("base", {})
    sections.append(f"# Sweep Report: {base.get('name', 'sweep')}\n")
    sections.append(
        f"Protocol `{base.get('protocol')}`, grid `{result.get('grid')}`, "
        f"{len(result.get('seeds', []))} seeds per point.\n"
    )

    points = result.get("points", [])
    if points:
        metrics = [key for key, value in points[0].items() if _is_rate(value)]
        header = ["point"] + metrics + ["crashes"]
        sections.append("\n## Pooled Rates\n")
        sections.append("| " + " | ".join(header) + " |\n")
        sections.append("|" + "---|" * len(header) + "\n")
        for point in points:
            label = ", ".join(f"{k}={v}" for k, v in point["point"].items())
            cells = [label] + [_format_rate(point[m]) for m in metrics] + [str(point["crashes"])]
            sections.append("| " + " | ".join(cells) + " |\n")

    if charts:
        sections.append("\n## Charts\n")
        for title, path in charts.items():
            sections.append(_chart_link(title, path, output_dir))

    return "".join(sections)

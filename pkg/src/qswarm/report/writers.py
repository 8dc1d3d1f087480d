"""
Trace and statistics writers.

Files are written to a temporary sibling and moved into place, so readers
never see a partial file. Output is canonical JSON (sorted keys, fixed
separators): identical runs produce byte-identical files.
"""

import json
import os
import tempfile
from typing import Any, Dict, Iterable, Mapping, Optional

from ..trace import TraceEvent
from ..utils.logger import get_logger

logger = get_logger(__name__)


def output_paths(output_dir: str, name: str) -> Dict[str, str]:
    """File names of a run or sweep inside the output directory."""
    return {
        "trace": os.path.join(output_dir, f"{name}.trace.jsonl"),
        "stats": os.path.join(output_dir, f"{name}.stats.json"),
        "sweep": os.path.join(output_dir, f"{name}.sweep.json"),
    }


def write_atomic(path: str, text: str) -> str:
    """
    Write text to a file atomically.

    Args:
        path: Destination path; parent directories are created
        text: File content

    Returns:
        The destination path
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
    return path


def canonical_json(data: Any, indent: Optional[int] = 2) -> str:
    """Sorted-key JSON; one line with ", " between items when indent is None."""
    separators = (",", ": ") if indent is not None else (", ", ": ")
    return json.dumps(data, sort_keys=True, indent=indent, separators=separators) + "\n"


def write_trace(events: Iterable[TraceEvent], path: str) -> str:
    """Write trace events as JSON Lines."""
    text = "".join(event.to_json() + "\n" for event in events)
    write_atomic(path, text)
    logger.info(f"Wrote trace: {path}")
    return path


def write_json(data: Mapping[str, Any], path: str) -> str:
    """Write a stats or sweep document."""
    write_atomic(path, canonical_json(data))
    logger.info(f"Wrote {os.path.basename(path)}: {path}")
    return path

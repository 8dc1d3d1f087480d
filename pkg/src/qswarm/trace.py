"""
Simulation trace.

A trace is the ordered list of events of one run: resource emissions,
measurements, published bases, moves, crashes, detection verdicts and game
rounds. Each event serializes to one canonical JSON line.
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterator, List

from .errors import QSwarmError


class TraceKind(Enum):
    EMIT = "emit"
    MEASURE = "measure"
    PUBLISH = "publish"
    MOVE = "move"
    CRASH = "crash"
    VERDICT = "verdict"
    GAME_ROUND = "game-round"


@dataclass(frozen=True)
class TraceEvent:
    step: int
    kind: TraceKind
    payload: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"step": self.step, "kind": self.kind.value, **self.payload}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


class Trace:
    """Append-only event log with non-decreasing steps."""

    def __init__(self) -> None:
        self.events: List[TraceEvent] = []

    def record(self, step: int, kind: TraceKind, **payload: Any) -> TraceEvent:
        if self.events and step < self.events[-1].step:
            raise QSwarmError(
                f"Trace steps must not decrease: {step} after {self.events[-1].step}"
            )
        event = TraceEvent(step, kind, payload)
        self.events.append(event)
        return event

    def count(self, kind: TraceKind) -> int:
        return sum(1 for event in self.events if event.kind is kind)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[TraceEvent]:
        return iter(self.events)

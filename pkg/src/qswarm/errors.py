"""
Exception types raised by the simulator.

Every error derives from QSwarmError, and from ValueError where the failure
is caused by bad input, so callers can catch either.
"""

from typing import Optional


class QSwarmError(Exception):
    """Base class for all simulator errors."""


class StateError(QSwarmError, ValueError):
    """Invalid quantum state construction or measurement request."""


class BoardError(QSwarmError, ValueError):
    """Invalid board operation (occupied tile, unknown robot, out of bounds)."""


class CrashedRobotError(BoardError):
    """A crashed robot was asked to move."""


class ProtocolError(QSwarmError, ValueError):
    """A protocol precondition does not hold."""


class ScenarioError(QSwarmError, ValueError):
    """Scenario configuration is malformed or fails validation."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)

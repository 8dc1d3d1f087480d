"""Board, robots, moves and collisions."""

from .board import (
    Board,
    Bounds,
    CrashEvent,
    Direction,
    Position,
    RobotState,
    decode_direction,
    distance,
    encode_direction,
)

__all__ = [
    "Board",
    "Bounds",
    "CrashEvent",
    "Direction",
    "Position",
    "RobotState",
    "decode_direction",
    "distance",
    "encode_direction",
]

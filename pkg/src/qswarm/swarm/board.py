"""
Grid-world board model.

Robots stand on integer tiles and move one tile up, down, right or left per
step. All moves of a step are applied simultaneously; robots that end up on
the same tile crash there and never move again.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from ..errors import BoardError, CrashedRobotError
from ..utils.logger import get_logger

logger = get_logger(__name__)


class Position(NamedTuple):
    """Tile coordinate; the board may be infinite."""

    x: int
    y: int

    def step(self, direction: "Direction") -> "Position":
        dx, dy = direction.delta
        return Position(self.x + dx, self.y + dy)


class Direction(Enum):
    UP = "up"
    DOWN = "down"
    RIGHT = "right"
    LEFT = "left"

    @property
    def delta(self) -> Tuple[int, int]:
        return _DELTAS[self]


_DELTAS = {
    Direction.UP: (0, 1),
    Direction.DOWN: (0, -1),
    Direction.RIGHT: (1, 0),
    Direction.LEFT: (-1, 0),
}

# measured bit pair -> command
_DIRECTION_CODE = {
    (0, 0): Direction.UP,
    (1, 1): Direction.DOWN,
    (0, 1): Direction.RIGHT,
    (1, 0): Direction.LEFT,
}
_DIRECTION_BITS = {direction: bits for bits, direction in _DIRECTION_CODE.items()}


def decode_direction(bits: Sequence[int]) -> Direction:
    """
    Map a measured two-bit value to a move.

    Args:
        bits: Pair of outcome bits (first resource, second resource)

    Returns:
        00 -> Up, 11 -> Down, 01 -> Right, 10 -> Left
    """
    key = (int(bits[0]), int(bits[1]))
    if key not in _DIRECTION_CODE:
        raise BoardError(f"Direction bits must be a pair of 0/1 values, got {tuple(bits)}")
    return _DIRECTION_CODE[key]


def encode_direction(direction: Direction) -> Tuple[int, int]:
    """Inverse of decode_direction."""
    return _DIRECTION_BITS[direction]


def distance(a: Position, b: Position) -> int:
    """Manhattan distance between two tiles."""
    return abs(a.x - b.x) + abs(a.y - b.y)


@dataclass(frozen=True)
class Bounds:
    """Inclusive rectangle of allowed tiles."""

    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def contains(self, position: Position) -> bool:
        return self.x_min <= position.x <= self.x_max and self.y_min <= position.y <= self.y_max


@dataclass
class RobotState:
    robot_id: str
    position: Position
    crashed: bool = False
    path: List[Position] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.path:
            self.path.append(self.position)


@dataclass(frozen=True)
class CrashEvent:
    """Robots that crashed together at one tile."""

    robot_ids: Tuple[str, ...]
    position: Position
    kind: str  # 'same-target', 'occupied-tile' or 'swap'


class Board:
    """
    Occupancy of live robots plus the wrecks of crashed ones.

    At most one live robot occupies a tile. Crashed robots stay where they
    crashed; several of them may share the crash tile.
    """

    def __init__(self, bounds: Optional[Bounds] = None, swap_crash: bool = True):
        """
        Initialize an empty board.

        Args:
            bounds: Optional rectangle; leaving it is an error, not a wrap
            swap_crash: Whether two robots exchanging tiles crash
        """
        self.bounds = bounds
        self.swap_crash = swap_crash
        self.robots: Dict[str, RobotState] = {}
        self.occupancy: Dict[Position, str] = {}

    def add_robot(self, robot_id: str, position: Position) -> RobotState:
        """
        Place a new robot.

        Raises:
            BoardError: If the id exists, the tile is taken or out of bounds
        """
        position = Position(*position)
        if robot_id in self.robots:
            raise BoardError(f"Robot {robot_id} is already on the board")
        if position in self.occupancy or self._wreck_at(position):
            raise BoardError(f"Tile {tuple(position)} is already occupied")
        self._check_bounds(robot_id, position)
        robot = RobotState(robot_id, position)
        self.robots[robot_id] = robot
        self.occupancy[position] = robot_id
        return robot

    def robot(self, robot_id: str) -> RobotState:
        if robot_id not in self.robots:
            raise BoardError(f"Unknown robot: {robot_id}")
        return self.robots[robot_id]

    def position(self, robot_id: str) -> Position:
        return self.robot(robot_id).position

    def live_robots(self) -> List[str]:
        return [rid for rid, robot in self.robots.items() if not robot.crashed]

    def relative_offset(self, first: str, second: str) -> Tuple[int, int]:
        """Offset of `second` as seen from `first`."""
        a, b = self.position(first), self.position(second)
        return (b.x - a.x, b.y - a.y)

    def apply_moves(self, moves: Mapping[str, Direction]) -> Tuple["Board", List[CrashEvent]]:
        """
        Apply one step of simultaneous moves.

        Targets are computed first, then conflicts resolved: robots sharing a
        target crash there; a robot entering a tile held by a robot that does
        not leave it crashes together with that robot; two robots exchanging
        tiles crash at their own tiles (when swap_crash is on). Robots absent
        from `moves` stay put.

        Args:
            moves: Robot id -> direction for every robot that moves

        Returns:
            Tuple of (this board, crash events of the step)

        Raises:
            CrashedRobotError: If a crashed robot is asked to move
            BoardError: For unknown robots or moves leaving the bounds
        """
        origins: Dict[str, Position] = {}
        targets: Dict[str, Position] = {}
        for robot_id, direction in moves.items():
            robot = self.robot(robot_id)
            if robot.crashed:
                raise CrashedRobotError(f"Robot {robot_id} crashed and cannot move anymore")
            origins[robot_id] = robot.position
            targets[robot_id] = robot.position.step(direction)
            self._check_bounds(robot_id, targets[robot_id])

        crashed: Dict[str, Position] = {}
        events: List[CrashEvent] = []

        if self.swap_crash:
            movers = sorted(targets)
            for i, a in enumerate(movers):
                for b in movers[i + 1:]:
                    if a in crashed or b in crashed:
                        continue
                    if targets[a] == origins[b] and targets[b] == origins[a]:
                        crashed[a], crashed[b] = origins[a], origins[b]
                        events.append(CrashEvent((a, b), origins[a], "swap"))

        by_target: Dict[Position, List[str]] = {}
        for robot_id in sorted(targets):
            if robot_id not in crashed:
                by_target.setdefault(targets[robot_id], []).append(robot_id)

        # tiles that keep their robot through this step
        held: Dict[Position, List[str]] = {}
        for robot_id, robot in self.robots.items():
            if robot_id not in targets:
                held.setdefault(robot.position, []).append(robot_id)
            elif robot_id in crashed:
                held.setdefault(origins[robot_id], []).append(robot_id)

        for target in sorted(by_target):
            entrants = by_target[target]
            standing = held.get(target, [])
            if len(entrants) < 2 and not standing:
                continue
            involved = list(entrants)
            involved += [
                rid for rid in standing if not self.robots[rid].crashed and rid not in crashed
            ]
            for rid in involved:
                crashed[rid] = target
            kind = "occupied-tile" if standing else "same-target"
            events.append(CrashEvent(tuple(sorted(involved)), target, kind))

        for robot_id, target in targets.items():
            robot = self.robots[robot_id]
            if robot_id in crashed and crashed[robot_id] == origins[robot_id]:
                continue
            del self.occupancy[robot.position]
            robot.position = target
            robot.path.append(target)

        for robot_id in crashed:
            robot = self.robots[robot_id]
            robot.crashed = True
            if self.occupancy.get(robot.position) == robot_id:
                del self.occupancy[robot.position]

        for robot_id in targets:
            robot = self.robots[robot_id]
            if not robot.crashed:
                self.occupancy[robot.position] = robot_id

        for event in events:
            logger.debug(
                f"Crash ({event.kind}) of {', '.join(event.robot_ids)} at {tuple(event.position)}"
            )
        return self, events

    def is_consistent(self) -> bool:
        """Occupancy map and live robot positions agree one to one."""
        live = {rid: r.position for rid, r in self.robots.items() if not r.crashed}
        if len(set(live.values())) != len(live):
            return False
        return self.occupancy == {pos: rid for rid, pos in live.items()}

    def _wreck_at(self, position: Position) -> bool:
        return any(r.crashed and r.position == position for r in self.robots.values())

    def _check_bounds(self, robot_id: str, position: Position) -> None:
        if self.bounds is not None and not self.bounds.contains(position):
            raise BoardError(f"Robot {robot_id} would leave the board at {tuple(position)}")

"""
Scenario configuration.

A scenario is a YAML document naming the protocol to run and its parameters.
Parsing validates every field and reports the first problem together with
the line it appears on; unknown keys are errors.
"""

import dataclasses
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, List, Mapping, NoReturn, Optional, Tuple

import yaml

from .errors import ProtocolError, ScenarioError
from .protocols import AvoidancePolicy
from .qsim import MAX_QUBITS
from .security import BasisMode, ByzantineSpec, ByzantineStrategy, EveStrategy, parse_schedule
from .swarm import Bounds
from .utils.logger import get_logger
from .utils.seeds import MAX_SEED

logger = get_logger(__name__)


class Protocol(Enum):
    WALK = "walk"
    GHZ_WALK = "ghz-walk"
    CONTROL = "control"
    AVOID = "avoid"
    QKD = "qkd"
    BYZANTINE = "byzantine"
    MAGIC_SQUARE = "magic-square"


class Coordination(Enum):
    # independent walks until the robots come within coordination_distance
    LOCAL = "local"
    GLOBAL = "global"


class GameStrategy(Enum):
    QUANTUM = "quantum"
    CLASSICAL = "classical"


Coordinate = Tuple[int, int]

# spacing of generated start positions; far enough that walks do not meet
DEFAULT_SPACING = 1000
LOCAL_SPACING = 3


@dataclass(frozen=True)
class Scenario:
    """Full, validated run configuration."""

    name: str = "scenario"
    protocol: Protocol = Protocol.WALK
    robots: int = 2
    positions: Tuple[Coordinate, ...] = ()
    steps: int = 100
    seed: int = 0
    basis_mode: BasisMode = BasisMode.Z
    basis_schedule: Optional[str] = None
    eve: EveStrategy = EveStrategy.PASSIVE
    byzantine: Tuple[ByzantineSpec, ...] = ()
    sample_size: int = 64
    threshold: float = 0.1
    coordination: Coordination = Coordination.GLOBAL
    coordination_distance: int = 1
    avoidance_policy: AvoidancePolicy = AvoidancePolicy.SAFE
    directives: Tuple[Tuple[str, str], ...] = ()
    window: int = 20
    match_threshold: float = 1.0
    game_strategy: GameStrategy = GameStrategy.QUANTUM
    swap_crash: bool = True
    bounds: Optional[Bounds] = None
    output_dir: str = "output"

    @property
    def robot_ids(self) -> List[str]:
        return [f"r{i + 1}" for i in range(self.robots)]

    @property
    def honest_ids(self) -> List[str]:
        return self.robot_ids[: self.robots - len(self.byzantine)]

    @property
    def byzantine_ids(self) -> List[str]:
        return self.robot_ids[self.robots - len(self.byzantine) :]


FIELD_NAMES = tuple(f.name for f in dataclasses.fields(Scenario))


def _integer(value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"expected an integer, got {value!r}")
    return value


def _positive(value: Any) -> int:
    value = _integer(value)
    if value <= 0:
        raise ValueError(f"must be positive, got {value}")
    return value


def _non_negative(value: Any) -> int:
    value = _integer(value)
    if value < 0:
        raise ValueError(f"must not be negative, got {value}")
    return value


def _seed(value: Any) -> int:
    value = _integer(value)
    if not 0 <= value <= MAX_SEED:
        raise ValueError(f"must be a 64-bit unsigned integer, got {value}")
    return value


def _rate(value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"expected a number, got {value!r}")
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"must be in [0, 1], got {value}")
    return float(value)


def _flag(value: Any) -> bool:
    if not isinstance(value, bool):
        raise ValueError(f"expected true or false, got {value!r}")
    return value


def _text(value: Any) -> str:
    if not isinstance(value, str) or not value:
        raise ValueError(f"expected a non-empty string, got {value!r}")
    return value


def _choice(enum: Any) -> Callable[[Any], Any]:
    def convert(value: Any) -> Any:
        try:
            return enum(value)
        except ValueError:
            options = ", ".join(member.value for member in enum)
            raise ValueError(f"{value!r} is not one of: {options}") from None

    return convert


def _coordinate(value: Any) -> Coordinate:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ValueError(f"a position is a pair [x, y], got {value!r}")
    return (_integer(value[0]), _integer(value[1]))


def _positions(value: Any) -> Tuple[Coordinate, ...]:
    if not isinstance(value, (list, tuple)):
        raise ValueError(f"expected a list of [x, y] pairs, got {value!r}")
    return tuple(_coordinate(item) for item in value)


def _schedule(value: Any) -> Optional[str]:
    if value is None:
        return None
    text = _text(value).upper()
    try:
        parse_schedule(text)
    except ProtocolError as e:
        raise ValueError(str(e)) from None
    return text


def _byzantine(value: Any) -> Tuple[ByzantineSpec, ...]:
    if not isinstance(value, (list, tuple)):
        raise ValueError(f"expected a list of {{strategy, delay}} entries, got {value!r}")
    specs = []
    for item in value:
        if isinstance(item, ByzantineSpec):
            specs.append(item)
            continue
        if not isinstance(item, dict):
            raise ValueError(f"byzantine entry must be a mapping, got {item!r}")
        unknown = set(item) - {"strategy", "delay"}
        if unknown:
            raise ValueError(f"unknown byzantine keys: {', '.join(sorted(unknown))}")
        strategy = _choice(ByzantineStrategy)(item.get("strategy"))
        try:
            specs.append(ByzantineSpec(strategy, _positive(item.get("delay", 1))))
        except ProtocolError as e:
            raise ValueError(str(e)) from None
    return tuple(specs)


def _directives(value: Any) -> Tuple[Tuple[str, str], ...]:
    if not isinstance(value, (list, tuple)):
        raise ValueError(f"expected a list of bitstring pairs, got {value!r}")
    pairs = []
    for item in value:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise ValueError(f"a directive is a pair of bitstrings, got {item!r}")
        for bits in item:
            # unquoted 01 would arrive as the integer 1
            if not isinstance(bits, str) or not bits or set(bits) - {"0", "1"}:
                raise ValueError(
                    f"directive bitstrings must be quoted strings over 01, got {bits!r}"
                )
        pairs.append((item[0], item[1]))
    return tuple(pairs)


def _bounds(value: Any) -> Optional[Bounds]:
    if value is None or isinstance(value, Bounds):
        return value
    if not isinstance(value, (list, tuple)) or len(value) != 4:
        raise ValueError(f"bounds are [x_min, y_min, x_max, y_max], got {value!r}")
    x_min, y_min, x_max, y_max = (_integer(v) for v in value)
    if x_min > x_max or y_min > y_max:
        raise ValueError(f"empty bounds {list(value)}")
    return Bounds(x_min, y_min, x_max, y_max)


_CONVERTERS: Dict[str, Callable[[Any], Any]] = {
    "name": _text,
    "protocol": _choice(Protocol),
    "robots": _positive,
    "positions": _positions,
    "steps": _positive,
    "seed": _seed,
    "basis_mode": _choice(BasisMode),
    "basis_schedule": _schedule,
    "eve": _choice(EveStrategy),
    "byzantine": _byzantine,
    "sample_size": _positive,
    "threshold": _rate,
    "coordination": _choice(Coordination),
    "coordination_distance": _non_negative,
    "avoidance_policy": _choice(AvoidancePolicy),
    "directives": _directives,
    "window": _positive,
    "match_threshold": _rate,
    "game_strategy": _choice(GameStrategy),
    "swap_crash": _flag,
    "bounds": _bounds,
    "output_dir": _text,
}


def default_positions(
    protocol: Protocol, coordination: Coordination, robots: int
) -> List[Coordinate]:
    """
    Start tiles used when a scenario gives none.

    Avoidance pairs start orthogonally adjacent; local walks start close
    enough to meet; everything else starts far apart on the x axis.
    """
    if protocol is Protocol.AVOID:
        spacing = 1
    elif protocol is Protocol.WALK and coordination is Coordination.LOCAL:
        spacing = LOCAL_SPACING
    else:
        spacing = DEFAULT_SPACING
    return [(i * spacing, 0) for i in range(robots)]


def _key_lines(text: str) -> Dict[str, int]:
    root = yaml.compose(text, Loader=yaml.SafeLoader)
    if not isinstance(root, yaml.MappingNode):
        return {}
    return {
        key.value: key.start_mark.line + 1
        for key, _ in root.value
        if isinstance(key, yaml.ScalarNode)
    }


def parse_scenario(text: str) -> Scenario:
    """
    Parse and validate a scenario document.

    Args:
        text: YAML document

    Returns:
        Validated scenario

    Raises:
        ScenarioError: For malformed YAML, unknown keys or invalid values; the
            message carries the offending line when known
    """
    try:
        data = yaml.safe_load(text)
        lines = _key_lines(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        problem = getattr(e, "problem", None) or str(e)
        raise ScenarioError(
            f"malformed scenario: {problem}", line=mark.line + 1 if mark else None
        ) from e
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a mapping of field names to values", line=1)
    return scenario_from_dict(data, lines)


def scenario_from_dict(
    data: Mapping[str, Any], lines: Optional[Mapping[str, int]] = None
) -> Scenario:
    """
    Build a scenario from raw field values.

    Args:
        data: Field name -> raw value (as loaded from YAML)
        lines: Field name -> line number, for diagnostics

    Returns:
        Validated scenario
    """
    lines = lines or {}
    for key in data:
        if key not in _CONVERTERS:
            raise ScenarioError(f"unknown key '{key}'", line=lines.get(str(key)))
    if "protocol" not in data:
        raise ScenarioError("missing required key 'protocol'")

    values: Dict[str, Any] = {}
    for key, raw in data.items():
        try:
            values[key] = _CONVERTERS[key](raw)
        except (TypeError, ValueError) as e:
            raise ScenarioError(f"{key}: {e}", line=lines.get(key)) from None

    if "positions" not in values:
        values["positions"] = tuple(
            default_positions(
                values["protocol"],
                values.get("coordination", Coordination.GLOBAL),
                values.get("robots", 2),
            )
        )
    scenario = Scenario(**values)
    _validate(scenario, lines)
    return scenario


def _validate(s: Scenario, lines: Mapping[str, int]) -> None:
    def fail(message: str, key: str) -> NoReturn:
        raise ScenarioError(message, line=lines.get(key))

    protocol = s.protocol
    if len(s.positions) != s.robots:
        fail(f"{s.robots} robots need {s.robots} positions, got {len(s.positions)}", "positions")
    seen = set()
    for position in s.positions:
        if position in seen:
            fail(f"duplicate initial position {list(position)}", "positions")
        seen.add(position)
        if s.bounds is not None and not (
            s.bounds.x_min <= position[0] <= s.bounds.x_max
            and s.bounds.y_min <= position[1] <= s.bounds.y_max
        ):
            fail(f"initial position {list(position)} lies outside the bounds", "positions")

    if protocol in (Protocol.WALK, Protocol.AVOID, Protocol.QKD, Protocol.MAGIC_SQUARE):
        if s.robots != 2:
            fail(f"{protocol.value} runs with exactly 2 robots, got {s.robots}", "robots")
    elif s.robots < 2 or s.robots > MAX_QUBITS:
        fail(f"{protocol.value} needs between 2 and {MAX_QUBITS} robots, got {s.robots}", "robots")

    if protocol is Protocol.WALK and s.basis_mode is BasisMode.RANDOM:
        fail("walk supports basis_mode z or predefined, not random", "basis_mode")
    if protocol is Protocol.WALK and s.coordination is Coordination.LOCAL:
        (x1, y1), (x2, y2) = s.positions
        start = abs(x2 - x1) + abs(y2 - y1)
        # each step changes the distance by 0 or 2, and distance 0 is a crash
        closest = 2 - start % 2
        if start > s.coordination_distance and closest > s.coordination_distance:
            fail(
                f"robots starting {start} apart can never come within "
                f"coordination_distance {s.coordination_distance}: the distance keeps "
                "its parity, so choose an odd start distance or a threshold of 2 or more",
                "positions" if "positions" in lines else "coordination_distance",
            )
    if protocol is Protocol.AVOID and s.positions[0] == s.positions[1]:
        fail("avoidance robots must start apart", "positions")
    if protocol is Protocol.CONTROL:
        if not s.directives:
            fail("control needs a non-empty directives schedule", "directives")
        for first, second in s.directives:
            if len(first) != s.robots or len(second) != s.robots:
                fail(f"directive bitstrings must have one bit per robot ({s.robots})", "directives")
    if protocol is Protocol.QKD:
        if s.sample_size > s.steps:
            fail(f"sample_size {s.sample_size} exceeds the {s.steps} rounds", "sample_size")
    if s.eve is EveStrategy.INTERCEPT_SCHEDULE and s.basis_mode is not BasisMode.PREDEFINED:
        fail("intercept-schedule needs basis_mode predefined", "eve")
    if protocol is Protocol.BYZANTINE:
        if not s.byzantine:
            fail("byzantine needs at least one byzantine robot", "byzantine")
        honest = s.robots - len(s.byzantine)
        if honest <= len(s.byzantine):
            fail(
                f"honest robots must outnumber byzantine ones ({honest} vs {len(s.byzantine)})",
                "byzantine",
            )
        if s.window > s.steps:
            fail(f"window {s.window} exceeds the {s.steps} steps", "window")
    elif s.byzantine:
        fail("byzantine robots only take part in the byzantine protocol", "byzantine")


def _plain(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Bounds):
        return [value.x_min, value.y_min, value.x_max, value.y_max]
    if isinstance(value, ByzantineSpec):
        return {"strategy": value.strategy.value, "delay": value.delay}
    if isinstance(value, tuple):
        return [_plain(item) for item in value]
    return value


def scenario_to_dict(scenario: Scenario) -> Dict[str, Any]:
    """Plain field values, in declaration order."""
    return {name: _plain(getattr(scenario, name)) for name in FIELD_NAMES}


def render_scenario(scenario: Scenario) -> str:
    """Canonical YAML form; parse_scenario(render_scenario(s)) == s."""
    return yaml.safe_dump(scenario_to_dict(scenario), sort_keys=False, default_flow_style=None)


def with_overrides(scenario: Scenario, overrides: Mapping[str, Any]) -> Scenario:
    """
    Copy of a scenario with some fields replaced and the result revalidated.

    Generated start positions are regenerated when the robot count changes.

    Raises:
        ScenarioError: For unknown fields or invalid values
    """
    data = scenario_to_dict(scenario)
    for key in overrides:
        if key not in _CONVERTERS:
            raise ScenarioError(f"unknown scenario field '{key}'")
    data.update(overrides)
    if "robots" in overrides and "positions" not in overrides:
        del data["positions"]
    return scenario_from_dict(data)


def load_scenario(path: str) -> Scenario:
    """
    Read and parse a scenario file.

    Raises:
        OSError: If the file cannot be read
        ScenarioError: If it is not a valid scenario
    """
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    scenario = parse_scenario(text)
    logger.debug(f"Loaded scenario '{scenario.name}' ({scenario.protocol.value}) from {path}")
    return scenario

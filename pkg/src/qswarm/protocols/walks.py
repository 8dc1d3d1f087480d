"""
Coordinated, controlled and collision-avoiding walk steps.

Every step follows the same pattern: the source emits two resources, each
robot measures its qubit of both, decodes the bit pair into a direction and
all robots move at once on the board.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..errors import ProtocolError
from ..qsim import Basis, StateSpec, enumerate_outcomes, make_state, tensor_product
from ..swarm import Board, CrashEvent, Direction, Position, decode_direction, distance
from ..utils.logger import get_logger
from .source import (
    AVOIDANCE_PAIRS,
    AvoidanceConfig,
    AvoidancePolicy,
    EntanglementSource,
    ResourcePair,
    SourceMode,
)

logger = get_logger(__name__)

Bits = Tuple[int, int]


@dataclass
class StepOutcome:
    """Result of one protocol step."""

    bits: Dict[str, Bits]
    directions: Dict[str, Direction]
    positions: Dict[str, Position]
    crashes: List[CrashEvent] = field(default_factory=list)
    resource_ids: Tuple[int, ...] = ()
    bases: Dict[str, Basis] = field(default_factory=dict)
    config: Optional[AvoidanceConfig] = None
    norm_drift: float = 0.0
    valid: bool = True


def _check_live(board: Board, robots: Sequence[str]) -> None:
    for robot_id in robots:
        if board.robot(robot_id).crashed:
            raise ProtocolError(f"Robot {robot_id} crashed and cannot take part in a step")


def _check_source(source: EntanglementSource, mode: SourceMode, robots: Sequence[str]) -> None:
    if source.mode is not mode:
        raise ProtocolError(f"Expected a {mode.value} source, got {source.mode.value}")
    if source.width != len(robots):
        raise ProtocolError(
            f"Source resources have {source.width} qubits but {len(robots)} robots take part"
        )


def measure_pair(
    robots: Sequence[str],
    resources: ResourcePair,
    rng: np.random.Generator,
    bases: Optional[Mapping[str, Basis]] = None,
) -> Dict[str, Bits]:
    """
    Let each robot measure its qubit of both resources.

    Robot i holds qubit i; robots measure in list order.

    Args:
        robots: Robot ids, in qubit order
        resources: The step's resource pair
        rng: Measurement randomness
        bases: Per-robot basis (Z when omitted)

    Returns:
        Robot id -> measured bit pair
    """
    bits: Dict[str, Bits] = {}
    for qubit, robot_id in enumerate(robots):
        basis = bases.get(robot_id, Basis.Z) if bases else Basis.Z
        first = resources[0].measure(qubit, basis, rng)
        second = resources[1].measure(qubit, basis, rng)
        bits[robot_id] = (first, second)
    return bits


def _move(
    board: Board,
    bits: Dict[str, Bits],
    resources: ResourcePair,
    bases: Optional[Mapping[str, Basis]] = None,
    config: Optional[AvoidanceConfig] = None,
) -> StepOutcome:
    directions = {robot_id: decode_direction(pair) for robot_id, pair in bits.items()}
    _, crashes = board.apply_moves(directions)
    return StepOutcome(
        bits=bits,
        directions=directions,
        positions={robot_id: board.position(robot_id) for robot_id in bits},
        crashes=crashes,
        resource_ids=tuple(r.resource_id for r in resources),
        bases=dict(bases) if bases else {robot_id: Basis.Z for robot_id in bits},
        config=config,
        norm_drift=max(r.max_norm_drift for r in resources),
    )


def coordinated_step(
    board: Board,
    robots: Sequence[str],
    source: EntanglementSource,
    rng: np.random.Generator,
    basis: Basis = Basis.Z,
) -> StepOutcome:
    """
    Two robots measure two Phi+ pairs and move the same way.

    Args:
        board: Board holding the robots
        robots: The two robot ids; the first gets the left qubits
        source: EPR pair source
        rng: Measurement randomness
        basis: Basis both robots measure in (Phi+ correlates in Z and X alike)

    Returns:
        The step outcome; both robots decode identical bits

    Raises:
        ProtocolError: On a crashed robot, wrong robot count or source
    """
    if len(robots) != 2:
        raise ProtocolError(f"coordinated_step needs two robots, got {len(robots)}")
    _check_source(source, SourceMode.EPR_PAIR, robots)
    _check_live(board, robots)
    resources = source.emit(basis)
    bits = measure_pair(robots, resources, rng, {rid: basis for rid in robots})
    return _move(board, bits, resources, {rid: basis for rid in robots})


def ghz_coordinated_step(
    board: Board,
    robots: Sequence[str],
    source: EntanglementSource,
    rng: np.random.Generator,
    basis: Basis = Basis.Z,
) -> StepOutcome:
    """
    n robots measure two GHZ(n) resources and move identically.

    Args:
        board: Board holding the robots
        robots: Robot ids; robot i measures qubit i of each resource
        source: GHZ source whose width equals the robot count
        rng: Measurement randomness
        basis: Basis the resources are prepared and measured in

    Returns:
        The step outcome
    """
    if len(robots) < 2:
        raise ProtocolError(f"ghz_coordinated_step needs at least two robots, got {len(robots)}")
    _check_source(source, SourceMode.GHZ, robots)
    _check_live(board, robots)
    resources = source.emit(basis)
    bases = {rid: basis for rid in robots}
    bits = measure_pair(robots, resources, rng, bases)
    return _move(board, bits, resources, bases)


def ghz_sifted_step(
    board: Board,
    robots: Sequence[str],
    source: EntanglementSource,
    rng: np.random.Generator,
    source_basis: Basis,
    bases: Mapping[str, Basis],
) -> StepOutcome:
    """
    GHZ step with independently chosen bases.

    The source prepares both resources in its own basis; each robot measures
    in the basis it picked and publishes it. Only when every robot matched
    the source do the bits become a move; otherwise nobody moves and the
    outcome is marked invalid.

    Args:
        board: Board holding the robots
        robots: Robot ids; robot i measures qubit i of each resource
        source: GHZ source whose width equals the robot count
        rng: Measurement randomness
        source_basis: Basis the source prepared the resources in
        bases: Robot id -> basis it measured in

    Returns:
        The step outcome; `valid` tells whether the robots moved
    """
    _check_source(source, SourceMode.GHZ, robots)
    _check_live(board, robots)
    resources = source.emit(source_basis)
    bits = measure_pair(robots, resources, rng, bases)
    if all(bases[rid] is source_basis for rid in robots):
        return _move(board, bits, resources, bases)
    return StepOutcome(
        bits=bits,
        directions={},
        positions={robot_id: board.position(robot_id) for robot_id in robots},
        resource_ids=tuple(r.resource_id for r in resources),
        bases=dict(bases),
        norm_drift=max(r.max_norm_drift for r in resources),
        valid=False,
    )


def controlled_step(
    board: Board,
    robots: Sequence[str],
    source: EntanglementSource,
    rng: np.random.Generator,
) -> StepOutcome:
    """
    Robots measure product-state directives chosen by the central entity.

    The robots run the same measurement as in a random walk; the outcome is
    fixed by the directive and does not depend on `rng`.

    Args:
        board: Board holding the robots
        robots: Robot ids; robot i reads bit i of each directive bitstring
        source: Directive source
        rng: Measurement randomness (has no effect on the outcome)

    Returns:
        The step outcome
    """
    _check_source(source, SourceMode.PRODUCT_DIRECTIVE, robots)
    _check_live(board, robots)
    resources = source.emit()
    bits = measure_pair(robots, resources, rng)
    return _move(board, bits, resources)


def avoidance_step(
    board: Board,
    robots: Sequence[str],
    source: EntanglementSource,
    rng: np.random.Generator,
    config: Optional[AvoidanceConfig] = None,
) -> StepOutcome:
    """
    Two robots move randomly but never toward each other.

    Under the SAFE policy the source draws the configuration uniformly among
    those that cannot bring the pair into contact from the current offset.

    Args:
        board: Board holding the robots
        robots: The two robot ids; the first takes the left qubit of each pair
        source: Avoidance pair source
        rng: Measurement randomness
        config: Force a configuration instead of asking the source policy

    Returns:
        The step outcome, carrying the configuration used
    """
    if len(robots) != 2:
        raise ProtocolError(f"avoidance_step needs two robots, got {len(robots)}")
    _check_source(source, SourceMode.AVOIDANCE_PAIR, robots)
    _check_live(board, robots)
    first, second = robots
    if distance(board.position(first), board.position(second)) < 1:
        raise ProtocolError("avoidance_step needs robots at distance >= 1")
    if config is None and source.avoidance_policy is AvoidancePolicy.SAFE:
        offset = board.relative_offset(first, second)
        candidates = admissible_configs(offset) or list(AvoidanceConfig)
        config = source.choose_config(candidates)
    resources = source.emit(config=config)
    bits = measure_pair(robots, resources, rng)
    return _move(board, bits, resources, config=source.last_config)


def independent_step(
    board: Board, robots: Sequence[str], streams: Mapping[str, np.random.Generator]
) -> StepOutcome:
    """
    Uncoordinated random walk step: each robot draws its own direction.

    Args:
        board: Board holding the robots
        robots: Robot ids
        streams: Robot id -> that robot's private generator

    Returns:
        The step outcome (no resources involved)
    """
    _check_live(board, robots)
    bits: Dict[str, Bits] = {}
    for robot_id in robots:
        draw = streams[robot_id].integers(0, 2, size=2)
        bits[robot_id] = (int(draw[0]), int(draw[1]))
    directions = {robot_id: decode_direction(pair) for robot_id, pair in bits.items()}
    _, crashes = board.apply_moves(directions)
    return StepOutcome(
        bits=bits,
        directions=directions,
        positions={robot_id: board.position(robot_id) for robot_id in robots},
        crashes=crashes,
        bases={},
    )


@lru_cache(maxsize=None)
def enumerate_avoidance_outcomes(config: AvoidanceConfig) -> Dict[Tuple[Bits, Bits], float]:
    """
    Brute-force every measurement branch of an avoidance pair configuration.

    r1 measures the left qubit of both pairs, then r2 the right qubits.

    Args:
        config: Pair configuration

    Returns:
        (r1 bits, r2 bits) -> probability, for every branch with nonzero weight
    """
    first_bell, second_bell = AVOIDANCE_PAIRS[config]
    joint = tensor_product(
        make_state(StateSpec.bell(first_bell)), make_state(StateSpec.bell(second_bell))
    )
    # joint qubits: 0,1 = |Phi1>, 2,3 = |Phi2>; r1 holds 0 and 2, r2 holds 1 and 3
    order = [(0, Basis.Z), (2, Basis.Z), (1, Basis.Z), (3, Basis.Z)]
    return {
        ((bits[0], bits[1]), (bits[2], bits[3])): p
        for bits, p in enumerate_outcomes(joint, order).items()
    }


def _collides(offset: Tuple[int, int], first: Direction, second: Direction) -> bool:
    dx = offset[0] + second.delta[0] - first.delta[0]
    dy = offset[1] + second.delta[1] - first.delta[1]
    if (dx, dy) == (0, 0):
        return True
    # exchanging tiles
    return abs(offset[0]) + abs(offset[1]) == 1 and (dx, dy) == (-offset[0], -offset[1])


def admissible_configs(offset: Tuple[int, int]) -> List[AvoidanceConfig]:
    """
    Configurations none of whose outcomes brings the pair into contact.

    Args:
        offset: Position of r2 relative to r1

    Returns:
        Admissible configurations, in enum order
    """
    admissible = []
    for config in AvoidanceConfig:
        outcomes = enumerate_avoidance_outcomes(config)
        if not any(
            _collides(offset, decode_direction(b1), decode_direction(b2)) for b1, b2 in outcomes
        ):
            admissible.append(config)
    return admissible

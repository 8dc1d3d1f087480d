"""
Built-in invariant checks.

A fast self-test of the simulator: exact identities are checked exactly,
sampled properties with a fixed seed. Used by the `qswarm verify` command.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Tuple

import numpy as np

from .magic_square import classical_optimum, quantum_round, verify_table_algebra
from .protocols import (
    AvoidanceConfig,
    EntanglementSource,
    coordinated_step,
    enumerate_avoidance_outcomes,
    ghz_coordinated_step,
)
from .qsim import NORM_TOLERANCE, Basis, Bell, StateSpec, make_state, measure_qubit
from .scenario import parse_scenario
from .security import (
    ByzantineSpec,
    ByzantineStrategy,
    byzantine_match_probability,
    detection_probability,
)
from .simulate import run_scenario
from .swarm import Board, Direction, Position, decode_direction
from .utils.logger import get_logger

logger = get_logger(__name__)

SAMPLES = 2000

# r1 bits -> r2 bits for each pair configuration
AVOIDANCE_TABLES = {
    AvoidanceConfig.PHI_PSI: {
        ((0, 0), (0, 1)),
        ((0, 1), (0, 0)),
        ((1, 0), (1, 1)),
        ((1, 1), (1, 0)),
    },
    AvoidanceConfig.PSI_PHI: {
        ((0, 0), (1, 0)),
        ((0, 1), (1, 1)),
        ((1, 0), (0, 0)),
        ((1, 1), (0, 1)),
    },
}

_DETERMINISM_SCENARIO = """
name: determinism
protocol: walk
coordination: local
steps: 200
seed: 7
"""


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


Check = Callable[[np.random.Generator], Tuple[bool, str]]
_CHECKS: List[Tuple[str, Check]] = []


def _check(name: str) -> Callable[[Check], Check]:
    def register(fn: Check) -> Check:
        _CHECKS.append((name, fn))
        return fn

    return register


def _pair_correlation(bell: Bell, basis: Basis, rng: np.random.Generator) -> Tuple[int, float]:
    equal, drift = 0, 0.0
    state = make_state(StateSpec.bell(bell))
    for _ in range(SAMPLES):
        a, collapsed = measure_qubit(state, 0, basis, float(rng.random()))
        b, collapsed = measure_qubit(collapsed, 1, basis, float(rng.random()))
        equal += int(a == b)
        drift = max(drift, collapsed.norm_drift())
    return equal, drift


@_check("phi-plus perfect correlation (Z and X)")
def _phi_plus(rng: np.random.Generator) -> Tuple[bool, str]:
    results = [_pair_correlation(Bell.PHI_PLUS, basis, rng) for basis in Basis]
    ok = all(equal == SAMPLES for equal, _ in results)
    ok = ok and all(drift <= NORM_TOLERANCE for _, drift in results)
    return ok, f"equal outcomes: {[equal for equal, _ in results]} of {SAMPLES}"


@_check("psi-plus anti-correlated in Z, correlated in X")
def _psi_plus(rng: np.random.Generator) -> Tuple[bool, str]:
    z_equal, _ = _pair_correlation(Bell.PSI_PLUS, Basis.Z, rng)
    x_equal, _ = _pair_correlation(Bell.PSI_PLUS, Basis.X, rng)
    return z_equal == 0 and x_equal == SAMPLES, f"Z equal {z_equal}, X equal {x_equal}"


@_check("direction code")
def _direction_code(rng: np.random.Generator) -> Tuple[bool, str]:
    expected = {
        (0, 0): Direction.UP,
        (1, 1): Direction.DOWN,
        (0, 1): Direction.RIGHT,
        (1, 0): Direction.LEFT,
    }
    ok = all(decode_direction(bits) is d for bits, d in expected.items())
    return ok, ""


@_check("coordinated walk keeps the relative offset")
def _coordinated_offset(rng: np.random.Generator) -> Tuple[bool, str]:
    board = Board()
    board.add_robot("r1", Position(0, 0))
    board.add_robot("r2", Position(3, 1))
    source = EntanglementSource.epr_pair()
    for _ in range(SAMPLES):
        coordinated_step(board, ["r1", "r2"], source, rng)
    offset = board.relative_offset("r1", "r2")
    return offset == (3, 1), f"final offset {offset}"


@_check("GHZ walk moves all robots identically")
def _ghz_identical(rng: np.random.Generator) -> Tuple[bool, str]:
    board = Board()
    robots = ["r1", "r2", "r3"]
    for i, rid in enumerate(robots):
        board.add_robot(rid, Position(10 * i, 0))
    source = EntanglementSource.ghz(3)
    identical = 0
    for _ in range(SAMPLES):
        outcome = ghz_coordinated_step(board, robots, source, rng)
        identical += int(len(set(outcome.directions.values())) == 1)
    return identical == SAMPLES, f"{identical} of {SAMPLES} steps identical"


@_check("avoidance outcome tables")
def _avoidance_tables(rng: np.random.Generator) -> Tuple[bool, str]:
    for config, table in AVOIDANCE_TABLES.items():
        outcomes = enumerate_avoidance_outcomes(config)
        if set(outcomes) != table:
            return False, f"{config.value}: {sorted(outcomes)}"
        if any(abs(p - 0.25) > 1e-12 for p in outcomes.values()):
            return False, f"{config.value}: non-uniform {outcomes}"
    return True, ""


@_check("magic square table algebra")
def _table_algebra(rng: np.random.Generator) -> Tuple[bool, str]:
    checks = verify_table_algebra()
    failed = [name for name, ok in checks.items() if not ok]
    return not failed, ", ".join(failed)


@_check("classical magic square optimum is 8/9")
def _classical_optimum(rng: np.random.Generator) -> Tuple[bool, str]:
    value, _ = classical_optimum()
    return value == Fraction(8, 9), str(value)


@_check("quantum magic square always wins")
def _quantum_wins(rng: np.random.Generator) -> Tuple[bool, str]:
    rounds = [quantum_round(r, c, rng) for r in range(3) for c in range(3) for _ in range(20)]
    wins = sum(1 for game in rounds if game.win)
    return wins == len(rounds), f"{wins} of {len(rounds)}"


@_check("basis guessing match probability is 5/8")
def _guess_basis(rng: np.random.Generator) -> Tuple[bool, str]:
    p = byzantine_match_probability(ByzantineSpec(ByzantineStrategy.GUESS_BASIS))
    return abs(p - 0.625) < 1e-12, f"{p}"


@_check("intercept-resend detection power at 64 samples")
def _detection_power(rng: np.random.Generator) -> Tuple[bool, str]:
    p = detection_probability(64, Fraction(1, 4), 0.1)
    return p >= Fraction(99, 100), f"{float(p):.6f}"


@_check("identical seeds give identical traces")
def _determinism(rng: np.random.Generator) -> Tuple[bool, str]:
    scenario = parse_scenario(_DETERMINISM_SCENARIO)
    first, _ = run_scenario(scenario)
    second, _ = run_scenario(scenario)
    same = [e.to_json() for e in first] == [e.to_json() for e in second]
    return same, f"{len(first)} events"


def run_checks(seed: int = 0) -> List[CheckResult]:
    """
    Run every registered check.

    Args:
        seed: Seed for the sampled checks

    Returns:
        One result per check, in registration order
    """
    results = []
    for name, fn in _CHECKS:
        try:
            passed, detail = fn(np.random.default_rng(seed))
        except Exception as e:
            passed, detail = False, f"raised {type(e).__name__}: {e}"
        logger.debug(f"{name}: {'ok' if passed else 'FAILED'} {detail}")
        results.append(CheckResult(name, passed, detail))
    return results

"""
Mermin-Peres magic square game.

Player A gets a row and answers three +-1 values multiplying to +1; player B
gets a column and answers three values multiplying to -1. They win when they
agree on the shared tile. Classically the best is 8/9; sharing two Phi+ pairs
and measuring the observables of the table below wins every round:

     I⊗Z |  Z⊗I |  Z⊗Z
     X⊗I |  I⊗X |  X⊗X
    -X⊗Z | -Z⊗X |  Y⊗Y
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..errors import ProtocolError
from ..qsim import (
    Bell,
    EntangledResource,
    SignedPauliObservable,
    StateSpec,
    make_state,
    tensor_product,
)
from ..utils.logger import get_logger

logger = get_logger(__name__)

Triple = Tuple[int, int, int]

TABLE_LABELS = (
    ("IZ", "ZI", "ZZ"),
    ("XI", "IX", "XX"),
    ("-XZ", "-ZX", "YY"),
)

# qubits 0,1 and 2,3 are the two Phi+ pairs
PLAYER_A_QUBITS = (0, 2)
PLAYER_B_QUBITS = (1, 3)

ROW_PARITY = 1
COLUMN_PARITY = -1


def standard_table() -> List[List[SignedPauliObservable]]:
    """The 3x3 observable table, on a player's local qubits (0, 1)."""
    return [[SignedPauliObservable.parse(label) for label in row] for row in TABLE_LABELS]


@dataclass(frozen=True)
class GameRound:
    row: int
    col: int
    row_values: Triple
    col_values: Triple
    win: bool
    norm_drift: float = 0.0

    @classmethod
    def scored(
        cls, row: int, col: int, row_values: Triple, col_values: Triple, norm_drift: float = 0.0
    ) -> "GameRound":
        win = row_values[col] == col_values[row]
        return cls(row, col, row_values, col_values, win, norm_drift)

    @property
    def shared_value(self) -> int:
        """A's value on the shared tile; the round's coordination bit when the game is won."""
        return self.row_values[self.col]


def _product(values: Sequence[int]) -> int:
    return reduce(lambda a, b: a * b, values, 1)


def _triples(parity: int) -> List[Triple]:
    return [t for t in itertools.product((1, -1), repeat=3) if _product(t) == parity]


ROW_TRIPLES = _triples(ROW_PARITY)
COLUMN_TRIPLES = _triples(COLUMN_PARITY)


@dataclass(frozen=True)
class ClassicalStrategy:
    """Deterministic answers: one row triple per row (A) and one column triple per column (B)."""

    rows: Tuple[Triple, Triple, Triple]
    cols: Tuple[Triple, Triple, Triple]

    def wins(self) -> int:
        """Number of the 9 (row, col) inputs this strategy wins."""
        return sum(
            1 for r in range(3) for c in range(3) if self.rows[r][c] == self.cols[c][r]
        )


def classical_round(strategy: ClassicalStrategy, row: int, col: int) -> GameRound:
    return GameRound.scored(row, col, strategy.rows[row], strategy.cols[col])


def _per_player_strategies(triples: List[Triple]) -> List[Tuple[Triple, Triple, Triple]]:
    return list(itertools.product(triples, repeat=3))


def strategy_losses() -> Dict[int, int]:
    """
    Exhaustive census of joint deterministic strategies.

    Returns:
        Number of lost inputs -> number of joint strategies losing that many
    """
    census: Dict[int, int] = {}
    for rows in _per_player_strategies(ROW_TRIPLES):
        for cols in _per_player_strategies(COLUMN_TRIPLES):
            losses = 9 - ClassicalStrategy(rows, cols).wins()
            census[losses] = census.get(losses, 0) + 1
    return census


@lru_cache(maxsize=None)
def classical_optimum() -> Tuple[Fraction, ClassicalStrategy]:
    """
    Best classical win probability over uniform (row, col) inputs.

    Searches all 64 x 64 joint deterministic strategies; shared randomness
    cannot beat the best deterministic one.

    Returns:
        Tuple of (exact win probability, a strategy achieving it)
    """
    best_wins = -1
    best: ClassicalStrategy
    for rows in _per_player_strategies(ROW_TRIPLES):
        for cols in _per_player_strategies(COLUMN_TRIPLES):
            strategy = ClassicalStrategy(rows, cols)
            wins = strategy.wins()
            if wins > best_wins:
                best_wins, best = wins, strategy
    logger.debug(f"Classical optimum: {best_wins}/9 inputs")
    return Fraction(best_wins, 9), best


def shared_state() -> EntangledResource:
    """Two Phi+ pairs on qubits (0, 1) and (2, 3)."""
    phi = make_state(StateSpec.bell(Bell.PHI_PLUS))
    return EntangledResource(0, tensor_product(phi, phi), label="magic-square")


def quantum_round(row: int, col: int, rng: np.random.Generator) -> GameRound:
    """
    Play one round with the entangled strategy.

    A measures the three observables of its row on qubits (0, 2), then B
    measures its column on qubits (1, 3); each player's observables commute,
    so measurement order within a row or column does not matter.

    Args:
        row: Row given to A (0..2)
        col: Column given to B (0..2)
        rng: Measurement randomness

    Returns:
        The scored round

    Raises:
        ProtocolError: If the row or column is outside 0..2
    """
    if not (0 <= row < 3 and 0 <= col < 3):
        raise ProtocolError(f"Row and column must be in 0..2, got ({row}, {col})")
    table = standard_table()
    resource = shared_state()
    row_values = tuple(
        resource.measure_observable(table[row][c].on(PLAYER_A_QUBITS), rng) for c in range(3)
    )
    col_values = tuple(
        resource.measure_observable(table[r][col].on(PLAYER_B_QUBITS), rng) for r in range(3)
    )
    round_ = GameRound.scored(
        row, col, row_values, col_values, resource.max_norm_drift  # type: ignore[arg-type]
    )
    if _product(round_.row_values) != ROW_PARITY or _product(round_.col_values) != COLUMN_PARITY:
        logger.warning(f"Parity violated in round ({row}, {col}): {round_}")
    return round_


def sensor_board_check(round_: GameRound) -> List[Tuple[int, int]]:
    """
    Which sensors of the 3x3 board fire.

    A sends its row values to the sensors of its row, B its column values to
    the sensors of its column. Only the intersection receives both, and it
    fires iff the two values are equal.

    Args:
        round_: A played round

    Returns:
        Coordinates of firing sensors (empty or the intersection)
    """
    fired = []
    for r in range(3):
        for c in range(3):
            if r == round_.row and c == round_.col and round_.row_values[c] == round_.col_values[r]:
                fired.append((r, c))
    return fired


def _pairwise_commuting(observables: Sequence[SignedPauliObservable]) -> bool:
    return all(a.commutes_with(b) for a, b in itertools.combinations(observables, 2))


def verify_table_algebra(table: Sequence[Sequence[SignedPauliObservable]] = ()) -> Dict[str, bool]:
    """
    Check the table identities by symbolic products and dense matrices.

    Returns:
        Check name -> whether it holds
    """
    table = table or standard_table()
    identity = np.eye(4, dtype=complex)
    checks: Dict[str, bool] = {}
    for i in range(3):
        row = list(table[i])
        col = [table[r][i] for r in range(3)]
        row_symbolic = reduce(lambda a, b: a @ b, row)
        col_symbolic = reduce(lambda a, b: a @ b, col)
        row_dense = reduce(np.matmul, (o.matrix() for o in row))
        col_dense = reduce(np.matmul, (o.matrix() for o in col))
        checks[f"row{i}_product_is_plus_identity"] = (
            row_symbolic.is_identity()
            and row_symbolic.sign == 1
            and np.array_equal(row_dense, identity)
        )
        checks[f"col{i}_product_is_minus_identity"] = (
            col_symbolic.is_identity()
            and col_symbolic.sign == -1
            and np.array_equal(col_dense, -identity)
        )
        checks[f"row{i}_commutes"] = _pairwise_commuting(row)
        checks[f"col{i}_commutes"] = _pairwise_commuting(col)
    return checks

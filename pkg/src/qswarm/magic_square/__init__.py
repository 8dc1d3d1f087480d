"""Mermin-Peres magic square pseudo-telepathy game."""

from .game import (
    COLUMN_TRIPLES,
    PLAYER_A_QUBITS,
    PLAYER_B_QUBITS,
    ROW_TRIPLES,
    TABLE_LABELS,
    ClassicalStrategy,
    GameRound,
    classical_optimum,
    classical_round,
    quantum_round,
    sensor_board_check,
    shared_state,
    standard_table,
    strategy_losses,
    verify_table_algebra,
)

__all__ = [
    "COLUMN_TRIPLES",
    "PLAYER_A_QUBITS",
    "PLAYER_B_QUBITS",
    "ROW_TRIPLES",
    "TABLE_LABELS",
    "ClassicalStrategy",
    "GameRound",
    "classical_optimum",
    "classical_round",
    "quantum_round",
    "sensor_board_check",
    "shared_state",
    "standard_table",
    "strategy_losses",
    "verify_table_algebra",
]

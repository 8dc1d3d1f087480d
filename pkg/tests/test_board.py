import pytest

from qswarm.errors import BoardError, CrashedRobotError
from qswarm.swarm import (
    Board,
    Bounds,
    Direction,
    Position,
    decode_direction,
    distance,
    encode_direction,
)


def make_board(positions, **kwargs):
    board = Board(**kwargs)
    for i, position in enumerate(positions):
        board.add_robot(f"r{i + 1}", Position(*position))
    return board


def test_direction_code():
    assert decode_direction((0, 0)) is Direction.UP
    assert decode_direction((1, 1)) is Direction.DOWN
    assert decode_direction((0, 1)) is Direction.RIGHT
    assert decode_direction((1, 0)) is Direction.LEFT
    for direction in Direction:
        assert decode_direction(encode_direction(direction)) is direction


def test_direction_bits_must_be_binary():
    with pytest.raises(BoardError):
        decode_direction((2, 0))


def test_manhattan_distance():
    assert distance(Position(0, 0), Position(3, -4)) == 7


def test_add_robot_rejects_occupied_tile_and_duplicate_id():
    board = make_board([(0, 0)])
    with pytest.raises(BoardError):
        board.add_robot("r2", Position(0, 0))
    with pytest.raises(BoardError):
        board.add_robot("r1", Position(5, 5))


def test_simultaneous_moves_keep_offset(two_robot_board):
    two_robot_board.apply_moves({"r1": Direction.UP, "r2": Direction.UP})
    assert two_robot_board.position("r1") == Position(0, 1)
    assert two_robot_board.relative_offset("r1", "r2") == (10, 0)
    assert two_robot_board.is_consistent()


def test_same_target_crash():
    board = make_board([(0, 0), (2, 0)])
    _, crashes = board.apply_moves({"r1": Direction.RIGHT, "r2": Direction.LEFT})
    assert len(crashes) == 1
    assert crashes[0].kind == "same-target"
    assert crashes[0].position == Position(1, 0)
    assert board.robot("r1").crashed and board.robot("r2").crashed
    assert board.occupancy == {}


def test_entering_a_standing_robot_crashes_both():
    board = make_board([(0, 0), (1, 0)])
    _, crashes = board.apply_moves({"r1": Direction.RIGHT})
    assert crashes[0].kind == "occupied-tile"
    assert crashes[0].robot_ids == ("r1", "r2")
    assert board.position("r1") == Position(1, 0)


def test_following_into_a_vacated_tile_is_allowed():
    board = make_board([(0, 0), (1, 0)])
    _, crashes = board.apply_moves({"r1": Direction.RIGHT, "r2": Direction.RIGHT})
    assert crashes == []
    assert board.position("r2") == Position(2, 0)
    assert board.is_consistent()


def test_swap_crashes_at_origins():
    board = make_board([(0, 0), (1, 0)])
    _, crashes = board.apply_moves({"r1": Direction.RIGHT, "r2": Direction.LEFT})
    assert [c.kind for c in crashes] == ["swap"]
    assert board.position("r1") == Position(0, 0)
    assert board.position("r2") == Position(1, 0)


def test_swap_passes_when_disabled():
    board = make_board([(0, 0), (1, 0)], swap_crash=False)
    _, crashes = board.apply_moves({"r1": Direction.RIGHT, "r2": Direction.LEFT})
    assert crashes == []
    assert board.position("r1") == Position(1, 0)
    assert board.is_consistent()


def test_crashed_robot_cannot_move():
    board = make_board([(0, 0), (2, 0)])
    board.apply_moves({"r1": Direction.RIGHT, "r2": Direction.LEFT})
    with pytest.raises(CrashedRobotError):
        board.apply_moves({"r1": Direction.UP})


def test_moving_onto_a_wreck_crashes():
    board = make_board([(0, 0), (2, 0), (1, 2)])
    board.apply_moves({"r1": Direction.RIGHT, "r2": Direction.LEFT})
    board.apply_moves({"r3": Direction.DOWN})
    _, crashes = board.apply_moves({"r3": Direction.DOWN})
    assert crashes[0].robot_ids == ("r3",)
    assert board.robot("r3").crashed


def test_leaving_the_bounds_is_an_error():
    board = make_board([(0, 0)], bounds=Bounds(0, 0, 3, 3))
    with pytest.raises(BoardError):
        board.apply_moves({"r1": Direction.LEFT})


def test_path_records_every_move(two_robot_board):
    for direction in (Direction.UP, Direction.RIGHT, Direction.DOWN):
        two_robot_board.apply_moves({"r1": direction, "r2": direction})
    path = two_robot_board.robot("r1").path
    assert path == [Position(0, 0), Position(0, 1), Position(1, 1), Position(1, 0)]

"""Shared fixtures for the qswarm test suite."""

import math
import textwrap

import numpy as np
import pytest

from qswarm.scenario import parse_scenario
from qswarm.swarm import Board, Position
from qswarm.utils.seeds import SeedStreams

# Statistical assertions use 4 sigma so a fixed-seed run never sits on the edge.
SIGMAS = 4.0


def within_sigma(count: int, trials: int, p: float, sigmas: float = SIGMAS) -> bool:
    """Whether count/trials is within `sigmas` binomial standard deviations of p."""
    sigma = math.sqrt(p * (1 - p) / trials)
    return abs(count / trials - p) <= sigmas * sigma


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def streams():
    return SeedStreams(42)


@pytest.fixture
def two_robot_board():
    board = Board()
    board.add_robot("r1", Position(0, 0))
    board.add_robot("r2", Position(10, 0))
    return board


@pytest.fixture
def scenario_text():
    """Build a scenario from an indented YAML snippet."""

    def build(text: str):
        return parse_scenario(textwrap.dedent(text))

    return build

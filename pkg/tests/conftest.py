from __future__ import annotations

from fractions import Fraction

import pytest

from enlab.finite_prob import adapted, build_space
from enlab.random_times import RandomTimeMap, analyze

Q = Fraction

# Two-period binary tree shared by most exact fixtures: four outcomes of
# probability 1/4, revealed one coordinate per step.
TREE = {
    "outcomes": ["uu", "ud", "du", "dd"],
    "prob": {o: "1/4" for o in ["uu", "ud", "du", "dd"]},
    "partitions": [
        [["uu", "ud", "du", "dd"]],
        [["uu", "ud"], ["du", "dd"]],
        [["uu"], ["ud"], ["du"], ["dd"]],
    ],
}

# symmetric +-1 walk on the tree
WALK = {
    "uu": [0, 1, 2],
    "ud": [0, 1, 0],
    "du": [0, -1, 0],
    "dd": [0, -1, -2],
}

STOP_TAU = {"uu": 1, "ud": 1, "du": 1, "dd": 1}            # deterministic time
TENT_TAU = {"uu": 0, "ud": 2, "du": 2, "dd": 0}            # last zero of the walk


@pytest.fixture(scope="session")
def tree_space():
    return build_space(TREE)


@pytest.fixture(scope="session")
def walk(tree_space):
    return adapted(WALK, tree_space)


@pytest.fixture(scope="session")
def stop_analysis(tree_space):
    return analyze(tree_space, RandomTimeMap.build(STOP_TAU, tree_space))


@pytest.fixture(scope="session")
def tent_analysis(tree_space):
    return analyze(tree_space, RandomTimeMap.build(TENT_TAU, tree_space))

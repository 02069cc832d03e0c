"""Shared small structures used across the suite."""

import pytest

from stonework.order import preorder_from_pairs


@pytest.fixture
def chain2():
    return preorder_from_pairs(2, [(0, 1)])


@pytest.fixture
def chain3():
    return preorder_from_pairs(3, [(0, 1), (1, 2)])


@pytest.fixture
def antichain2():
    return preorder_from_pairs(2, [])


@pytest.fixture
def diamond():
    # 0 < a,b < 1 with a,b incomparable
    return preorder_from_pairs(4, [(0, 1), (0, 2), (1, 3), (2, 3)])


@pytest.fixture
def vee():
    # c <= a, c <= b, no common upper bound
    return preorder_from_pairs(3, [(0, 1), (0, 2)])

"""
Shared fixtures for the test suite.
"""

import os
import sys

import numpy as np
import pytest

# Add src/ to path
sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src"))

from edge_proposals.generators import SbmConfig, generate_sbm
from edge_proposals.graph import Graph
from edge_proposals.splits import sbm_eval_edges


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long Monte Carlo reproductions (deselect with -m 'not slow')")


def random_graph(rng: np.random.Generator, n: int, p: float) -> Graph:
    rows, cols = np.triu_indices(n, k=1)
    keep = rng.random(len(rows)) < p
    return Graph.from_pairs(n, np.column_stack([rows[keep], cols[keep]]))


@pytest.fixture
def path4():
    """Path 0-1-2-3."""
    return Graph.from_pairs(4, [(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def square():
    """Four-cycle 0-1-2-3-0."""
    return Graph.from_pairs(4, [(0, 1), (1, 2), (2, 3), (0, 3)])


@pytest.fixture
def star5():
    """Star with center 0 and leaves 1..4."""
    return Graph.from_pairs(5, [(0, 1), (0, 2), (0, 3), (0, 4)])


@pytest.fixture
def sbm_setup():
    """Desk-scale two-block SBM graph with its evaluation split."""
    g, blocks = generate_sbm(SbmConfig(seed=3))
    split = sbm_eval_edges(g, blocks, seed=3)
    return g, blocks, split

"""
Synthetic graph generators: the stochastic block model and a triangle-closing
social network growth model with per-edge creation times.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Set, Tuple

import numpy as np

from .errors import ConfigurationError
from .graph import EdgeList, Graph, keys_to_pairs
from .seeding import make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SbmConfig:
    block_sizes: List[int] = field(default_factory=lambda: [50, 50])
    p_in: float = 0.3
    p_out: float = 1.0 / 30.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_out <= self.p_in <= 1.0:
            raise ConfigurationError(f"SBM needs 0 <= p_out <= p_in <= 1, got p_in={self.p_in}, p_out={self.p_out}")
        if any(int(s) < 0 for s in self.block_sizes):
            raise ConfigurationError(f"Block sizes must be nonnegative, got {self.block_sizes}")

    @property
    def num_nodes(self) -> int:
        return int(sum(self.block_sizes))

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass(frozen=True)
class JinConfig:
    num_nodes: int = 2000
    r1: float = 2.0
    r0: float = 0.0005
    gamma: float = 0.005
    z_star: int = 5
    iterations: int = 30_000
    seed: int = 0

    def __post_init__(self):
        if min(self.r1, self.r0, self.gamma) < 0:
            raise ConfigurationError("Growth model rates must be nonnegative")
        if self.gamma > 1:
            raise ConfigurationError(f"gamma is a per-step probability, got {self.gamma}")
        if self.z_star < 1:
            raise ConfigurationError(f"z_star must be at least 1, got {self.z_star}")
        if self.num_nodes < 2:
            raise ConfigurationError("Growth model needs at least two nodes")

    def to_dict(self) -> Dict:
        return asdict(self)


def block_labels(block_sizes: List[int]) -> np.ndarray:
    return np.repeat(np.arange(len(block_sizes)), [int(s) for s in block_sizes]).astype(np.int64)


def generate_sbm(cfg: SbmConfig) -> Tuple[Graph, np.ndarray]:
    """
    Sample an SBM graph; every pair is an independent Bernoulli draw.

    Returns the graph and the block label of every node.
    """
    blocks = block_labels(cfg.block_sizes)
    n = len(blocks)
    rng = make_rng(cfg.seed, "sbm")
    rows, cols = np.triu_indices(n, k=1)
    same = blocks[rows] == blocks[cols]
    probs = np.where(same, cfg.p_in, cfg.p_out)
    hit = rng.random(len(rows)) < probs
    graph = Graph.from_pairs(n, np.column_stack([rows[hit], cols[hit]]))
    logger.info("Generated SBM with %d nodes and %d edges", n, graph.num_edges)
    return graph, blocks


def expected_count(rng: np.random.Generator, lam: float) -> int:
    """floor(lam) attempts plus one more with probability lam - floor(lam)."""
    base = int(np.floor(lam))
    return base + int(rng.random() < lam - base)


class GrowthState:
    """Mutable adjacency sets and creation times while the growth model runs."""

    def __init__(self, num_nodes: int):
        self.adj: List[Set[int]] = [set() for _ in range(num_nodes)]
        self.degree = np.zeros(num_nodes, dtype=np.int64)
        self.created: Dict[Tuple[int, int], int] = {}
        # (step, node, degree before the deletion)
        self.deletions: List[Tuple[int, int, int]] = []

    def add(self, u: int, v: int, step: int) -> bool:
        if u == v or v in self.adj[u]:
            return False
        self.adj[u].add(v)
        self.adj[v].add(u)
        self.degree[u] += 1
        self.degree[v] += 1
        self.created[(min(u, v), max(u, v))] = step
        return True

    def remove(self, u: int, v: int) -> None:
        self.adj[u].discard(v)
        self.adj[v].discard(u)
        self.degree[u] -= 1
        self.degree[v] -= 1
        del self.created[(min(u, v), max(u, v))]


def grow_jin(cfg: JinConfig) -> GrowthState:
    """
    Run the triangle-closing growth model and return its final state.

    Each iteration: (a) close triangles, (b) add uniform "meeting" edges,
    (c) let every node of degree >= z_star drop one uniformly chosen incident
    edge with probability gamma. Surviving edges carry the iteration of their
    latest creation.
    """
    n = cfg.num_nodes
    rng = make_rng(cfg.seed, "jin")
    state = GrowthState(n)
    max_meeting_draws = 100

    for step in range(cfg.iterations):
        # (a) triadic closure through a random middle node
        for _ in range(expected_count(rng, cfg.r1)):
            hubs = np.flatnonzero(state.degree >= 2)
            if len(hubs) == 0:
                break
            middle = int(hubs[rng.integers(len(hubs))])
            nbrs = sorted(state.adj[middle])
            i, j = rng.choice(len(nbrs), size=2, replace=False)
            state.add(nbrs[int(i)], nbrs[int(j)], step)

        # (b) uniform meeting of two non-adjacent nodes
        for _ in range(expected_count(rng, cfg.r0 * n)):
            for _ in range(max_meeting_draws):
                u, v = (int(x) for x in rng.integers(n, size=2))
                if state.add(u, v, step):
                    break

        # (c) degree-thresholded deletion
        if cfg.gamma > 0:
            eligible = np.flatnonzero(state.degree >= cfg.z_star)
            fires = eligible[rng.random(len(eligible)) < cfg.gamma]
            for node in fires.tolist():
                if state.degree[node] < cfg.z_star:
                    continue
                nbrs = sorted(state.adj[node])
                state.deletions.append((step, node, int(state.degree[node])))
                state.remove(node, nbrs[int(rng.integers(len(nbrs)))])

    return state


def generate_jin(cfg: JinConfig) -> EdgeList:
    """Timestamped edge list of a growth model run, in (timestamp, u, v) order."""
    n = cfg.num_nodes
    state = grow_jin(cfg)
    if not state.created:
        logger.info("Growth model produced no edges")
        return EdgeList.from_pairs(np.empty((0, 2), dtype=np.int64), timestamps=[])
    keys = np.array([u * n + v for (u, v) in state.created], dtype=np.int64)
    stamps = np.array(list(state.created.values()), dtype=np.int64)
    pairs = keys_to_pairs(keys, n)
    order = np.lexsort((pairs[:, 1], pairs[:, 0], stamps))
    logger.info("Growth model finished: %d edges after %d iterations", len(order), cfg.iterations)
    return EdgeList.from_pairs(pairs[order], timestamps=stamps[order])

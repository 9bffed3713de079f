"""
Train/validation/test edge splits and uniform negative sampling.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InfeasibleSamplingError, SplitError
from .graph import EdgeList, Graph, PairArray, canonical_pairs, keys_to_pairs, pair_keys, union_edges
from .seeding import make_rng

logger = logging.getLogger(__name__)

DEFAULT_FRACTIONS = (0.8, 0.1, 0.1)
SPLIT_KINDS = ("temporal", "random", "sbm")
EXACT_ENUMERATION_MAX_NODES = 2000
REJECTION_BUDGET_FACTOR = 100

SeedLike = Union[int, np.random.Generator]

_SET_NAMES = ("train_pos", "valid_pos", "test_pos", "valid_neg", "test_neg")


@dataclass(frozen=True, eq=False)
class EdgeSplit:
    """Positive and negative edges for training, validation and testing."""

    num_nodes: int
    train_pos: PairArray
    valid_pos: PairArray
    test_pos: PairArray
    valid_neg: PairArray
    test_neg: PairArray
    split_kind: str
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.split_kind not in SPLIT_KINDS:
            raise SplitError(f"Unknown split kind: {self.split_kind}")
        for name in _SET_NAMES:
            object.__setattr__(self, name, canonical_pairs(getattr(self, name)))
        self.validate()

    def validate(self) -> None:
        """Pairwise disjoint sets, no duplicates, negatives sized like positives."""
        n = self.num_nodes
        seen: Dict[int, str] = {}
        for name in _SET_NAMES:
            pairs = getattr(self, name)
            if len(pairs) and (pairs.min() < 0 or pairs.max() >= n or (pairs[:, 0] == pairs[:, 1]).any()):
                raise SplitError(f"{name} holds a self-loop or an endpoint outside [0, {n})")
            keys = pair_keys(pairs, n)
            if len(np.unique(keys)) != len(keys):
                raise SplitError(f"{name} contains duplicate edges")
            for key in keys.tolist():
                if key in seen:
                    u, v = keys_to_pairs(np.array([key]), n)[0]
                    raise SplitError(f"Edge ({u}, {v}) appears in both {seen[key]} and {name}")
                seen[key] = name
        if len(self.valid_neg) != len(self.valid_pos):
            raise SplitError(f"{len(self.valid_neg)} negative vs {len(self.valid_pos)} positive validation edges")
        if len(self.test_neg) != len(self.test_pos):
            raise SplitError(f"{len(self.test_neg)} negative vs {len(self.test_pos)} positive test edges")

    def train_graph(self) -> Graph:
        return Graph.from_pairs(self.num_nodes, self.train_pos)

    @property
    def kbar(self) -> int:
        """Number of positive validation and test edges."""
        return len(self.valid_pos) + len(self.test_pos)

    @property
    def num_positive(self) -> int:
        return len(self.train_pos) + self.kbar

    def eval_edges(self, which: str) -> Tuple[PairArray, PairArray]:
        if which == "valid":
            return self.valid_pos, self.valid_neg
        if which == "test":
            return self.test_pos, self.test_neg
        raise SplitError(f"Unknown evaluation set: {which}")

    def sizes(self) -> Dict[str, int]:
        return {name: len(getattr(self, name)) for name in _SET_NAMES}


def _check_fractions(fractions: Sequence[float]) -> Tuple[float, float, float]:
    if len(fractions) != 3 or min(fractions) < 0 or not math.isclose(sum(fractions), 1.0, abs_tol=1e-9):
        raise SplitError(f"Split fractions must be three nonnegative numbers summing to 1, got {fractions}")
    return float(fractions[0]), float(fractions[1]), float(fractions[2])


def split_sizes(m: int, fractions: Sequence[float]) -> Tuple[int, int, int]:
    """Floor the evaluation sizes; the remainder goes to train."""
    _, f_valid, f_test = _check_fractions(fractions)
    n_valid = int(math.floor(f_valid * m + 1e-9))
    n_test = int(math.floor(f_test * m + 1e-9))
    return m - n_valid - n_test, n_valid, n_test


def _unique_rows(edges: EdgeList, order: np.ndarray, num_nodes: int) -> np.ndarray:
    """Row indices (in `order`) of the first occurrence of each undirected edge."""
    pairs = edges.pairs()
    loops = pairs[:, 0] == pairs[:, 1]
    if loops.any():
        logger.warning("Dropping %d self-loop row(s) before splitting", int(loops.sum()))
    order = order[~loops[order]]
    keys = pair_keys(pairs[order], num_nodes)
    _, first = np.unique(keys, return_index=True)
    if len(first) < len(order):
        logger.warning("Collapsed %d repeated edge row(s) before splitting", len(order) - len(first))
    return order[np.sort(first)]


def sample_negatives(g: Graph, forbidden: Sequence[PairArray], count: int, seed: SeedLike) -> PairArray:
    """
    Draw `count` distinct node pairs uniformly from pairs outside E and `forbidden`.

    Rejection sampling against a hash set, with a budget of 100 draws per
    requested pair; small graphs fall back to sampling the explicit complement.
    """
    n = g.num_nodes
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed, "negatives")
    blocked = g.edge_keys()
    for pairs in forbidden:
        if len(pairs):
            blocked = np.union1d(blocked, pair_keys(pairs, n))
    available = n * (n - 1) // 2 - len(blocked)
    if count < 0:
        raise InfeasibleSamplingError("Negative sample count must be nonnegative", count, available)
    if count > available:
        raise InfeasibleSamplingError("Not enough non-edges to sample negatives", count, available)
    if count == 0:
        return np.empty((0, 2), dtype=np.int64)

    blocked_set = set(blocked.tolist())
    drawn: List[int] = []
    drawn_set = set()
    budget = REJECTION_BUDGET_FACTOR * count
    dense = available < 2 * count
    draws = 0
    while not dense and len(drawn) < count and draws < budget:
        batch = rng.integers(n, size=(min(2 * (count - len(drawn)) + 16, budget - draws), 2))
        for u, v in batch.tolist():
            draws += 1
            if u == v:
                continue
            key = min(u, v) * n + max(u, v)
            if key in blocked_set or key in drawn_set:
                continue
            drawn.append(key)
            drawn_set.add(key)
            if len(drawn) == count:
                break

    remaining = count - len(drawn)
    if remaining:
        if n > EXACT_ENUMERATION_MAX_NODES:
            raise InfeasibleSamplingError("Rejection sampling budget exhausted", count, available)
        logger.warning("Sampling %d negative pair(s) from the explicit complement", remaining)
        rows, cols = np.triu_indices(n, k=1)
        keys = rows.astype(np.int64) * n + cols
        taken = np.union1d(blocked, np.array(drawn, dtype=np.int64))
        pool = keys[~np.isin(keys, taken, assume_unique=True)]
        drawn.extend(rng.choice(pool, size=remaining, replace=False).tolist())
    return keys_to_pairs(np.array(drawn, dtype=np.int64), n)


def _with_negatives(num_nodes: int, train: PairArray, valid: PairArray, test: PairArray,
                    kind: str, seed: int, meta: Dict[str, Any]) -> EdgeSplit:
    g_train = Graph.from_pairs(num_nodes, train)
    valid_neg = sample_negatives(g_train, [valid, test], len(valid), make_rng(seed, "valid_neg"))
    test_neg = sample_negatives(g_train, [valid, test, valid_neg], len(test), make_rng(seed, "test_neg"))
    return EdgeSplit(num_nodes, train, valid, test, valid_neg, test_neg, kind, meta)


def temporal_split(edges: EdgeList, num_nodes: int, fractions: Sequence[float] = DEFAULT_FRACTIONS,
                   seed: int = 0) -> EdgeSplit:
    """Earliest edges train, the next slice validates, the latest test."""
    if not edges.has_timestamps:
        raise SplitError("Temporal split requires timestamped edges")
    _check_fractions(fractions)
    order = np.argsort(edges.timestamps, kind="stable")
    rows = _unique_rows(edges, order, num_nodes)
    pairs = canonical_pairs(edges.pairs()[rows])
    n_train, n_valid, _ = split_sizes(len(pairs), fractions)
    meta = {"fractions": list(fractions), "seed": int(seed)}
    return _with_negatives(num_nodes, pairs[:n_train], pairs[n_train:n_train + n_valid],
                           pairs[n_train + n_valid:], "temporal", seed, meta)


def random_split(edges: EdgeList, num_nodes: int, fractions: Sequence[float] = DEFAULT_FRACTIONS,
                 seed: int = 0) -> EdgeSplit:
    """Uniform shuffle under `seed`, then the same partition as the temporal split."""
    _check_fractions(fractions)
    rows = _unique_rows(edges, np.arange(len(edges)), num_nodes)
    pairs = canonical_pairs(edges.pairs()[rows])
    pairs = pairs[make_rng(seed, "random_split").permutation(len(pairs))] if len(pairs) else pairs
    n_train, n_valid, _ = split_sizes(len(pairs), fractions)
    meta = {"fractions": list(fractions), "seed": int(seed)}
    return _with_negatives(num_nodes, pairs[:n_train], pairs[n_train:n_train + n_valid],
                           pairs[n_train + n_valid:], "random", seed, meta)


def sbm_eval_edges(g: Graph, blocks: np.ndarray, seed: int, fractions: Sequence[float] = DEFAULT_FRACTIONS,
                   counts: Optional[Tuple[int, int]] = None) -> EdgeSplit:
    """
    Evaluation edges for a sampled block-model graph.

    The whole sampled graph trains. Positives are absent within-block pairs,
    negatives absent between-block pairs, both drawn uniformly. By default
    the absent pairs play the role of the 80% share, so validation and test
    each get floor(|absent| * f / f_train) positives and as many negatives.
    """
    blocks = np.asarray(blocks)
    n = g.num_nodes
    if len(blocks) != n:
        raise SplitError(f"{len(blocks)} block labels for a graph with {n} nodes")
    if counts is None:
        f_train, f_valid, f_test = _check_fractions(fractions)
        num_absent = n * (n - 1) // 2 - g.num_edges
        counts = (int(math.floor(num_absent * f_valid / f_train + 1e-9)),
                  int(math.floor(num_absent * f_test / f_train + 1e-9)))
    n_valid, n_test = (int(c) for c in counts)
    need = n_valid + n_test

    rows, cols = np.triu_indices(n, k=1)
    keys = rows.astype(np.int64) * n + cols
    absent = ~np.isin(keys, g.edge_keys(), assume_unique=True)
    same = blocks[rows] == blocks[cols]
    within = keys[same & absent]
    between = keys[~same & absent]
    if len(within) < need:
        raise InfeasibleSamplingError("Not enough absent within-block pairs for positives", need, len(within))
    if len(between) < need:
        raise InfeasibleSamplingError("Not enough absent between-block pairs for negatives", need, len(between))

    rng = make_rng(seed, "sbm_eval")
    pos = keys_to_pairs(rng.choice(within, size=need, replace=False), n) if need else np.empty((0, 2), np.int64)
    neg = keys_to_pairs(rng.choice(between, size=need, replace=False), n) if need else np.empty((0, 2), np.int64)
    meta = {"fractions": list(fractions), "seed": int(seed), "counts": [n_valid, n_test]}
    return EdgeSplit(n, g.edges(), pos[:n_valid], pos[n_valid:], neg[:n_valid], neg[n_valid:], "sbm", meta)


def inference_graph(g_train: Graph, split: EdgeSplit, include_valid: bool) -> Graph:
    """Graph used to score test edges; optionally adds the positive validation edges."""
    if not include_valid or len(split.valid_pos) == 0:
        return g_train
    return union_edges(g_train, split.valid_pos)

"""
Proposal sets: candidate edges added to a graph before link prediction.

A proposal set is built by enumerating a starting set (all non-edges with at
least one common neighbor), scoring it with a filtering model and keeping
the top k. Entries are ordered by score descending, ties broken by (u, v)
ascending, so a proposal of size k1 is always a prefix of one of size k2 >= k1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .config import DEFAULT_STARTING_SET_CAP
from .errors import EdgeProposalError
from .graph import Graph, PairArray, as_pairs, canonical_pairs, keys_to_pairs, pair_keys
from .models.base import BaseScorer
from .models.service import batch_score

logger = logging.getLogger(__name__)

LARGE_GRID_STEP = 10_000
LARGE_GRID_SPAN = 2
SMALL_GRID_STEP = 1_000
SMALL_GRID_SPAN = 3


def ranking_order(pairs: np.ndarray, scores: np.ndarray) -> np.ndarray:
    """Indices sorting by score descending, then u, then v ascending."""
    return np.lexsort((pairs[:, 1], pairs[:, 0], -scores))


@dataclass(frozen=True, eq=False)
class ProposalSet:
    """Ordered candidate edges with their filtering scores."""

    pairs: PairArray
    scores: np.ndarray
    provenance: Dict[str, Any] = field(default_factory=dict)
    target_size_hint: Optional[int] = None

    def __post_init__(self):
        pairs = as_pairs(self.pairs)
        scores = np.asarray(self.scores, dtype=np.float64).reshape(-1)
        if len(pairs) != len(scores):
            raise EdgeProposalError(f"{len(pairs)} proposal pairs but {len(scores)} scores")
        if len(pairs):
            if (pairs[:, 0] >= pairs[:, 1]).any():
                raise EdgeProposalError("Proposal pairs must be canonical (u < v) and free of self-loops")
            keys = pairs[:, 0] * (int(pairs.max()) + 1) + pairs[:, 1]
            if len(np.unique(keys)) != len(keys):
                raise EdgeProposalError("Proposal set contains duplicate pairs")
            if not np.array_equal(ranking_order(pairs, scores), np.arange(len(pairs))):
                raise EdgeProposalError("Proposal entries must be sorted by (score desc, u, v)")
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "scores", scores)

    @classmethod
    def empty(cls, provenance: Optional[Dict[str, Any]] = None) -> "ProposalSet":
        return cls(np.empty((0, 2), dtype=np.int64), np.empty(0), dict(provenance or {}))

    @classmethod
    def from_unsorted(cls, pairs, scores, provenance: Optional[Dict[str, Any]] = None,
                      target_size_hint: Optional[int] = None) -> "ProposalSet":
        """Canonicalize and sort arbitrary (pair, score) rows, e.g. from a file."""
        arr = canonical_pairs(pairs)
        sc = np.asarray(scores, dtype=np.float64).reshape(-1)
        order = ranking_order(arr, sc) if len(arr) else np.empty(0, dtype=np.int64)
        return cls(arr[order], sc[order], dict(provenance or {}), target_size_hint)

    def __len__(self) -> int:
        return len(self.pairs)

    def head(self, k: int) -> "ProposalSet":
        if k < 0 or k > len(self):
            raise EdgeProposalError(f"Cannot take {k} entries from a proposal set of size {len(self)}")
        return ProposalSet(self.pairs[:k], self.scores[:k], {**self.provenance, "k": k}, self.target_size_hint)

    def keys(self, num_nodes: int) -> np.ndarray:
        return pair_keys(self.pairs, num_nodes)


def check_disjoint(p: ProposalSet, g: Graph) -> None:
    """Proposal entries must never be edges of the training graph."""
    if len(p) == 0:
        return
    if p.pairs.max() >= g.num_nodes:
        raise EdgeProposalError(f"Proposal endpoint outside [0, {g.num_nodes})")
    overlap = np.isin(p.keys(g.num_nodes), g.edge_keys())
    if overlap.any():
        u, v = p.pairs[int(np.flatnonzero(overlap)[0])]
        raise EdgeProposalError(f"Proposal entry ({u}, {v}) is already an edge of the training graph")


def enumerate_starting_set(g: Graph, cap: int = DEFAULT_STARTING_SET_CAP) -> PairArray:
    """All non-edges (u < v) sharing at least one neighbor, in lexicographic order."""
    adj = g.adjacency
    two_hop = sp.triu(adj @ adj, k=1, format="coo")
    if two_hop.nnz > cap:
        raise EdgeProposalError(f"Starting set has {two_hop.nnz} two-hop pairs, above the cap of {cap}")
    keys = np.sort(two_hop.row.astype(np.int64) * g.num_nodes + two_hop.col.astype(np.int64))
    keys = keys[~np.isin(keys, g.edge_keys(), assume_unique=True)]
    logger.info("Starting set: %d candidate pairs", len(keys))
    return keys_to_pairs(keys, g.num_nodes)


def top_k_indices(pairs: np.ndarray, scores: np.ndarray, k: int) -> np.ndarray:
    """
    Indices of the k best entries in ranking order.

    Uses partial selection around the k-th largest score; entries tied at
    that score are admitted in (u, v) order, which is what a full sort gives.
    """
    n = len(scores)
    if k <= 0:
        return np.empty(0, dtype=np.int64)
    if k >= n:
        return ranking_order(pairs, scores)
    kth = np.partition(scores, n - k)[n - k]
    above = np.flatnonzero(scores > kth)
    tied = np.flatnonzero(scores == kth)
    tied = tied[np.lexsort((pairs[tied, 1], pairs[tied, 0]))][:k - len(above)]
    chosen = np.concatenate([above, tied])
    return chosen[ranking_order(pairs[chosen], scores[chosen])]


def filter_top_k(g: Graph, start: Sequence, sc: BaseScorer, k: int, n_jobs: int = 1) -> ProposalSet:
    """Keep the k starting-set pairs with the largest filtering scores."""
    pairs = canonical_pairs(start)
    if k > len(pairs):
        logger.warning("Target size %d exceeds the starting set (%d); clamping", k, len(pairs))
        k = len(pairs)
    if k < 0:
        raise EdgeProposalError(f"Target size must be nonnegative, got {k}")
    provenance = {"filter": sc.describe(), "k": int(k)}
    if k == 0:
        return ProposalSet.empty(provenance)
    scores = batch_score(sc, g, pairs, n_jobs=n_jobs)
    chosen = top_k_indices(pairs, scores, k)
    proposal = ProposalSet(pairs[chosen], scores[chosen], provenance)
    check_disjoint(proposal, g)
    return proposal


def _scores_above(top: float, count: int) -> np.ndarray:
    """`count` strictly decreasing floats, all strictly above `top`."""
    scores = np.empty(count, dtype=np.float64)
    current = np.float64(top)
    for i in range(count - 1, -1, -1):
        current = np.nextafter(current, np.inf)
        scores[i] = current
    return scores


def force_include(p: ProposalSet, must: Sequence, k: int, must_scores: Optional[np.ndarray] = None,
                  graph: Optional[Graph] = None) -> ProposalSet:
    """
    Put `must` edges at the top of a size-k proposal set.

    Must-edges count against k. They are scored strictly above every
    candidate, in order of their original score (`must_scores`, falling back
    to their score in `p`); the remaining slots go to the best candidates.
    """
    must_pairs = canonical_pairs(must)
    if len(must_pairs) == 0:
        return p.head(min(k, len(p)))
    num_nodes = int(max(must_pairs.max(), p.pairs.max() if len(p) else 0)) + 1
    if graph is not None:
        num_nodes = graph.num_nodes
        if np.isin(pair_keys(must_pairs, num_nodes), graph.edge_keys()).any():
            raise EdgeProposalError("Forced proposal edges must not be edges of the training graph")

    must_keys, first = np.unique(pair_keys(must_pairs, num_nodes), return_index=True)
    must_pairs = must_pairs[np.sort(first)]
    if must_scores is None:
        lookup = dict(zip(p.keys(num_nodes).tolist(), p.scores.tolist()))
        original = np.array([lookup.get(key, -np.inf) for key in pair_keys(must_pairs, num_nodes).tolist()])
    else:
        original = np.asarray(must_scores, dtype=np.float64)[np.sort(first)]
    order = ranking_order(must_pairs, original)
    must_pairs = must_pairs[order]
    if len(must_pairs) > k:
        logger.warning("%d forced edges exceed the target size %d; keeping the top %d",
                       len(must_pairs), k, k)
        must_pairs = must_pairs[:k]

    candidate_mask = ~np.isin(p.keys(num_nodes), must_keys)
    candidates = p.pairs[candidate_mask]
    candidate_scores = p.scores[candidate_mask]
    top = float(p.scores.max()) if len(p) else 0.0
    forced_scores = _scores_above(top, len(must_pairs))
    fill = max(k - len(must_pairs), 0)

    provenance = {**p.provenance, "k": int(k), "forced": int(len(must_pairs))}
    return ProposalSet(
        np.concatenate([must_pairs, candidates[:fill]]),
        np.concatenate([forced_scores, candidate_scores[:fill]]),
        provenance,
        p.target_size_hint,
    )


@dataclass(frozen=True)
class TargetSizeGrid:
    """Candidate target sizes k around k̄ = |valid_pos| + |test_pos|."""

    kbar: int
    offsets: List[int]
    resolved: List[int]

    @classmethod
    def from_sizes(cls, kbar: int, sizes: Sequence[int], start_size: int) -> "TargetSizeGrid":
        sizes = [int(s) for s in sizes]
        if not sizes:
            raise EdgeProposalError("Target size grid needs at least one size")
        resolved = sorted({min(max(s, 0), start_size) for s in sizes})
        return cls(kbar=int(kbar), offsets=[s - int(kbar) for s in sizes], resolved=resolved)

    def __iter__(self):
        return iter(self.resolved)

    def __len__(self) -> int:
        return len(self.resolved)


def target_size_grid(kbar: int, scale: str, start_size: int) -> TargetSizeGrid:
    """k̄ ± 20000 in steps of 10000 (large) or k̄ ± 3000 in steps of 1000 (small)."""
    if kbar < 0:
        raise EdgeProposalError(f"kbar must be nonnegative, got {kbar}")
    if scale == "large":
        step, span = LARGE_GRID_STEP, LARGE_GRID_SPAN
    elif scale == "small":
        step, span = SMALL_GRID_STEP, SMALL_GRID_SPAN
    else:
        raise EdgeProposalError(f"Unknown grid scale: {scale}. Choose 'large' or 'small'")
    offsets = [i * step for i in range(-span, span + 1)]
    resolved = sorted({min(max(kbar + off, 0), start_size) for off in offsets})
    return TargetSizeGrid(kbar=int(kbar), offsets=offsets, resolved=resolved)

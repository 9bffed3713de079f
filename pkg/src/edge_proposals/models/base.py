"""
Base classes and utilities for link scoring models.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Sequence, Tuple

import numpy as np

from ..errors import EdgeProposalError
from ..graph import Graph, as_pairs


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """Per-node real feature vectors, one row per node."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2:
            raise EdgeProposalError(f"Feature matrix must be 2-D, got shape {rows.shape}")
        if not np.isfinite(rows).all():
            raise EdgeProposalError("Feature matrix contains non-finite entries")
        object.__setattr__(self, "rows", rows)

    @property
    def num_nodes(self) -> int:
        return int(self.rows.shape[0])

    @property
    def dim(self) -> int:
        return int(self.rows.shape[1])


class BaseScorer(ABC):
    """Abstract base class for pairwise link scorers s(u, v)."""

    kind: str = ""

    def __init__(self, name: str):
        self.name = name

    def check_inputs(self, g: Graph, pairs: np.ndarray) -> None:
        if len(pairs) == 0:
            return
        if pairs.min() < 0 or pairs.max() >= g.num_nodes:
            raise EdgeProposalError(f"Pair endpoint outside [0, {g.num_nodes}) for scorer {self.name}")

    @abstractmethod
    def score_pairs(self, g: Graph, pairs: np.ndarray) -> np.ndarray:
        """Score a batch of (m, 2) pairs; returns float64 scores in input order."""
        pass

    def score(self, g: Graph, u: int, v: int) -> float:
        return float(self.batch_score(g, [(u, v)])[0])

    def batch_score(self, g: Graph, pairs: Sequence[Tuple[int, int]]) -> np.ndarray:
        arr = as_pairs(pairs)
        self.check_inputs(g, arr)
        if len(arr) == 0:
            return np.empty(0, dtype=np.float64)
        return self.score_pairs(g, arr)

    def describe(self) -> Dict[str, Any]:
        """Provenance snapshot recorded alongside proposal sets and results."""
        return {"kind": self.kind}


class RankingMetrics:
    """Ranking metrics for link prediction evaluation."""

    @staticmethod
    def hits_at_k(pos_scores: np.ndarray, neg_scores: np.ndarray, k: int) -> float:
        """
        Fraction of positive scores strictly above the K-th highest negative score.

        Fewer than K negatives means every positive counts as a hit.
        """
        pos = np.asarray(pos_scores, dtype=np.float64)
        neg = np.asarray(neg_scores, dtype=np.float64)
        if len(pos) == 0:
            raise EdgeProposalError("Hits@K needs at least one positive score")
        if k < 1:
            raise EdgeProposalError(f"K must be positive, got {k}")
        if len(neg) < k:
            return 1.0
        threshold = np.partition(neg, len(neg) - k)[len(neg) - k]
        return float(np.count_nonzero(pos > threshold)) / len(pos)

    @staticmethod
    def aggregate(values: Sequence[float]) -> Dict[str, Any]:
        """Mean and population std over trials."""
        arr = np.asarray(values, dtype=np.float64)
        if len(arr) == 0:
            return {"mean": None, "std": None, "count": 0}
        return {"mean": float(arr.mean()), "std": float(arr.std()), "count": int(len(arr))}

"""
Neighborhood heuristics: Common Neighbors, Adamic-Adar, cos-common.

All three are training-free, symmetric in (u, v) and score a batch of pairs
through sparse row products of the adjacency matrix, so one pair's score
never depends on the other pairs in its batch.
"""

from __future__ import annotations

import logging
from typing import Any, Dict, Optional

import numpy as np
import scipy.sparse as sp
from sklearn.preprocessing import normalize

from ..errors import EdgeProposalError
from ..graph import Graph
from .base import BaseScorer, FeatureMatrix

logger = logging.getLogger(__name__)


def _common_neighbor_rows(g: Graph, pairs: np.ndarray) -> sp.csr_matrix:
    """Row i holds a 1 at every common neighbor x of pairs[i]."""
    adj = g.adjacency
    return adj[pairs[:, 0]].multiply(adj[pairs[:, 1]]).tocsr()


class CommonNeighborsScorer(BaseScorer):
    """
    Common Neighbors: Number of common neighbors.

    Score(u,v) = |N(u) ∩ N(v)|
    """

    kind = "common-neighbors"

    def __init__(self):
        super().__init__("Common")

    def score_pairs(self, g: Graph, pairs: np.ndarray) -> np.ndarray:
        shared = _common_neighbor_rows(g, pairs)
        return np.asarray(shared.sum(axis=1), dtype=np.float64).ravel()


class AdamicAdarScorer(BaseScorer):
    """
    Adamic-Adar Index: Weighted common neighbors.

    Score(u,v) = Σ(x∈N(u)∩N(v)) 1/ln(|N(x)|)

    Natural log, as networkx and the OGB heuristics use.
    """

    kind = "adamic-adar"

    def __init__(self):
        super().__init__("Adamic-Adar")

    def score_pairs(self, g: Graph, pairs: np.ndarray) -> np.ndarray:
        degrees = g.degrees()
        shared = _common_neighbor_rows(g, pairs)
        # a common neighbor of two distinct nodes has degree >= 2, so ln(deg) > 0
        if shared.nnz and degrees[shared.indices].min() < 2:
            raise EdgeProposalError("Common neighbor with degree < 2; adjacency is not a simple graph")
        weights = np.zeros(g.num_nodes, dtype=np.float64)
        hubs = degrees >= 2
        weights[hubs] = 1.0 / np.log(degrees[hubs])
        return np.asarray(shared @ weights, dtype=np.float64).ravel()


class CosCommonScorer(BaseScorer):
    """
    Cosine Similarity Common Neighbor score.

    Score(u,v) = Σ(x∈N(u)∩N(v)) cos(h_u, h_x) · cos(h_x, h_v)

    A zero feature row has cosine 0 with everything.
    """

    kind = "cos-common"

    def __init__(self, features: Optional[FeatureMatrix]):
        super().__init__("Cos-Common")
        if features is None:
            raise EdgeProposalError("cos-common scorer requires a feature matrix")
        self.features = features
        self._unit_rows = normalize(features.rows, norm="l2", axis=1)

    def check_inputs(self, g: Graph, pairs: np.ndarray) -> None:
        if self.features.num_nodes != g.num_nodes:
            raise EdgeProposalError(
                f"Feature matrix has {self.features.num_nodes} rows but the graph has {g.num_nodes} nodes"
            )
        super().check_inputs(g, pairs)

    def score_pairs(self, g: Graph, pairs: np.ndarray) -> np.ndarray:
        shared = _common_neighbor_rows(g, pairs).tocoo()
        h = self._unit_rows
        x = shared.col
        cos_ux = np.einsum("ij,ij->i", h[pairs[shared.row, 0]], h[x])
        cos_xv = np.einsum("ij,ij->i", h[x], h[pairs[shared.row, 1]])
        return np.bincount(shared.row, weights=cos_ux * cos_xv, minlength=len(pairs)).astype(np.float64)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "feature_dim": self.features.dim}

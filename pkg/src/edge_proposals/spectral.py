"""
Laplacian numerics: spectral node features and commute times.

Uses a dense symmetric eigendecomposition of the combinatorial Laplacian
L = D - A, which costs O(n^3) time and O(n^2) memory; fine up to a few
thousand nodes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
import pandas as pd
import scipy.linalg
from scipy.sparse.csgraph import connected_components, laplacian

from .errors import EdgeProposalError
from .graph import Graph, as_pairs, augment
from .models.base import FeatureMatrix
from .proposal import ProposalSet, check_disjoint
from .splits import EdgeSplit

logger = logging.getLogger(__name__)

SIGN_TOL = 1e-12


def _dense_laplacian(g: Graph) -> np.ndarray:
    return np.asarray(laplacian(g.adjacency).toarray(), dtype=np.float64)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its first entry with |x| > tol is positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        nonzero = np.flatnonzero(np.abs(out[:, j]) > SIGN_TOL)
        if len(nonzero) and out[nonzero[0], j] < 0:
            out[:, j] = -out[:, j]
    return out


@dataclass(frozen=True, eq=False)
class LaplacianFactor:
    """Eigendecomposition of a graph Laplacian plus its component labels."""

    num_nodes: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    component_ids: np.ndarray
    num_components: int

    @cached_property
    def pseudoinverse(self) -> np.ndarray:
        """Moore-Penrose pseudoinverse M, built from the nonzero eigenpairs."""
        c = self.num_components
        vecs = self.eigenvectors[:, c:]
        return (vecs / self.eigenvalues[c:]) @ vecs.T

    @cached_property
    def laplacian_matrix(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T

    def same_component(self, u: int, v: int) -> bool:
        return bool(self.component_ids[u] == self.component_ids[v])


def factorize(g: Graph) -> LaplacianFactor:
    n = g.num_nodes
    num_components, labels = connected_components(g.adjacency, directed=False)
    eigenvalues, eigenvectors = scipy.linalg.eigh(_dense_laplacian(g))
    # the nullspace dimension of L is exactly the component count
    eigenvalues = eigenvalues.copy()
    zero_tol = 1e-8 * max(n, 1)
    if num_components and np.abs(eigenvalues[:num_components]).max() > zero_tol:
        logger.warning("Laplacian null eigenvalues exceed tolerance %.2e", zero_tol)
    eigenvalues[:num_components] = 0.0
    if num_components < n and eigenvalues[num_components] <= zero_tol:
        logger.warning("Smallest nonzero Laplacian eigenvalue %.3e is within tolerance of zero",
                       eigenvalues[num_components])
    return LaplacianFactor(
        num_nodes=n,
        eigenvalues=eigenvalues,
        eigenvectors=_fix_signs(eigenvectors),
        component_ids=labels.astype(np.int64),
        num_components=int(num_components),
    )


def spectral_embedding(g: Graph, dim: int) -> FeatureMatrix:
    """Eigenvectors of the `dim` smallest Laplacian eigenvalues, ascending."""
    n = g.num_nodes
    if dim < 1 or dim > n:
        raise EdgeProposalError(f"Embedding dimension {dim} outside [1, {n}]")
    _, vectors = scipy.linalg.eigh(_dense_laplacian(g), subset_by_index=[0, dim - 1])
    logger.info("Spectral embedding: %d nodes, %d dimensions", n, dim)
    return FeatureMatrix(_fix_signs(vectors))


def effective_resistance(f: LaplacianFactor, u: int, v: int) -> float:
    """M_uu + M_vv - 2 M_uv; infinite across components."""
    if u == v:
        return 0.0
    if not f.same_component(u, v):
        return math.inf
    m = f.pseudoinverse
    return float(m[u, u] + m[v, v] - 2.0 * m[u, v])


def commute_time(f: LaplacianFactor, m: int, u: int, v: int) -> float:
    """Expected round trip u -> v -> u of a random walk: 2m (M_uu + M_vv - 2 M_uv)."""
    resistance = effective_resistance(f, u, v)
    return resistance if math.isinf(resistance) else 2.0 * m * resistance


def pair_commute_times(f: LaplacianFactor, m: int, pairs: np.ndarray) -> np.ndarray:
    """Vectorized commute times; assumes every pair lies within one component."""
    pairs = as_pairs(pairs)
    mat = f.pseudoinverse
    u, v = pairs[:, 0], pairs[:, 1]
    return 2.0 * m * (mat[u, u] + mat[v, v] - 2.0 * mat[u, v])


def commute_change_curve(g: Graph, split: EdgeSplit, p: ProposalSet, sizes: Sequence[int]) -> pd.DataFrame:
    """
    Percentage change in mean commute time of test positive and negative pairs
    as the top-k proposal edges are added, relative to k = 0.

    Pairs split across components of the unaugmented graph are excluded for
    every size (augmentation only merges components).
    """
    sizes = [int(s) for s in sizes]
    if any(s < 0 or s > len(p) for s in sizes):
        raise EdgeProposalError(f"Curve sizes must lie in [0, {len(p)}], got {sizes}")
    check_disjoint(p, g)

    base = factorize(g)
    pos, neg = split.test_pos, split.test_neg
    pos_keep = base.component_ids[pos[:, 0]] == base.component_ids[pos[:, 1]]
    neg_keep = base.component_ids[neg[:, 0]] == base.component_ids[neg[:, 1]]
    if not pos_keep.any() or not neg_keep.any():
        raise EdgeProposalError("Every positive or every negative test pair spans two components")
    excluded = int((~pos_keep).sum() + (~neg_keep).sum())
    if excluded:
        logger.warning("Excluding %d cross-component test pair(s) from commute averages", excluded)
    pos, neg = pos[pos_keep], neg[neg_keep]

    base_pos = pair_commute_times(base, g.num_edges, pos).mean()
    base_neg = pair_commute_times(base, g.num_edges, neg).mean()
    rows = []
    for size in sizes:
        if size == 0:
            rows.append({"size": 0, "pct_pos": 0.0, "pct_neg": 0.0, "excluded_pairs": excluded})
            continue
        g_k = augment(g, p, size)
        f_k = factorize(g_k)
        avg_pos = pair_commute_times(f_k, g_k.num_edges, pos).mean()
        avg_neg = pair_commute_times(f_k, g_k.num_edges, neg).mean()
        rows.append({
            "size": size,
            "pct_pos": float(100.0 * (avg_pos - base_pos) / base_pos),
            "pct_neg": float(100.0 * (avg_neg - base_neg) / base_neg),
            "excluded_pairs": excluded,
        })
    return pd.DataFrame(rows, columns=["size", "pct_pos", "pct_neg", "excluded_pairs"])

"""
Immutable undirected simple graphs in compressed sparse row form.

Every undirected edge (u, v) is stored twice in the adjacency (row u and row
v). Neighbor lists are the CSR column slices and are kept sorted ascending.
Node ids are dense 0-based integers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
import scipy.sparse as sp

from .errors import EdgeProposalError, GraphValidationError

if TYPE_CHECKING:
    from .proposal import ProposalSet

logger = logging.getLogger(__name__)

PairArray = np.ndarray  # shape (m, 2), int64


def as_pairs(pairs: Union[Sequence[Tuple[int, int]], np.ndarray]) -> PairArray:
    """Coerce a sequence of node pairs to an (m, 2) int64 array."""
    arr = np.asarray(pairs, dtype=np.int64)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise EdgeProposalError(f"Expected an (m, 2) array of node pairs, got shape {arr.shape}")
    return arr


def canonical_pairs(pairs: Union[Sequence[Tuple[int, int]], np.ndarray]) -> PairArray:
    """Order every pair as (min, max)."""
    arr = as_pairs(pairs)
    return np.column_stack([arr.min(axis=1), arr.max(axis=1)]) if len(arr) else arr


def pair_keys(pairs: Union[Sequence[Tuple[int, int]], np.ndarray], num_nodes: int) -> np.ndarray:
    """Scalar key per unordered pair; equal keys mean the same undirected pair."""
    arr = canonical_pairs(pairs)
    return arr[:, 0] * np.int64(num_nodes) + arr[:, 1]


def keys_to_pairs(keys: np.ndarray, num_nodes: int) -> PairArray:
    keys = np.asarray(keys, dtype=np.int64)
    return np.column_stack([keys // num_nodes, keys % num_nodes]).astype(np.int64)


@dataclass(frozen=True, eq=False)
class EdgeList:
    """Raw edge rows as ingested; may still hold self-loops or repeats."""

    src: np.ndarray
    dst: np.ndarray
    timestamps: Optional[np.ndarray] = None

    def __post_init__(self):
        if len(self.src) != len(self.dst):
            raise GraphValidationError("EdgeList src and dst must have the same length")
        if self.timestamps is not None and len(self.timestamps) != len(self.src):
            raise GraphValidationError("EdgeList timestamps must align with the edge rows")

    @classmethod
    def from_pairs(cls, pairs, timestamps: Optional[Iterable[int]] = None) -> "EdgeList":
        arr = as_pairs(pairs)
        ts = None if timestamps is None else np.asarray(list(timestamps), dtype=np.int64)
        return cls(src=arr[:, 0].copy(), dst=arr[:, 1].copy(), timestamps=ts)

    @property
    def has_timestamps(self) -> bool:
        return self.timestamps is not None

    def pairs(self) -> PairArray:
        return np.column_stack([self.src, self.dst]).astype(np.int64)

    def __len__(self) -> int:
        return len(self.src)


@dataclass(frozen=True)
class GraphBuildReport:
    self_loops: int
    duplicates: int


class Graph:
    """Undirected simple graph backed by a symmetric CSR adjacency matrix."""

    __slots__ = ("_adj", "_num_edges")

    def __init__(self, adjacency: sp.csr_matrix):
        adj = sp.csr_matrix(adjacency, dtype=np.float64, copy=True)
        adj.sum_duplicates()
        adj.eliminate_zeros()
        adj.data[:] = 1.0
        adj.sort_indices()
        self._adj = adj
        self._num_edges = int(adj.nnz // 2)

    @classmethod
    def from_pairs(cls, num_nodes: int, pairs) -> "Graph":
        """Build from pairs already known to be valid, canonical and unique."""
        arr = as_pairs(pairs)
        rows = np.concatenate([arr[:, 0], arr[:, 1]])
        cols = np.concatenate([arr[:, 1], arr[:, 0]])
        data = np.ones(len(rows), dtype=np.float64)
        return cls(sp.csr_matrix((data, (rows, cols)), shape=(num_nodes, num_nodes)))

    @classmethod
    def empty(cls, num_nodes: int) -> "Graph":
        return cls.from_pairs(num_nodes, np.empty((0, 2), dtype=np.int64))

    @property
    def num_nodes(self) -> int:
        return int(self._adj.shape[0])

    @property
    def num_edges(self) -> int:
        return self._num_edges

    @property
    def adjacency(self) -> sp.csr_matrix:
        return self._adj

    @property
    def indptr(self) -> np.ndarray:
        return self._adj.indptr

    @property
    def indices(self) -> np.ndarray:
        return self._adj.indices

    def check_node(self, u: int) -> None:
        if not 0 <= int(u) < self.num_nodes:
            raise GraphValidationError(f"Node {u} outside [0, {self.num_nodes})")

    def neighbors(self, u: int) -> np.ndarray:
        return self._adj.indices[self._adj.indptr[u]:self._adj.indptr[u + 1]]

    def degree(self, u: int) -> int:
        return int(self._adj.indptr[u + 1] - self._adj.indptr[u])

    def degrees(self) -> np.ndarray:
        return np.diff(self._adj.indptr).astype(np.int64)

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        pos = np.searchsorted(nbrs, v)
        return bool(pos < len(nbrs) and nbrs[pos] == v)

    def edges(self) -> PairArray:
        """Canonical (u < v) edges in lexicographic order."""
        upper = sp.triu(self._adj, k=1, format="coo")
        pairs = np.column_stack([upper.row, upper.col]).astype(np.int64)
        order = np.lexsort((pairs[:, 1], pairs[:, 0]))
        return pairs[order]

    def edge_keys(self) -> np.ndarray:
        """Sorted pair keys of all edges (see `pair_keys`)."""
        return pair_keys(self.edges(), self.num_nodes)

    def to_edge_list(self) -> EdgeList:
        return EdgeList.from_pairs(self.edges())

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.num_nodes))
        g.add_edges_from(map(tuple, self.edges().tolist()))
        return g

    def same_edges(self, other: "Graph") -> bool:
        return self.num_nodes == other.num_nodes and np.array_equal(self.edges(), other.edges())

    def __repr__(self) -> str:
        return f"Graph(num_nodes={self.num_nodes}, num_edges={self.num_edges})"


def build_graph_with_report(num_nodes: int, edges: EdgeList) -> Tuple[Graph, GraphBuildReport]:
    """Validate, symmetrize and deduplicate raw edge rows."""
    src = np.asarray(edges.src, dtype=np.int64)
    dst = np.asarray(edges.dst, dtype=np.int64)
    bad = (src < 0) | (src >= num_nodes) | (dst < 0) | (dst >= num_nodes)
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise GraphValidationError(
            f"Edge row {row} ({src[row]}, {dst[row]}) has an endpoint outside [0, {num_nodes})"
        )

    loops = src == dst
    kept = canonical_pairs(np.column_stack([src[~loops], dst[~loops]]))
    keys = np.unique(kept[:, 0] * np.int64(num_nodes) + kept[:, 1]) if len(kept) else np.empty(0, np.int64)
    report = GraphBuildReport(self_loops=int(loops.sum()), duplicates=int(len(kept) - len(keys)))
    if report.self_loops or report.duplicates:
        logger.warning(
            "Dropped %d self-loop(s) and %d duplicate edge row(s)", report.self_loops, report.duplicates
        )
    return Graph.from_pairs(num_nodes, keys_to_pairs(keys, num_nodes)), report


def build_graph(num_nodes: int, edges: EdgeList) -> Graph:
    graph, _ = build_graph_with_report(num_nodes, edges)
    return graph


def common_neighbors(g: Graph, u: int, v: int) -> int:
    """|Γ(u) ∩ Γ(v)| by intersecting the two sorted neighbor lists."""
    g.check_node(u)
    g.check_node(v)
    return int(np.intersect1d(g.neighbors(u), g.neighbors(v), assume_unique=True).size)


def union_edges(g: Graph, pairs) -> Graph:
    """New graph with edge set E ∪ pairs. Pairs already in E add nothing."""
    extra = as_pairs(pairs)
    if len(extra) == 0:
        return g
    if (extra[:, 0] == extra[:, 1]).any():
        raise GraphValidationError("Cannot add a self-loop to a simple graph")
    keys = np.union1d(g.edge_keys(), pair_keys(extra, g.num_nodes))
    return Graph.from_pairs(g.num_nodes, keys_to_pairs(keys, g.num_nodes))


def augment(g: Graph, p: "ProposalSet", k: int) -> Graph:
    """Graph (V, E ∪ P_k) where P_k is the first k proposal edges."""
    if k < 0 or k > len(p):
        raise EdgeProposalError(f"Target size {k} outside [0, {len(p)}] for this proposal set")
    if k == 0:
        return g
    return union_edges(g, p.pairs[:k])

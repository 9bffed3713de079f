"""
Unit tests for the graph core.
"""

import numpy as np
import pytest
import scipy.sparse as sp

from conftest import random_graph
from edge_proposals.errors import EdgeProposalError, GraphValidationError
from edge_proposals.graph import (EdgeList, Graph, augment, build_graph, build_graph_with_report, common_neighbors,
                                  pair_keys, keys_to_pairs, union_edges)
from edge_proposals.proposal import ProposalSet


class TestBuildGraph:
    """Test ingestion of raw edge rows."""

    def test_drops_self_loops_and_duplicates(self):
        """Self-loops and repeated rows (in either direction) are dropped and counted."""
        edges = EdgeList.from_pairs([(0, 1), (1, 0), (2, 2), (1, 2)])
        g, report = build_graph_with_report(3, edges)

        assert g.num_edges == 2
        assert report.self_loops == 1
        assert report.duplicates == 1
        assert g.has_edge(1, 0) and g.has_edge(2, 1)
        assert not g.has_edge(2, 2)

    def test_out_of_range_endpoint_names_row(self):
        """An endpoint outside [0, n) raises and names the offending row."""
        edges = EdgeList.from_pairs([(0, 1), (1, 5)])
        with pytest.raises(GraphValidationError, match="row 1"):
            build_graph(3, edges)

    def test_negative_endpoint_rejected(self):
        """Negative node ids are outside the node range too."""
        with pytest.raises(GraphValidationError):
            build_graph(3, EdgeList.from_pairs([(-1, 2)]))

    def test_round_trip_through_edge_list(self):
        """Rebuilding a graph from its own edge list gives the same graph."""
        rng = np.random.default_rng(11)
        g = random_graph(rng, 60, 0.1)
        rebuilt, report = build_graph_with_report(60, g.to_edge_list())
        assert rebuilt.same_edges(g)
        assert report.self_loops == 0 and report.duplicates == 0

    def test_empty_edge_list(self):
        """No rows gives an edgeless graph on n nodes."""
        g = build_graph(4, EdgeList.from_pairs([]))
        assert g.num_nodes == 4
        assert g.num_edges == 0
        assert g.edges().shape == (0, 2)

    def test_mismatched_timestamps_rejected(self):
        """Timestamps must align with edge rows."""
        with pytest.raises(GraphValidationError):
            EdgeList(src=np.array([0, 1]), dst=np.array([1, 2]), timestamps=np.array([3]))


class TestGraphAccessors:
    """Test neighbor, degree and edge accessors."""

    def test_neighbors_sorted(self):
        """Neighbor lists come back sorted ascending."""
        g = Graph.from_pairs(5, [(0, 4), (0, 2), (0, 1), (3, 0)])
        assert g.neighbors(0).tolist() == [1, 2, 3, 4]
        assert g.degree(0) == 4
        assert g.degrees().tolist() == [4, 1, 1, 1, 1]

    def test_edges_canonical_lexicographic(self):
        """edges() lists each edge once as (u < v) in lexicographic order."""
        g = Graph.from_pairs(4, [(3, 2), (1, 0), (2, 0)])
        assert g.edges().tolist() == [[0, 1], [0, 2], [2, 3]]

    def test_adjacency_symmetric_binary(self):
        """The CSR adjacency is symmetric with unit entries and no diagonal."""
        g = Graph.from_pairs(4, [(0, 1), (1, 2), (2, 3)])
        adj = g.adjacency.toarray()
        assert np.array_equal(adj, adj.T)
        assert set(np.unique(adj).tolist()) <= {0.0, 1.0}
        assert np.all(np.diag(adj) == 0)

    def test_constructor_does_not_mutate_input(self):
        """Wrapping a matrix with repeated entries leaves the caller's matrix alone."""
        mat = sp.csr_matrix(np.array([[0, 2.0], [2.0, 0]]))
        Graph(mat)
        assert mat.toarray()[0, 1] == 2.0

    def test_to_networkx(self, square):
        """networkx export keeps every node and edge."""
        nxg = square.to_networkx()
        assert nxg.number_of_nodes() == 4
        assert nxg.number_of_edges() == 4

    def test_pair_keys_invert(self):
        """Pair keys are orientation free and decode to canonical pairs."""
        keys = pair_keys([(3, 1), (1, 3), (0, 2)], 5)
        assert keys[0] == keys[1]
        assert keys_to_pairs(keys, 5).tolist() == [[1, 3], [1, 3], [0, 2]]


class TestCommonNeighbors:
    """Test the common-neighbor count."""

    def test_square(self, square):
        """Opposite corners of a four-cycle share two neighbors; adjacent ones none."""
        assert common_neighbors(square, 0, 2) == 2
        assert common_neighbors(square, 1, 3) == 2
        assert common_neighbors(square, 0, 1) == 0

    def test_symmetric(self, star5):
        """The count does not depend on argument order."""
        assert common_neighbors(star5, 1, 2) == common_neighbors(star5, 2, 1) == 1

    @pytest.mark.parametrize("seed,n,p", [(0, 30, 0.3), (1, 120, 0.05), (2, 200, 0.02)])
    def test_matches_double_loop(self, seed, n, p):
        """Counts agree with a direct scan over all third nodes on random graphs."""
        rng = np.random.default_rng(seed)
        g = random_graph(rng, n, p)
        dense = g.adjacency.toarray()
        for u, v in rng.integers(0, n, size=(40, 2)):
            expected = sum(1 for w in range(n) if dense[u, w] and dense[v, w])
            assert common_neighbors(g, int(u), int(v)) == expected

    def test_invalid_node(self, square):
        """Unknown nodes raise."""
        with pytest.raises(GraphValidationError):
            common_neighbors(square, 0, 9)


class TestAugment:
    """Test graph augmentation with proposal edges."""

    def _proposal(self):
        return ProposalSet(np.array([[0, 2], [1, 3]]), np.array([2.0, 1.0]))

    def test_zero_is_identity(self, path4):
        """k = 0 leaves the graph unchanged."""
        assert augment(path4, self._proposal(), 0).same_edges(path4)

    def test_adds_prefix(self, path4):
        """Only the first k proposal edges are added."""
        g1 = augment(path4, self._proposal(), 1)
        assert g1.num_edges == 4
        assert g1.has_edge(0, 2)
        assert not g1.has_edge(1, 3)
        assert augment(path4, self._proposal(), 2).num_edges == 5

    def test_input_graph_untouched(self, path4):
        """Augmentation returns a new graph."""
        augment(path4, self._proposal(), 2)
        assert path4.num_edges == 3

    def test_k_out_of_range(self, path4):
        """k above |P| or below 0 raises."""
        with pytest.raises(EdgeProposalError):
            augment(path4, self._proposal(), 3)
        with pytest.raises(EdgeProposalError):
            augment(path4, self._proposal(), -1)

    def test_union_with_existing_edge(self, path4):
        """Adding an existing edge is a no-op."""
        assert union_edges(path4, [(1, 0)]).same_edges(path4)

    def test_union_rejects_self_loop(self, path4):
        """A self-loop cannot enter a simple graph."""
        with pytest.raises(GraphValidationError):
            union_edges(path4, [(2, 2)])

    def test_idempotent(self, path4):
        """Augmenting twice with the same prefix equals augmenting once."""
        once = augment(path4, self._proposal(), 2)
        assert augment(once, self._proposal(), 2).same_edges(once)

"""
Unit tests for starting sets, top-k filtering, forced inclusion and target size grids.
"""

import numpy as np
import pytest

from conftest import random_graph
from edge_proposals.errors import EdgeProposalError
from edge_proposals.graph import Graph
from edge_proposals.models import CommonNeighborsScorer, batch_score
from edge_proposals.proposal import (ProposalSet, TargetSizeGrid, enumerate_starting_set, filter_top_k,
                                     force_include, ranking_order, target_size_grid, top_k_indices)


class TestStartingSet:
    """Test two-hop candidate enumeration."""

    def test_path(self, path4):
        """A path's starting set is its two distance-2 pairs."""
        assert enumerate_starting_set(path4).tolist() == [[0, 2], [1, 3]]

    def test_excludes_edges(self):
        """A triangle has no non-edge candidates."""
        g = Graph.from_pairs(3, [(0, 1), (1, 2), (0, 2)])
        assert len(enumerate_starting_set(g)) == 0

    def test_matches_definition(self):
        """Every non-edge with a common neighbor, and nothing else."""
        rng = np.random.default_rng(2)
        g = random_graph(rng, 30, 0.1)
        start = {tuple(p) for p in enumerate_starting_set(g).tolist()}
        expected = {
            (u, v)
            for u in range(30) for v in range(u + 1, 30)
            if not g.has_edge(u, v) and len(set(g.neighbors(u)) & set(g.neighbors(v))) > 0
        }
        assert start == expected

    def test_cap(self, path4):
        """Exceeding the configured cap raises."""
        with pytest.raises(EdgeProposalError, match="cap"):
            enumerate_starting_set(path4, cap=1)


class TestTopK:
    """Test top-k selection and its tie-breaking."""

    def test_matches_full_sort(self):
        """Partial selection equals the head of a full (score desc, u, v) sort."""
        rng = np.random.default_rng(9)
        rows, cols = np.triu_indices(40, k=1)
        pairs = np.column_stack([rows, cols])
        scores = rng.integers(0, 4, size=len(pairs)).astype(float)
        full = ranking_order(pairs, scores)
        for k in (0, 1, 7, 100, 500, len(pairs), len(pairs) + 5):
            np.testing.assert_array_equal(top_k_indices(pairs, scores, k), full[:k])

    def test_ties_by_pair_order(self, star5):
        """Equal scores are admitted in lexicographic pair order."""
        start = enumerate_starting_set(star5)
        p = filter_top_k(star5, start, CommonNeighborsScorer(), 2)
        assert p.pairs.tolist() == [[1, 2], [1, 3]]
        assert p.scores.tolist() == [1.0, 1.0]

    def test_prefix_monotone(self):
        """The top k is a prefix of the top k + 1."""
        rng = np.random.default_rng(4)
        g = random_graph(rng, 40, 0.12)
        start = enumerate_starting_set(g)
        sc = CommonNeighborsScorer()
        previous = filter_top_k(g, start, sc, 0)
        for k in range(1, 30):
            current = filter_top_k(g, start, sc, k)
            np.testing.assert_array_equal(current.pairs[:k - 1], previous.pairs)
            previous = current

    def test_scores_are_filter_scores(self):
        """Stored scores equal the filtering scorer's values."""
        rng = np.random.default_rng(8)
        g = random_graph(rng, 25, 0.2)
        p = filter_top_k(g, enumerate_starting_set(g), CommonNeighborsScorer(), 10)
        np.testing.assert_array_equal(p.scores, batch_score(CommonNeighborsScorer(), g, p.pairs))

    def test_clamps_to_starting_set(self, path4):
        """Asking for more than |S| returns all of S."""
        p = filter_top_k(path4, enumerate_starting_set(path4), CommonNeighborsScorer(), 10)
        assert len(p) == 2

    def test_disjoint_from_graph(self):
        """Proposal entries are never existing edges."""
        rng = np.random.default_rng(6)
        g = random_graph(rng, 30, 0.2)
        p = filter_top_k(g, enumerate_starting_set(g), CommonNeighborsScorer(), 50)
        assert not any(g.has_edge(int(u), int(v)) for u, v in p.pairs)


class TestProposalSet:
    """Test proposal set validation."""

    def test_requires_sorted(self):
        """Entries out of rank order are rejected."""
        with pytest.raises(EdgeProposalError, match="sorted"):
            ProposalSet(np.array([[0, 1], [0, 2]]), np.array([1.0, 2.0]))

    def test_rejects_duplicates(self):
        """Each pair appears at most once."""
        with pytest.raises(EdgeProposalError, match="duplicate"):
            ProposalSet(np.array([[0, 1], [0, 1]]), np.array([2.0, 1.0]))

    def test_rejects_non_canonical(self):
        """Pairs must be stored as u < v."""
        with pytest.raises(EdgeProposalError):
            ProposalSet(np.array([[2, 1]]), np.array([1.0]))

    def test_from_unsorted(self):
        """Arbitrary rows are canonicalized and sorted."""
        p = ProposalSet.from_unsorted([(3, 1), (0, 2), (0, 1)], [1.0, 5.0, 1.0])
        assert p.pairs.tolist() == [[0, 2], [0, 1], [1, 3]]

    def test_head(self):
        """head(k) keeps the first k entries."""
        p = ProposalSet.from_unsorted([(0, 1), (0, 2), (0, 3)], [3.0, 2.0, 1.0])
        assert p.head(2).pairs.tolist() == [[0, 1], [0, 2]]
        with pytest.raises(EdgeProposalError):
            p.head(4)


class TestForceInclude:
    """Test forcing validation edges into a proposal set."""

    def _proposal(self):
        return ProposalSet(np.array([[0, 5], [1, 5], [2, 5]]), np.array([3.0, 2.0, 1.0]))

    def test_forced_on_top_and_counted(self):
        """Forced edges lead the set, score above every candidate and use up slots."""
        p = force_include(self._proposal(), [(3, 4)], 3, must_scores=np.array([0.5]))
        assert p.pairs.tolist() == [[3, 4], [0, 5], [1, 5]]
        assert p.scores[0] > 3.0
        assert p.provenance["forced"] == 1

    def test_forced_order_follows_original_score(self):
        """Several forced edges keep the order of their original scores."""
        p = force_include(self._proposal(), [(3, 4), (2, 4)], 3, must_scores=np.array([0.1, 0.9]))
        assert p.pairs.tolist() == [[2, 4], [3, 4], [0, 5]]
        assert p.scores[0] > p.scores[1] > p.scores[2] == 3.0

    def test_already_present(self):
        """A forced edge already in the set is moved, not duplicated."""
        p = force_include(self._proposal(), [(5, 1)], 3)
        assert p.pairs.tolist() == [[1, 5], [0, 5], [2, 5]]

    def test_overflow_truncates(self):
        """More forced edges than k keeps only the top k of them."""
        p = force_include(self._proposal(), [(3, 4), (2, 4), (1, 4)], 2, must_scores=np.array([1.0, 3.0, 2.0]))
        assert p.pairs.tolist() == [[2, 4], [1, 4]]

    def test_rejects_graph_edges(self):
        """Forced edges must not already be in the training graph."""
        g = Graph.from_pairs(6, [(3, 4)])
        with pytest.raises(EdgeProposalError):
            force_include(self._proposal(), [(3, 4)], 3, graph=g)

    def test_nothing_to_force(self):
        """An empty must-list just truncates to k."""
        assert len(force_include(self._proposal(), [], 2)) == 2

    def test_huge_scores_stay_strict(self):
        """Forced scores stay strictly ordered above candidates with very large scores."""
        p = ProposalSet(np.array([[0, 5], [1, 5]]), np.array([1e17, 5.0]))
        forced = force_include(p, [(3, 4), (2, 4)], 4, must_scores=np.array([0.2, 0.1]))
        assert forced.pairs.tolist() == [[3, 4], [2, 4], [0, 5], [1, 5]]
        assert (np.diff(forced.scores) < 0).all()
        assert forced.scores[1] > 1e17


class TestTargetSizeGrid:
    """Test target size grids around kbar."""

    def test_small(self):
        """Small scale: kbar +/- 3000 in steps of 1000."""
        grid = target_size_grid(5000, "small", 100_000)
        assert grid.resolved == [2000, 3000, 4000, 5000, 6000, 7000, 8000]
        assert grid.offsets == [-3000, -2000, -1000, 0, 1000, 2000, 3000]

    def test_clamps_and_dedups(self):
        """Sizes clamp into [0, |S|] and collapse duplicates."""
        grid = target_size_grid(10_000, "large", 15_000)
        assert grid.resolved == [0, 10_000, 15_000]

    def test_small_kbar(self):
        """Negative candidates clamp to zero."""
        assert target_size_grid(1000, "small", 10**6).resolved == [0, 1000, 2000, 3000, 4000]

    def test_unknown_scale(self):
        """Only 'large' and 'small' are accepted."""
        with pytest.raises(EdgeProposalError):
            target_size_grid(100, "medium", 1000)

    def test_from_sizes(self):
        """Explicit sizes are clamped to the starting set size."""
        grid = TargetSizeGrid.from_sizes(200, [0, 100, 500, 900], 600)
        assert list(grid) == [0, 100, 500, 600]
        assert len(grid) == 4

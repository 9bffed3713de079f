"""
Unit tests for edge splits and negative sampling.
"""

import numpy as np
import pytest

from conftest import random_graph
from edge_proposals.errors import InfeasibleSamplingError, SplitError
from edge_proposals.graph import EdgeList, Graph, pair_keys
from edge_proposals.splits import (EdgeSplit, inference_graph, random_split, sample_negatives, sbm_eval_edges,
                                   split_sizes, temporal_split)


def pair_set(pairs):
    return {tuple(p) for p in np.asarray(pairs).tolist()}


def random_edges(seed, n=60, m=100):
    rng = np.random.default_rng(seed)
    rows, cols = np.triu_indices(n, k=1)
    chosen = rng.choice(len(rows), size=m, replace=False)
    return EdgeList.from_pairs(np.column_stack([rows[chosen], cols[chosen]]),
                               timestamps=rng.permutation(m))


class TestSplitSizes:
    """Test evaluation set sizing."""

    def test_floor_and_remainder(self):
        """Evaluation sizes are floored; train takes the rest."""
        assert split_sizes(100, (0.8, 0.1, 0.1)) == (80, 10, 10)
        assert split_sizes(19, (0.8, 0.1, 0.1)) == (17, 1, 1)

    def test_bad_fractions(self):
        """Fractions must be three nonnegative numbers summing to one."""
        with pytest.raises(SplitError):
            split_sizes(10, (0.5, 0.5, 0.5))
        with pytest.raises(SplitError):
            split_sizes(10, (0.9, 0.1))


class TestTemporalSplit:
    """Test the time-ordered split."""

    def test_time_order(self):
        """Train edges predate validation edges, which predate test edges."""
        edges = random_edges(1)
        split = temporal_split(edges, 60, seed=0)
        stamp = {tuple(sorted(p)): t for p, t in zip(edges.pairs().tolist(), edges.timestamps.tolist())}
        train = [stamp[p] for p in pair_set(split.train_pos)]
        valid = [stamp[p] for p in pair_set(split.valid_pos)]
        test = [stamp[p] for p in pair_set(split.test_pos)]
        assert max(train) < min(valid)
        assert max(valid) < min(test)
        assert split.sizes() == {"train_pos": 80, "valid_pos": 10, "test_pos": 10, "valid_neg": 10, "test_neg": 10}

    def test_requires_timestamps(self):
        """Untimed edges cannot be split temporally."""
        with pytest.raises(SplitError, match="timestamp"):
            temporal_split(EdgeList.from_pairs([(0, 1)]), 2)

    def test_repeated_edge_keeps_earliest(self):
        """A repeated edge is placed by its first observation."""
        pairs = [(0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (1, 0)] + [(10 + i, 20 + i) for i in range(4)]
        times = [50, 1, 2, 3, 4, 0, 5, 6, 7, 8]
        split = temporal_split(EdgeList.from_pairs(pairs, times), 30, fractions=(0.6, 0.2, 0.2))
        assert (0, 1) in pair_set(split.train_pos)
        assert len(split.train_pos) + split.kbar == 9

    def test_negatives_valid(self):
        """Negatives avoid every positive edge and are pairwise disjoint."""
        split = temporal_split(random_edges(2), 60, seed=3)
        positives = pair_set(split.train_pos) | pair_set(split.valid_pos) | pair_set(split.test_pos)
        assert not pair_set(split.valid_neg) & positives
        assert not pair_set(split.test_neg) & positives
        assert not pair_set(split.valid_neg) & pair_set(split.test_neg)


class TestRandomSplit:
    """Test the shuffled split."""

    def test_deterministic(self):
        """Same seed, same split; another seed, another split."""
        edges = random_edges(4)
        a, b, c = random_split(edges, 60, seed=1), random_split(edges, 60, seed=1), random_split(edges, 60, seed=2)
        np.testing.assert_array_equal(a.test_pos, b.test_pos)
        np.testing.assert_array_equal(a.test_neg, b.test_neg)
        assert pair_set(a.test_pos) != pair_set(c.test_pos)

    def test_partition(self):
        """Positives partition the input edges."""
        edges = random_edges(5)
        split = random_split(edges, 60, seed=0)
        union = pair_set(split.train_pos) | pair_set(split.valid_pos) | pair_set(split.test_pos)
        assert union == pair_set(np.sort(edges.pairs(), axis=1))

    def test_train_graph(self):
        """The train graph holds exactly the train positives."""
        split = random_split(random_edges(6), 60, seed=0)
        assert split.train_graph().num_edges == len(split.train_pos)


class TestNegativeSampling:
    """Test uniform non-edge sampling."""

    def test_excludes_edges_and_forbidden(self):
        """Samples avoid graph edges, forbidden pairs and each other."""
        rng = np.random.default_rng(0)
        g = random_graph(rng, 30, 0.2)
        forbidden = np.array([[0, 1], [2, 3], [4, 5]])
        neg = sample_negatives(g, [forbidden], 100, seed=7)
        keys = pair_keys(neg, 30)
        assert len(np.unique(keys)) == 100
        assert not np.isin(keys, g.edge_keys()).any()
        assert not np.isin(keys, pair_keys(forbidden, 30)).any()
        assert (neg[:, 0] < neg[:, 1]).all()

    def test_deterministic(self):
        """Same seed, same negatives."""
        g = Graph.empty(50)
        np.testing.assert_array_equal(sample_negatives(g, [], 30, seed=1), sample_negatives(g, [], 30, seed=1))

    def test_infeasible(self):
        """A complete graph has no negatives to give."""
        g = Graph.from_pairs(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
        with pytest.raises(InfeasibleSamplingError) as info:
            sample_negatives(g, [], 1, seed=0)
        assert info.value.requested == 1
        assert info.value.available == 0

    def test_dense_takes_whole_complement(self):
        """Requesting every available pair returns the full complement."""
        g = Graph.from_pairs(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
        neg = sample_negatives(g, [], 6, seed=0)
        assert pair_set(neg) == {(0, 2), (0, 3), (0, 4), (1, 3), (1, 4), (2, 4)}

    def test_zero(self):
        """Zero requested gives an empty array."""
        assert sample_negatives(Graph.empty(3), [], 0, seed=0).shape == (0, 2)


class TestSbmEvalEdges:
    """Test block-model evaluation edges."""

    def test_positive_within_negative_between(self, sbm_setup):
        """Positives join same-block non-edges, negatives different-block non-edges."""
        g, blocks, split = sbm_setup
        pos = np.concatenate([split.valid_pos, split.test_pos])
        neg = np.concatenate([split.valid_neg, split.test_neg])
        assert (blocks[pos[:, 0]] == blocks[pos[:, 1]]).all()
        assert (blocks[neg[:, 0]] != blocks[neg[:, 1]]).all()
        assert not np.isin(pair_keys(pos, g.num_nodes), g.edge_keys()).any()
        assert not np.isin(pair_keys(neg, g.num_nodes), g.edge_keys()).any()

    def test_counts_follow_fractions(self, sbm_setup):
        """Validation and test sizes are |absent| * 0.1 / 0.8 each, and the whole graph trains."""
        g, _, split = sbm_setup
        num_absent = g.num_nodes * (g.num_nodes - 1) // 2 - g.num_edges
        expected = int(np.floor(num_absent * 0.125 + 1e-9))
        assert len(split.valid_pos) == len(split.test_pos) == expected
        assert len(split.valid_neg) == len(split.test_neg) == expected
        assert split.train_graph().same_edges(g)

    def test_explicit_counts(self, sbm_setup):
        """Explicit counts override the fractions."""
        g, blocks, _ = sbm_setup
        split = sbm_eval_edges(g, blocks, seed=1, counts=(5, 7))
        assert split.sizes()["valid_neg"] == 5
        assert split.sizes()["test_pos"] == 7

    def test_label_mismatch(self, sbm_setup):
        """Block labels must cover every node."""
        g, blocks, _ = sbm_setup
        with pytest.raises(SplitError):
            sbm_eval_edges(g, blocks[:-1], seed=0)


class TestEdgeSplit:
    """Test split invariants and inference graphs."""

    def test_overlap_rejected(self):
        """An edge in two sets is a split error naming both."""
        with pytest.raises(SplitError, match="both"):
            EdgeSplit(4, np.array([[0, 1]]), np.array([[0, 1]]), np.empty((0, 2)), np.array([[2, 3]]),
                      np.empty((0, 2)), "random")

    def test_unbalanced_negatives_rejected(self):
        """Negatives must match positives in number."""
        with pytest.raises(SplitError):
            EdgeSplit(4, np.array([[0, 1]]), np.array([[1, 2]]), np.empty((0, 2)), np.empty((0, 2)),
                      np.empty((0, 2)), "random")

    def test_inference_graph(self):
        """Validation positives join the graph only when asked."""
        split = random_split(random_edges(7), 60, seed=0)
        g_train = split.train_graph()
        assert inference_graph(g_train, split, False) is g_train
        with_valid = inference_graph(g_train, split, True)
        assert with_valid.num_edges == g_train.num_edges + len(split.valid_pos)
        assert all(with_valid.has_edge(int(u), int(v)) for u, v in split.valid_pos)

"""
Controlled-quality proposal sets.

Start from a perfect proposal set (the positive test edges) and degrade it
with uniformly drawn negative pairs, either by growing the set or by
replacing positives at fixed size, then measure the ranking model.
Quality is reported as the negative/positive ratio inside the proposal set,
also normalized by the graph's own ratio (C(n,2) - m) / m.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from .errors import EdgeProposalError
from .evaluation import EvalResult, FilterRankOptions, FilterRankPipeline
from .graph import Graph
from .models.base import BaseScorer
from .proposal import ProposalSet
from .seeding import make_rng
from .splits import EdgeSplit, sample_negatives

logger = logging.getLogger(__name__)


@dataclass
class QualityPoint:
    raw_ratio: float
    relative_ratio: float
    num_pos: int
    num_neg: int
    hits: EvalResult

    def to_dict(self) -> Dict[str, float]:
        return {
            "raw_ratio": self.raw_ratio,
            "relative_ratio": self.relative_ratio,
            "num_pos": self.num_pos,
            "num_neg": self.num_neg,
            "hits": self.hits.value,
        }


def ground_truth_ratio(num_nodes: int, num_positive: int) -> float:
    """(C(n,2) - m) / m with m counting every positive edge of the dataset."""
    if num_positive <= 0:
        raise EdgeProposalError("Ground-truth ratio needs at least one positive edge")
    return (num_nodes * (num_nodes - 1) / 2 - num_positive) / num_positive


def _ratio(num_neg: int, num_pos: int) -> float:
    if num_pos == 0:
        return math.inf if num_neg else 0.0
    return num_neg / num_pos


def _injected_negatives(g_train: Graph, split: EdgeSplit, count: int, seed: int, stage: str) -> np.ndarray:
    """One nested sequence of negatives; every level takes a prefix of it."""
    forbidden = [split.test_pos, split.valid_pos]
    return sample_negatives(g_train, forbidden, count, make_rng(seed, stage))


def _evaluate(pipeline: FilterRankPipeline, pairs: np.ndarray, num_pos: int, num_neg: int,
              ground: float) -> QualityPoint:
    # proposal scores are placeholders: the set is injected, not filtered
    proposal = ProposalSet.from_unsorted(pairs, np.zeros(len(pairs)), {"source": "quality"})
    result = pipeline.evaluate_proposal(proposal, len(proposal), "test")
    raw = _ratio(num_neg, num_pos)
    return QualityPoint(raw, raw / ground, num_pos, num_neg, result)


def _pipeline(g_train: Graph, split: EdgeSplit, rank_scorer: BaseScorer,
              options: Optional[FilterRankOptions]) -> FilterRankPipeline:
    return FilterRankPipeline(g_train, split, None, rank_scorer, options)


def quality_grow(g_train: Graph, split: EdgeSplit, rank_scorer: BaseScorer, neg_counts: Sequence[int],
                 seed: int, options: Optional[FilterRankOptions] = None) -> List[QualityPoint]:
    """All positive test edges plus a growing, nested set of uniform negatives."""
    counts = [int(c) for c in neg_counts]
    if any(c < 0 for c in counts):
        raise EdgeProposalError(f"Negative counts must be nonnegative, got {counts}")
    ground = ground_truth_ratio(split.num_nodes, split.num_positive)
    negatives = _injected_negatives(g_train, split, max(counts, default=0), seed, "quality_grow")
    pipeline = _pipeline(g_train, split, rank_scorer, options)
    points = []
    for c in counts:
        pairs = np.concatenate([split.test_pos, negatives[:c]])
        points.append(_evaluate(pipeline, pairs, len(split.test_pos), c, ground))
        logger.info("quality_grow: %d negatives -> hits %.4f", c, points[-1].hits.value)
    return points


def quality_fixed(g_train: Graph, split: EdgeSplit, rank_scorer: BaseScorer, pos_fracs: Sequence[float],
                  seed: int, options: Optional[FilterRankOptions] = None) -> List[QualityPoint]:
    """
    Proposal size fixed at |test_pos|; keep a fraction of the positives and
    fill the rest with negatives. Lower fractions reuse every replacement
    made at higher ones.
    """
    fracs = [float(f) for f in pos_fracs]
    if any(not 0.0 <= f <= 1.0 for f in fracs):
        raise EdgeProposalError(f"Positive fractions must lie in [0, 1], got {fracs}")
    size = len(split.test_pos)
    ground = ground_truth_ratio(split.num_nodes, split.num_positive)
    keep_order = split.test_pos[make_rng(seed, "quality_keep").permutation(size)]
    negatives = _injected_negatives(g_train, split, size, seed, "quality_fixed")
    pipeline = _pipeline(g_train, split, rank_scorer, options)
    points = []
    for frac in fracs:
        kept = int(math.floor(frac * size + 1e-9))
        pairs = np.concatenate([keep_order[:kept], negatives[:size - kept]])
        points.append(_evaluate(pipeline, pairs, kept, size - kept, ground))
        logger.info("quality_fixed: %.2f positives kept -> hits %.4f", frac, points[-1].hits.value)
    return points


def summarize_quality(points_by_seed: Sequence[Sequence[QualityPoint]]) -> pd.DataFrame:
    """Mean/std of hits per quality level across seeds (levels aligned by position)."""
    rows = []
    for seed_index, points in enumerate(points_by_seed):
        for level, point in enumerate(points):
            rows.append({"level": level, "seed_index": seed_index, "raw_ratio": point.raw_ratio,
                         "relative_ratio": point.relative_ratio, "hits": point.hits.value})
    columns = ["raw_ratio", "relative_ratio", "hits_mean", "hits_std", "seed_count"]
    if not rows:
        return pd.DataFrame(columns=columns)
    frame = pd.DataFrame(rows)
    summary = frame.groupby("level", sort=True).agg(
        raw_ratio=("raw_ratio", "mean"),
        relative_ratio=("relative_ratio", "mean"),
        hits_mean=("hits", "mean"),
        hits_std=("hits", lambda s: float(np.std(s.to_numpy()))),
        seed_count=("hits", "size"),
    )
    return summary.reset_index(drop=True)[columns]

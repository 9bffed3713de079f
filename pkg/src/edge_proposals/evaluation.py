"""
Filter & Rank evaluation: build a proposal set with a filtering scorer,
augment the graph, score evaluation edges with a ranking scorer and report
Hits@K. Target sizes are chosen on validation edges.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from .config import DEFAULT_STARTING_SET_CAP
from .errors import EdgeProposalError
from .graph import Graph, augment
from .models.base import BaseScorer, RankingMetrics
from .models.service import batch_score
from .proposal import ProposalSet, TargetSizeGrid, check_disjoint, enumerate_starting_set, filter_top_k, force_include
from .splits import EdgeSplit, inference_graph

logger = logging.getLogger(__name__)


def hits_at_k(pos: np.ndarray, neg: np.ndarray, k: int) -> float:
    return RankingMetrics.hits_at_k(pos, neg, k)


def aggregate_scores(values: Sequence[float]) -> Dict[str, Any]:
    return RankingMetrics.aggregate(values)


@dataclass
class FilterRankOptions:
    hits_k: int = 10
    include_valid: bool = False
    force_valid: bool = False
    eval_on: str = "test"
    n_jobs: int = 1
    starting_set_cap: int = DEFAULT_STARTING_SET_CAP

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class EvalResult:
    """Hits@K value together with the raw scores it was computed from."""

    hits_k: int
    value: float
    pos_scores: np.ndarray
    neg_scores: np.ndarray
    config: Dict[str, Any] = field(default_factory=dict)

    @property
    def metric(self) -> str:
        return f"hits@{self.hits_k}"

    def recompute(self, hits_k: Optional[int] = None) -> float:
        return hits_at_k(self.pos_scores, self.neg_scores, hits_k or self.hits_k)

    def to_dict(self) -> Dict[str, Any]:
        return {"metric": self.metric, "K": self.hits_k, "value": self.value, "config": self.config}


class FilterRankPipeline:
    """
    One filtering/ranking setup over a fixed split.

    The starting set and the ranked proposal are computed once for the
    largest size requested; any smaller k is a prefix of it.
    """

    def __init__(self, g_train: Graph, split: EdgeSplit, filter_scorer: Optional[BaseScorer],
                 rank_scorer: BaseScorer, options: Optional[FilterRankOptions] = None):
        self.g_train = g_train
        self.split = split
        self.filter_scorer = filter_scorer
        self.rank_scorer = rank_scorer
        self.options = options or FilterRankOptions()
        self._start: Optional[np.ndarray] = None
        self._ranked: Optional[ProposalSet] = None

    @property
    def starting_set(self) -> np.ndarray:
        if self._start is None:
            self._start = enumerate_starting_set(self.g_train, cap=self.options.starting_set_cap)
        return self._start

    def ranked_proposal(self, k: int) -> ProposalSet:
        """Top-k filtered proposal, reusing a cached longer one when possible."""
        if self.filter_scorer is None:
            raise EdgeProposalError("This pipeline has no filtering scorer; pass proposals explicitly")
        k = min(k, len(self.starting_set))
        if self._ranked is None or len(self._ranked) < k:
            self._ranked = filter_top_k(self.g_train, self.starting_set, self.filter_scorer, k,
                                        n_jobs=self.options.n_jobs)
        return self._ranked.head(k)

    def proposal(self, k: int, eval_on: Optional[str] = None) -> ProposalSet:
        """
        Proposal used when evaluating on `eval_on`. Validation edges are only
        forced in at test time, never while they are the evaluation target.
        """
        eval_on = eval_on or self.options.eval_on
        if k < 0:
            raise EdgeProposalError(f"Target size must be nonnegative, got {k}")
        if k > len(self.starting_set):
            logger.warning("Target size %d exceeds the starting set (%d); clamping", k, len(self.starting_set))
        p = self.ranked_proposal(k)
        if self.options.force_valid and eval_on == "test" and len(self.split.valid_pos):
            must_scores = batch_score(self.filter_scorer, self.g_train, self.split.valid_pos)
            p = force_include(p, self.split.valid_pos, k, must_scores=must_scores, graph=self.g_train)
            check_disjoint(p, self.g_train)
        return p

    def evaluate(self, k: int, eval_on: Optional[str] = None) -> EvalResult:
        eval_on = eval_on or self.options.eval_on
        p = self.proposal(k, eval_on)
        return self.evaluate_proposal(p, len(p), eval_on)

    def evaluate_proposal(self, p: ProposalSet, k: int, eval_on: Optional[str] = None) -> EvalResult:
        """Rank evaluation edges on the graph augmented with the first k entries of `p`."""
        eval_on = eval_on or self.options.eval_on
        check_disjoint(p, self.g_train)
        augmented = augment(self.g_train, p, k)
        graph = inference_graph(augmented, self.split, self.options.include_valid and eval_on == "test")
        pos, neg = self.split.eval_edges(eval_on)
        pos_scores = batch_score(self.rank_scorer, graph, pos, n_jobs=self.options.n_jobs)
        neg_scores = batch_score(self.rank_scorer, graph, neg, n_jobs=self.options.n_jobs)
        value = hits_at_k(pos_scores, neg_scores, self.options.hits_k)
        logger.debug("k=%d on %s: hits@%d = %.4f", k, eval_on, self.options.hits_k, value)
        config = {
            "filter": self.filter_scorer.describe() if self.filter_scorer else None,
            "rank": self.rank_scorer.describe(),
            "k": int(k),
            "eval_on": eval_on,
            "seed": self.split.meta.get("seed"),
            **{key: val for key, val in self.options.to_dict().items() if key != "eval_on"},
        }
        return EvalResult(self.options.hits_k, value, pos_scores, neg_scores, config)

    def search(self, grid: TargetSizeGrid) -> "SearchResult":
        if len(grid) == 0:
            raise EdgeProposalError("Target size grid is empty")
        sizes = sorted(grid.resolved)
        self.ranked_proposal(sizes[-1])
        valid_curve, test_results = [], []
        for k in sizes:
            valid_curve.append(self.evaluate(k, "valid").value)
            test_results.append(self.evaluate(k, "test"))
        best = int(np.argmax(valid_curve))
        logger.info("Selected k=%d (validation %.4f, test %.4f)", sizes[best], valid_curve[best],
                    test_results[best].value)
        return SearchResult(
            best_k=sizes[best],
            valid_curve=valid_curve,
            test_curve=[r.value for r in test_results],
            sizes=sizes,
            test_result=test_results[best],
            grid=grid,
        )


def filter_and_rank(g_train: Graph, split: EdgeSplit, filter_scorer: BaseScorer, rank_scorer: BaseScorer,
                    k: int, options: Optional[FilterRankOptions] = None) -> EvalResult:
    """Evaluate the Filter & Rank pipeline at target size k."""
    pipeline = FilterRankPipeline(g_train, split, filter_scorer, rank_scorer, options)
    return pipeline.evaluate(k)


@dataclass
class SearchResult:
    best_k: int
    valid_curve: List[float]
    test_curve: List[float]
    sizes: List[int]
    test_result: EvalResult
    grid: TargetSizeGrid

    def curves_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"k": self.sizes, "valid": self.valid_curve, "test": self.test_curve})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "metric": self.test_result.metric,
            "K": self.test_result.hits_k,
            "value": self.test_result.value,
            "best_k": self.best_k,
            "kbar": self.grid.kbar,
            "curves": [
                {"k": int(k), "valid": float(v), "test": float(t)}
                for k, v, t in zip(self.sizes, self.valid_curve, self.test_curve)
            ],
            "seed": self.test_result.config.get("seed"),
            "config": self.test_result.config,
        }


def target_size_search(g_train: Graph, split: EdgeSplit, filter_scorer: BaseScorer, rank_scorer: BaseScorer,
                       grid: TargetSizeGrid, options: Optional[FilterRankOptions] = None) -> SearchResult:
    """
    Pick k by validation Hits@K (ties go to the smaller k) and report the
    test score there, along with both full curves.
    """
    pipeline = FilterRankPipeline(g_train, split, filter_scorer, rank_scorer, options)
    return pipeline.search(grid)

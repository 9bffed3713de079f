"""
Recipes for the synthetic studies: block-model trials and ratio sweeps, and
the growth-model trial with a temporal split.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from .evaluation import FilterRankOptions, FilterRankPipeline, SearchResult, aggregate_scores
from .generators import JinConfig, SbmConfig, generate_jin, generate_sbm
from .models.base import BaseScorer
from .models.service import ScorerFactory
from .proposal import TargetSizeGrid, target_size_grid
from .splits import sbm_eval_edges, temporal_split

logger = logging.getLogger(__name__)

SBM_GRID_SIZES = tuple(range(0, 2001, 100))
SWEEP_X = (0.5, 0.6, 0.7, 0.8, 0.9)


@dataclass
class TrialResult:
    """Baseline (k = 0) against the validation-selected proposal size."""

    seed: int
    baseline: float
    search: SearchResult

    @property
    def augmented(self) -> float:
        return self.search.test_result.value

    @property
    def improvement(self) -> float:
        return self.augmented - self.baseline

    @property
    def test_best_k(self) -> int:
        return int(self.search.sizes[int(np.argmax(self.search.test_curve))])

    @property
    def selection_regret(self) -> float:
        """Test Hits lost by choosing k on validation instead of on test."""
        return float(max(self.search.test_curve)) - self.augmented

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "baseline": self.baseline,
            "augmented": self.augmented,
            "improvement": self.improvement,
            "best_k": self.search.best_k,
            "test_best_k": self.test_best_k,
            "selection_regret": self.selection_regret,
            "search": self.search.to_dict(),
        }


def _run_trial(pipeline: FilterRankPipeline, grid: TargetSizeGrid, seed: int) -> TrialResult:
    baseline = pipeline.evaluate(0, "test").value
    search = pipeline.search(grid)
    logger.info("seed %d: baseline %.4f -> %.4f at k=%d", seed, baseline, search.test_result.value, search.best_k)
    return TrialResult(seed=seed, baseline=baseline, search=search)


def _scorers(filter_kind: str, rank_kind: str) -> tuple:
    return ScorerFactory.create_scorer(filter_kind), ScorerFactory.create_scorer(rank_kind)


def sbm_trial(cfg: SbmConfig, filter_scorer: Optional[BaseScorer] = None,
              rank_scorer: Optional[BaseScorer] = None, sizes: Sequence[int] = SBM_GRID_SIZES,
              options: Optional[FilterRankOptions] = None) -> TrialResult:
    """Sample a block-model graph, hold out within/between-block pairs, search k."""
    default_filter, default_rank = _scorers("common-neighbors", "common-neighbors")
    g, blocks = generate_sbm(cfg)
    split = sbm_eval_edges(g, blocks, cfg.seed)
    pipeline = FilterRankPipeline(g, split, filter_scorer or default_filter, rank_scorer or default_rank, options)
    grid = TargetSizeGrid.from_sizes(split.kbar, sizes, len(pipeline.starting_set))
    return _run_trial(pipeline, grid, cfg.seed)


def sbm_ratio_sweep(seeds: Sequence[int], xs: Sequence[float] = SWEEP_X, block_sizes: Sequence[int] = (50, 50),
                    sizes: Sequence[int] = SBM_GRID_SIZES,
                    options: Optional[FilterRankOptions] = None) -> pd.DataFrame:
    """
    One row per (x, seed) with p = x/3 and q = (1 - x)/3, so the expected
    degree stays fixed while the within/between ratio p/q grows.
    """
    rows = []
    for x in xs:
        base = SbmConfig(block_sizes=list(block_sizes), p_in=x / 3.0, p_out=(1.0 - x) / 3.0)
        for seed in seeds:
            trial = sbm_trial(replace(base, seed=int(seed)), sizes=sizes, options=options)
            rows.append({
                "x": x,
                "ratio": x / (1.0 - x),
                "seed": int(seed),
                "baseline": trial.baseline,
                "augmented": trial.augmented,
                "improvement": trial.improvement,
                "best_k": trial.search.best_k,
                "test_best_k": trial.test_best_k,
                "selection_regret": trial.selection_regret,
            })
    return pd.DataFrame(rows)


def summarize_sweep(frame: pd.DataFrame) -> pd.DataFrame:
    """Mean/std of the improvement per ratio."""
    rows = []
    for ratio, group in frame.groupby("ratio", sort=True):
        stats = aggregate_scores(group["improvement"].to_numpy())
        rows.append({"ratio": ratio, "improvement_mean": stats["mean"], "improvement_std": stats["std"],
                     "seed_count": stats["count"]})
    return pd.DataFrame(rows, columns=["ratio", "improvement_mean", "improvement_std", "seed_count"])


def jin_trial(cfg: JinConfig, scale: str = "small", sizes: Optional[Sequence[int]] = None,
              options: Optional[FilterRankOptions] = None) -> TrialResult:
    """Growth-model graph, temporal 80/10/10 split, common neighbors both ways."""
    options = options or FilterRankOptions(include_valid=True)
    edges = generate_jin(cfg)
    split = temporal_split(edges, cfg.num_nodes, seed=cfg.seed)
    g_train = split.train_graph()
    filter_scorer, rank_scorer = _scorers("common-neighbors", "common-neighbors")
    pipeline = FilterRankPipeline(g_train, split, filter_scorer, rank_scorer, options)
    start = len(pipeline.starting_set)
    if sizes is None:
        grid = target_size_grid(split.kbar, scale, start)
    else:
        grid = TargetSizeGrid.from_sizes(split.kbar, sizes, start)
    return _run_trial(pipeline, grid, cfg.seed)


def summarize_trials(trials: Sequence[TrialResult]) -> Dict[str, Any]:
    return {
        "baseline": aggregate_scores([t.baseline for t in trials]),
        "augmented": aggregate_scores([t.augmented for t in trials]),
        "improvement": aggregate_scores([t.improvement for t in trials]),
        "trials": [t.to_dict() for t in trials],
    }


def trial_frame(trials: List[TrialResult]) -> pd.DataFrame:
    return pd.DataFrame([{k: v for k, v in t.to_dict().items() if k != "search"} for t in trials])

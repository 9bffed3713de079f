"""
Reproductions of the synthetic studies. Slow: run with `pytest -m slow`.
"""

import numpy as np
import pytest
from scipy.stats import spearmanr

from edge_proposals.experiments import jin_trial, sbm_ratio_sweep, sbm_trial, summarize_sweep, summarize_trials
from edge_proposals.generators import JinConfig, SbmConfig


class TestSbmTrial:
    """Quick checks of the block-model recipe."""

    def test_single_trial(self):
        """A trial reports baseline, selected size and improvement consistently."""
        trial = sbm_trial(SbmConfig(seed=0), sizes=[0, 200, 400])
        assert trial.search.best_k in (0, 200, 400)
        assert trial.improvement == pytest.approx(trial.augmented - trial.baseline)
        best = trial.search.sizes.index(trial.search.best_k)
        assert trial.search.valid_curve[best] == max(trial.search.valid_curve)
        assert trial.baseline == trial.search.test_curve[0]
        assert trial.selection_regret == max(trial.search.test_curve) - trial.augmented >= 0
        summary = summarize_trials([trial])
        assert summary["baseline"]["count"] == 1


@pytest.mark.slow
class TestSbmHeadline:
    """Two-block SBM, common neighbors for filtering and ranking, Hits@10."""

    def test_proposals_lift_hits(self):
        """Baseline around one half, augmented near one, big gain on most seeds."""
        trials = [sbm_trial(SbmConfig(seed=s)) for s in range(10)]
        baseline = np.mean([t.baseline for t in trials])
        augmented = np.mean([t.augmented for t in trials])
        assert 0.40 <= baseline <= 0.70
        assert 0.85 <= augmented <= 1.00
        assert sum(t.improvement >= 0.20 for t in trials) >= 8


@pytest.mark.slow
class TestSbmSweep:
    """Improvement grows with the within/between probability ratio."""

    def test_improvement_tracks_ratio(self):
        """No gain at ratio 1, positive rank correlation with the ratio."""
        frame = sbm_ratio_sweep(range(10))
        summary = summarize_sweep(frame)
        assert summary["improvement_mean"].iloc[0] <= 0.05
        rho, _ = spearmanr(summary["ratio"], summary["improvement_mean"])
        assert rho > 0

    def test_validation_tracks_test(self):
        """At high ratios choosing k on validation costs little test accuracy on a typical seed."""
        frame = sbm_ratio_sweep(range(10), xs=(0.8, 0.9))
        for _, group in frame.groupby("x"):
            assert group["selection_regret"].median() <= 0.15
            assert (group["selection_regret"] >= 0).all()


@pytest.mark.slow
class TestJin:
    """Growth model with a temporal split."""

    def test_proposals_help(self):
        """Augmented mean beats baseline mean over five generation seeds."""
        trials = [jin_trial(JinConfig(seed=s)) for s in range(5)]
        baseline = np.mean([t.baseline for t in trials])
        augmented = np.mean([t.augmented for t in trials])
        assert 0.40 <= baseline <= 0.80
        assert augmented > baseline

"""
Link scoring models package.
"""

from .base import BaseScorer, FeatureMatrix, RankingMetrics
from .heuristics import AdamicAdarScorer, CommonNeighborsScorer, CosCommonScorer
from .service import ScorerFactory, batch_score, score

__all__ = [
    'BaseScorer',
    'FeatureMatrix',
    'RankingMetrics',
    'CommonNeighborsScorer',
    'AdamicAdarScorer',
    'CosCommonScorer',
    'ScorerFactory',
    'batch_score',
    'score',
]

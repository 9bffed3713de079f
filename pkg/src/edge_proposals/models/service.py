"""
Scorer factory and batch scoring service.
"""

from __future__ import annotations

import logging
from typing import Dict, List, Optional, Sequence, Tuple, Type

import numpy as np
from joblib import Parallel, delayed

from ..errors import ConfigurationError
from ..graph import Graph, as_pairs
from .base import BaseScorer, FeatureMatrix
from .heuristics import AdamicAdarScorer, CommonNeighborsScorer, CosCommonScorer

logger = logging.getLogger(__name__)

DEFAULT_BATCH_SIZE = 100_000


class ScorerFactory:
    """Factory class for creating link scorers."""

    SCORER_REGISTRY: Dict[str, Type[BaseScorer]] = {
        'common-neighbors': CommonNeighborsScorer,
        'adamic-adar': AdamicAdarScorer,
        'cos-common': CosCommonScorer,
    }

    ALIASES = {
        'common': 'common-neighbors',
        'cn': 'common-neighbors',
        'aa': 'adamic-adar',
    }

    @classmethod
    def resolve(cls, kind: str) -> str:
        name = cls.ALIASES.get(kind, kind)
        if name not in cls.SCORER_REGISTRY:
            raise ConfigurationError(f"Unknown scorer: {kind}. Available scorers: {cls.get_available_scorers()}")
        return name

    @classmethod
    def create_scorer(cls, kind: str, features: Optional[FeatureMatrix] = None) -> BaseScorer:
        """Create a scorer by name; cos-common needs `features`."""
        name = cls.resolve(kind)
        if name == 'cos-common':
            return CosCommonScorer(features)
        return cls.SCORER_REGISTRY[name]()

    @classmethod
    def get_available_scorers(cls) -> List[str]:
        return list(cls.SCORER_REGISTRY.keys())

    @classmethod
    def needs_features(cls, kind: str) -> bool:
        return cls.resolve(kind) == 'cos-common'


def score(sc: BaseScorer, g: Graph, u: int, v: int) -> float:
    return sc.score(g, u, v)


def batch_score(sc: BaseScorer, g: Graph, pairs: Sequence[Tuple[int, int]],
                n_jobs: int = 1, batch_size: int = DEFAULT_BATCH_SIZE) -> np.ndarray:
    """
    Score pairs in fixed-size chunks, optionally across worker threads.

    Output order follows `pairs`; results are identical for any `n_jobs`.
    """
    arr = as_pairs(pairs)
    sc.check_inputs(g, arr)
    if len(arr) == 0:
        return np.empty(0, dtype=np.float64)
    chunks = [arr[i:i + batch_size] for i in range(0, len(arr), batch_size)]
    if n_jobs == 1 or len(chunks) == 1:
        parts = [sc.score_pairs(g, chunk) for chunk in chunks]
    else:
        logger.debug("Scoring %d pairs in %d chunks with %d workers", len(arr), len(chunks), n_jobs)
        parts = Parallel(n_jobs=n_jobs, prefer="threads")(delayed(sc.score_pairs)(g, chunk) for chunk in chunks)
    return np.concatenate(parts)

"""
Proposal-set augmented link prediction.

Build a graph, pick candidate edges with a filtering scorer, add the best of
them to the graph and rank held-out edges with a ranking scorer.
"""

__version__ = "0.1.0"

from .errors import (ConfigurationError, EdgeProposalError, GraphValidationError, InfeasibleSamplingError,
                     SplitError)
from .evaluation import FilterRankOptions, FilterRankPipeline, filter_and_rank, hits_at_k, target_size_search
from .graph import EdgeList, Graph, augment, build_graph, common_neighbors
from .models import ScorerFactory, batch_score, score
from .proposal import ProposalSet, enumerate_starting_set, filter_top_k, force_include, target_size_grid

__all__ = [
    'ConfigurationError',
    'EdgeProposalError',
    'GraphValidationError',
    'InfeasibleSamplingError',
    'SplitError',
    'FilterRankOptions',
    'FilterRankPipeline',
    'filter_and_rank',
    'hits_at_k',
    'target_size_search',
    'EdgeList',
    'Graph',
    'augment',
    'build_graph',
    'common_neighbors',
    'ScorerFactory',
    'batch_score',
    'score',
    'ProposalSet',
    'enumerate_starting_set',
    'filter_top_k',
    'force_include',
    'target_size_grid',
]

"""
Exception hierarchy. Everything derives from ValueError so callers that only
expect the usual bad-input error keep working.
"""


class EdgeProposalError(ValueError):
    """Base class for all library errors."""


class GraphValidationError(EdgeProposalError):
    """Malformed graph input, e.g. an endpoint outside the node range."""


class SplitError(EdgeProposalError):
    """Edge split could not be built or violates its invariants."""


class InfeasibleSamplingError(EdgeProposalError):
    """Not enough candidate node pairs to draw the requested sample."""

    def __init__(self, message: str, requested: int, available: int):
        super().__init__(f"{message} (requested={requested}, available={available})")
        self.requested = requested
        self.available = available


class ConfigurationError(EdgeProposalError):
    """Invalid run configuration or environment setting."""

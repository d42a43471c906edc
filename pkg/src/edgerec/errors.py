"""Shared exception types."""


class EdgerecError(Exception):
    """Base class for all library errors."""


class DataValidationError(EdgerecError, ValueError):
    """Input breaks a documented contract (bad graph, negative activity, malformed file)."""


class ZeroVarianceError(EdgerecError, ValueError):
    """A correlation or mixing coefficient was requested for data with no variance."""


class DegenerateTruthError(EdgerecError, ValueError):
    """ROC truth labels are all-positive or all-negative."""

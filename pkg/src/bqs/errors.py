"""Exception types shared across the toolkit."""


class TrajectoryError(Exception):
    """Base class for all toolkit errors."""


class DegenerateAngle(TrajectoryError):
    """Polar angle requested for two coincident points."""


class TimeOrder(TrajectoryError):
    """Timestamps must be strictly increasing within a stream."""


class ToleranceOrder(TrajectoryError):
    """A re-compression tolerance must exceed the existing tolerance."""


class NeedsVelocity(TrajectoryError):
    """Dead reckoning requires per-point velocity annotations."""


class UnknownShape(TrajectoryError):
    """Requested synthetic shape is not one of the known kinds."""


class EmptyInput(TrajectoryError):
    """A metric or generator was invoked on empty input."""


class OutOfRange(TrajectoryError):
    """A query timestamp lies outside the reconstructable range."""


class StorageExhausted(TrajectoryError):
    """The amnesic store cannot free a slot even by sinking."""


class NoSuchGeneration(TrajectoryError):
    """Partial index update targeted a generation with no entry."""

"""Exception hierarchy shared by every motiontok module."""


class MotionTokError(Exception):
    """Base class for all library errors."""


class ValidationError(MotionTokError, ValueError):
    """An input violates a documented invariant."""


class FormatError(MotionTokError):
    """A file does not conform to its on-disk format."""


class TruncatedFileError(FormatError):
    """A binary dump ended before its declared payload."""


class DegenerateFeatureError(ValidationError):
    """A feature map has (near) zero Euclidean norm."""

    def __init__(self, message, frame_index=None):
        super().__init__(message)
        self.frame_index = frame_index


class TooFewFramesError(ValidationError):
    """Not enough frames for the requested computation."""


class InfeasibleKError(ValidationError):
    """The requested number of events cannot be produced."""

    def __init__(self, message, max_feasible_k):
        super().__init__(message)
        self.max_feasible_k = max_feasible_k


class PoolingShapeError(ValidationError):
    """Pooling stride does not divide the spatial grid."""


class RangeError(ValidationError):
    """A value lies outside its admissible interval."""


class PipelineError(MotionTokError):
    """An external scorer failed while filtering annotations."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}

"""Exception hierarchy.

Every failure mode raised by the library derives from :class:`VnregError`,
so callers (and the CLI exit-code mapping) can distinguish configuration,
pipeline, and I/O problems without string matching.
"""


class VnregError(Exception):
    """Base class for all library errors."""


class ValidationError(VnregError):
    """A spec/parameter object violates its invariants."""


class FeasibilityError(ValidationError):
    """An edge probability falls outside [0, 1]."""


class RankError(VnregError):
    """Requested embedding dimension exceeds the numerical rank."""


class DegenerateSpectrumError(VnregError):
    """A zero eigenvalue appears among the retained spectral components."""


class RangeError(VnregError):
    """Requested elbow (or similar index) lies beyond the available profile."""


class ConvergenceError(VnregError):
    """An iterative fit failed on every restart."""


class DegenerateClusteringError(VnregError):
    """Robust clustering labeled every point as noise."""


class DimensionError(VnregError):
    """Matrix shapes are incompatible (e.g. K1 > K2 in matching)."""


class SizeError(VnregError):
    """An input is too large (or would become too small) for the operation."""


class TrimError(VnregError):
    """Block trimming could not retain a usable vertex set."""


class QueryError(VnregError):
    """A nomination query vertex is unusable (e.g. unclustered)."""


class CoverageError(VnregError):
    """Ground truth does not cover every query."""


class ParseError(VnregError):
    """A text input failed to parse; carries the offending line number."""

    def __init__(self, message: str, path=None, line: int | None = None):
        loc = ""
        if path is not None:
            loc += f"{path}:"
        if line is not None:
            loc += f"{line}:"
        super().__init__(f"{loc} {message}" if loc else message)
        self.path = path
        self.line = line


class ConfigError(VnregError):
    """An experiment configuration file is invalid."""


class DegenerateRowError(VnregError):
    """A zero-norm row cannot be projected to the sphere."""


class AlignmentWarning(UserWarning):
    """Warns that a Procrustes alignment is non-unique (rank-deficient cross-product)."""

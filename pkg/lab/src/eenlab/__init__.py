"""Learning experiments over the `een` CLI's file exports.

This package never recomputes grid/word quantities itself: every image
and word map it touches is produced by the `een` command-line tool and
carries that tool's manifest line, which the loaders verify.
"""

__version__ = "0.1.0"


class LabError(Exception):
    """Base class for lab errors."""


class InsufficientData(LabError):
    """Dataset too small for the requested experiment."""


class TooFewVectors(LabError):
    """Embedding needs at least 5 vectors."""


class MissingProvenance(LabError):
    """Input file lacks the primary tool's manifest line."""

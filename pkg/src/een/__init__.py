"""Essential-element network analysis of audio.

Encodes audio into a scale-time-volume grid, links pixels whose
information distance falls below a threshold, treats each pixel's
clustering coefficient as a word, and searches weight/threshold
combinations for the one that best organizes the word statistics
into a rank-frequency power law.
"""

__version__ = "0.1.0"

from een.errors import (
    AllSilent,
    DegenerateSample,
    EenError,
    EmptyGrid,
    EmptyInput,
    EmptySet,
    EmptyWordMap,
    InsufficientData,
    NoQualifyingCombo,
    NotNormalized,
    SampleRateTooLow,
    TooFewPoints,
    UnsupportedCharacter,
    UnsupportedFormat,
)

__all__ = [
    "__version__",
    "EenError",
    "UnsupportedFormat",
    "SampleRateTooLow",
    "EmptyInput",
    "AllSilent",
    "EmptyGrid",
    "EmptyWordMap",
    "InsufficientData",
    "NoQualifyingCombo",
    "NotNormalized",
    "DegenerateSample",
    "TooFewPoints",
    "EmptySet",
    "UnsupportedCharacter",
]

"""Exception types shared across the pipeline."""


class EenError(Exception):
    """Base class for every error raised by this package."""


class UnsupportedFormat(EenError):
    """Input file is not RIFF/WAVE PCM or uses a compressed codec."""


class SampleRateTooLow(EenError):
    """Nyquist frequency does not cover the top scale bin."""


class EmptyInput(EenError):
    """An operation received zero samples."""


class AllSilent(EenError):
    """No strictly positive power anywhere in the grid."""


class EmptyGrid(EenError):
    """Grid holds no active pixels."""


class EmptyWordMap(EenError):
    """Word map holds no words."""


class InsufficientData(EenError):
    """Fewer usable points than the operation needs."""


class NotNormalized(EenError):
    """Probability vector has negative entries or does not sum to 1."""


class DegenerateSample(EenError):
    """Sample too small or with zero variance."""


class TooFewPoints(EenError):
    """Point set smaller than the minimum for a pairwise statistic."""


class EmptySet(EenError):
    """Score point set is empty."""


class UnsupportedCharacter(EenError):
    """Character outside the International Morse table."""


class NoQualifyingCombo(EenError):
    """No weight combination passed the fit-quality bar.

    Carries the full sweep so callers can inspect near-misses.
    """

    def __init__(self, message: str, results=None):
        super().__init__(message)
        self.results = results if results is not None else []

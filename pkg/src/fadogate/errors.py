"""Exception types raised across the package.

Every error that callers are expected to catch derives from FadogateError,
so CLI code can report any pipeline failure with one except clause.
"""


class FadogateError(Exception):
    """Base class for all fadogate errors."""


# --- audio decoding / buffers ---

class NotWavError(FadogateError):
    """File is not a RIFF/WAVE container or its format chunk is broken."""


class UnsupportedEncodingError(FadogateError):
    """WAV encoding other than 16-bit integer PCM with 1 or 2 channels."""


class TruncatedDataError(FadogateError):
    """WAV data chunk holds fewer bytes than its header declares."""


class UpsampleRequestedError(FadogateError):
    """Target rate above the source rate; only downsampling is supported."""


class EmptyInputError(FadogateError):
    """Operation needs at least one sample."""


class SilentInputError(FadogateError):
    """Signal RMS below the silence floor; cannot be RMS-normalized."""


# --- framing / spectra ---

class InputShorterThanFrameError(FadogateError):
    """Signal shorter than one analysis frame."""


class BadFftSizeError(FadogateError):
    """FFT size is not a power of two, or smaller than the frame."""


class EmptyBandError(FadogateError):
    """No FFT bin center falls inside the requested frequency band."""


class DegenerateFilterError(FadogateError):
    """Two adjacent mel filter centers collapse onto the same FFT bin."""


# --- svm / datasets ---

class EmptyDatasetError(FadogateError):
    """Dataset holds no rows."""


class SingleClassDatasetError(FadogateError):
    """Training needs both class labels present."""


class DimensionMismatchError(FadogateError):
    """Vectors of unequal dimension where equal dimension is required."""


class NonPositiveParameterError(FadogateError):
    """A parameter that must be > 0 (e.g. C) is zero or negative."""


class NonPositiveGammaError(NonPositiveParameterError):
    """RBF kernel width gamma must be > 0."""


# --- evaluation ---

class TooFewItemsError(FadogateError):
    """Not enough items per class for the requested fold count."""


class DegenerateSplitError(FadogateError):
    """A train/test split left one side empty."""


class LengthMismatchError(FadogateError):
    """Paired sequences of unequal length."""


# --- file formats ---

class FileFormatError(FadogateError):
    """A manifest, cache, or model file does not parse.

    Carries the offending line number when one is known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line

"""
Exceptions raised across the package. Every error the toolkit signals
derives from `NumtaprepError`, so callers can catch the whole family.
"""

from typing import NamedTuple


class NumtaprepError(Exception):
    pass


class ConfigError(NumtaprepError):
    """
    Raised when a configuration mapping has an unknown key or
    a value violating its invariant.
    """
    pass

##
# Rasters
#

class InvalidImage(NumtaprepError):
    """
    Raised when an array is not a valid 8-bit gray or RGB raster.
    """
    pass

class ZeroDimension(NumtaprepError):
    pass

class EvenKernel(NumtaprepError):
    pass

class KernelTooLarge(NumtaprepError):
    pass

class DegenerateHistogram(NumtaprepError):
    """
    Raised by Otsu's method when fewer than two distinct
    intensity values occur.
    """
    pass

##
# Contours
#

class EmptyContour(NumtaprepError):
    pass

class OutOfBounds(NumtaprepError):
    pass

class NoForeground(NumtaprepError):
    """
    Raised when a binary image holds no foreground pixel at all.
    """
    pass

class BlankImage(NoForeground):
    """
    Raised by the pipeline when the binarized image turned out
    empty, so there is no digit to crop.
    """
    pass

##
# Corpora and files
#

class MissingColumn(NumtaprepError):
    pass

class MalformedCsv(NumtaprepError):
    pass

class UnsupportedFormat(NumtaprepError):
    pass

class Truncated(NumtaprepError):
    pass

class CorpusMismatch(NumtaprepError):
    """
    Raised when the two pathways of a benchmark do not list
    the same image stems.
    """
    pass

##
# Learners
#

class EmptyTrainingSet(NumtaprepError):
    pass

class EmptyTestSet(NumtaprepError):
    pass

class SingleClass(NumtaprepError):
    pass

class RankDeficient(UserWarning):
    """
    Warning category used when PCA finds fewer positive-variance
    directions than requested.
    """
    pass

class UnsupportedModelType(NumtaprepError):
    """
    Exception which is thrown when an unknown model name
    is provided somewhere.
    """
    pass

class ModelFormatError(NumtaprepError):
    pass

class ModelVersionError(ModelFormatError):
    pass


class ItemError(NamedTuple):
    """
    Per-item failure record produced by batch operations.
    """
    index: int
    filename: str
    kind: str
    message: str

    @staticmethod
    def of(index: int, filename: str, exc: BaseException) -> 'ItemError':
        return ItemError(index, filename, type(exc).__name__, str(exc))

"""
Threshold selection and the majority-rule polarity normalization that
forces background to 0 and foreground to 255.
"""
import logging
import numpy as np

from typing import NamedTuple, Tuple

from .constants import NUMTAPREP_LOGGER, FIXED_LEVEL, BACKGROUND, FOREGROUND
from .errors import DegenerateHistogram, ConfigError
from .raster import GrayImage, BinaryImage, as_gray

logger = logging.getLogger(NUMTAPREP_LOGGER)

THRESHOLD_MODES = ('fixed', 'otsu')


class ThresholdDecision(NamedTuple):
    level: int
    majority_low: bool


def histogram(img: GrayImage) -> np.ndarray:
    """
    256-bin intensity histogram of a gray image.
    """
    img = as_gray(img)
    return np.bincount(img.ravel(), minlength=256).astype(np.int64)

def otsu_threshold(hist) -> int:
    """
    Otsu's threshold: the smallest t in [0, 254] maximizing the
    between-class variance, with class 0 being values <= t.

    Up to the constant factor 1/N^2 the variance equals
    (s0*n1 - s1*n0)^2 / (n0*n1), where n and s are the class pixel
    counts and intensity sums. It is compared as an exact rational
    so that plateaus of equal variance tie exactly.
    """
    counts = [int(c) for c in np.asarray(hist).ravel()]
    if len(counts) != 256:
        raise ValueError(f'histogram must have 256 bins, got {len(counts)}')
    if sum(1 for c in counts if c > 0) < 2:
        raise DegenerateHistogram('histogram holds fewer than two distinct values')

    total_n = sum(counts)
    total_s = sum(v * c for v, c in enumerate(counts))

    best_t, best_num, best_den = 0, 0, 1
    n0 = s0 = 0
    for t in range(255):
        n0 += counts[t]
        s0 += t * counts[t]
        n1 = total_n - n0
        if n0 == 0 or n1 == 0:
            continue
        s1 = total_s - s0
        num = (s0 * n1 - s1 * n0) ** 2
        den = n0 * n1
        if num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    return best_t

def decide_polarity(img: GrayImage, level: int = FIXED_LEVEL) -> ThresholdDecision:
    img = as_gray(img)
    low = int(np.count_nonzero(img < level))
    high = img.size - low
    return ThresholdDecision(int(level), low > high)

def polarity_binarize(img: GrayImage, level: int = FIXED_LEVEL) -> BinaryImage:
    """
    Splits pixels at `level` into a low side (< level) and a high
    side (>= level). The majority side becomes background 0 and the
    minority side foreground 255; on an exact tie the high side is
    background.
    """
    img = as_gray(img)
    decision = decide_polarity(img, level)
    low_mask = img < level
    fg = ~low_mask if decision.majority_low else low_mask
    return BinaryImage(np.where(fg, FOREGROUND, BACKGROUND).astype(np.uint8))

def threshold_level(img: GrayImage, mode: str = 'fixed', fixed_level: int = FIXED_LEVEL) -> int:
    """
    Level handed to `polarity_binarize`. In Otsu mode the returned
    level is t + 1 so that the low side is exactly Otsu's class 0;
    a constant image falls back to `fixed_level`.
    """
    if mode == 'fixed':
        return int(fixed_level)
    elif mode == 'otsu':
        try:
            return otsu_threshold(histogram(img)) + 1
        except DegenerateHistogram:
            logger.debug(f'constant image in otsu mode, using fixed level {fixed_level}')
            return int(fixed_level)
    else:
        raise ConfigError(f'unsupported threshold mode: {mode}')

def binarize(img: GrayImage, mode: str = 'fixed',
             fixed_level: int = FIXED_LEVEL) -> Tuple[BinaryImage, ThresholdDecision]:
    level = threshold_level(img, mode, fixed_level)
    return polarity_binarize(img, level), decide_polarity(img, level)

"""
The fixed cleaning dataflow: resize, grayscale, median blur, spot
removal, polarity binarization and largest-contour crop, producing
canonical white-on-black square digits.

The stage order is hard-coded; spot removal is the only stage that
can be switched off.
"""
import logging
import multiprocessing as mp
import numpy as np
import yaml

from dataclasses import dataclass, field, fields, asdict
from pathlib import Path
from tqdm import tqdm
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .binarize import THRESHOLD_MODES, ThresholdDecision, binarize
from .constants import NUMTAPREP_LOGGER, TARGET_SIZE, FIXED_LEVEL, DARK_LEVEL, BACKGROUND
from .contours import Contour, Rect, SpotCriteria, detect_quad_spots, remove_spots, largest_contour_bbox
from .errors import BlankImage, ConfigError, ItemError, NoForeground, NumtaprepError
from .pnm import write_image
from .raster import (AnyImage, BinaryImage, GrayImage, as_image, crop, median_blur,
                     pad_border, pad_to_square, resize, resize_nearest, to_grayscale)

logger = logging.getLogger(NUMTAPREP_LOGGER)


@dataclass(frozen=True)
class PipelineConfig:
    target_size: int = TARGET_SIZE
    median_k: int = 3
    threshold_mode: str = 'fixed'
    fixed_level: int = FIXED_LEVEL
    spot_criteria: SpotCriteria = field(default_factory=SpotCriteria)
    spot_removal_enabled: bool = True
    crop_margin: int = 2
    final_interp: str = 'nearest'
    dark_level: int = DARK_LEVEL

    def __post_init__(self):
        if self.target_size < 8:
            raise ConfigError(f'pipeline.target_size must be at least 8, got {self.target_size}')
        if self.median_k < 1 or self.median_k % 2 == 0:
            raise ConfigError(f'pipeline.median_k must be odd and positive, got {self.median_k}')
        if self.median_k > self.target_size:
            raise ConfigError('pipeline.median_k cannot exceed pipeline.target_size')
        if self.threshold_mode not in THRESHOLD_MODES:
            raise ConfigError(f'pipeline.threshold_mode must be one of {THRESHOLD_MODES}')
        if not 0 <= self.fixed_level <= 255:
            raise ConfigError('pipeline.fixed_level must lie in [0, 255]')
        if not 0 <= self.dark_level <= 255:
            raise ConfigError('pipeline.dark_level must lie in [0, 255]')
        if not 0 <= 2 * self.crop_margin < self.target_size:
            raise ConfigError('pipeline.crop_margin must satisfy 0 <= 2 * margin < target_size')
        if self.final_interp != 'nearest':
            raise ConfigError('pipeline.final_interp only supports "nearest"')
        self.spot_criteria.validate()

    @staticmethod
    def from_dict(pipeline: Optional[Dict[str, Any]] = None,
                  spot: Optional[Dict[str, Any]] = None) -> 'PipelineConfig':
        pipeline = dict(pipeline or {})
        known = {f.name for f in fields(PipelineConfig)} - {'spot_criteria'}
        unknown = set(pipeline) - known
        if unknown:
            raise ConfigError(f'unknown pipeline option(s): {", ".join(sorted(unknown))}')
        spot = dict(spot or {})
        unknown = set(spot) - set(SpotCriteria._fields)
        if unknown:
            raise ConfigError(f'unknown spot option(s): {", ".join(sorted(unknown))}')
        return PipelineConfig(spot_criteria=SpotCriteria(**spot), **pipeline)

    def to_dict(self) -> Dict[str, Any]:
        dct = asdict(self)
        dct.pop('spot_criteria')
        return {'pipeline': dct, 'spot': dict(self.spot_criteria._asdict())}


@dataclass
class StageTrace:
    """
    What happened to one image on its way through the dataflow.
    Snapshots are only filled when requested.
    """
    resized: Optional[AnyImage] = None
    gray: Optional[GrayImage] = None
    blurred: Optional[GrayImage] = None
    despotted: Optional[GrayImage] = None
    binary: Optional[BinaryImage] = None
    final: Optional[BinaryImage] = None
    crop: Optional[Rect] = None
    spots: List[Contour] = field(default_factory=list)
    threshold: Optional[ThresholdDecision] = None

    def snapshots(self) -> List[Tuple[str, np.ndarray]]:
        stages = [('00_resize', self.resized), ('01_gray', self.gray),
                  ('02_blur', self.blurred), ('03_spots', self.despotted),
                  ('04_binary', self.binary), ('05_final', self.final)]
        return [(name, img) for name, img in stages if img is not None]

    def summary(self) -> Dict[str, Any]:
        return {
            'threshold_level': None if self.threshold is None else self.threshold.level,
            'majority_low': None if self.threshold is None else self.threshold.majority_low,
            'crop': None if self.crop is None else dict(self.crop._asdict()),
            'spots': [[list(p) for p in c.as_tuples()] for c in self.spots],
        }


def crop_to_square(binary: BinaryImage, rect: Rect, cfg: PipelineConfig) -> BinaryImage:
    """
    Cuts `rect` out of the binary image, pads it to a centered square
    and scales it so that it spans target_size - 2 * crop_margin
    pixels, then surrounds it with a background margin.
    """
    square = pad_to_square(crop(binary, rect.x, rect.y, rect.w, rect.h), BACKGROUND)
    inner = cfg.target_size - 2 * cfg.crop_margin
    return BinaryImage(pad_border(resize_nearest(square, inner, inner), cfg.crop_margin, BACKGROUND))

def preprocess(img: AnyImage, cfg: Optional[PipelineConfig] = None,
               snapshots: bool = True) -> Tuple[BinaryImage, StageTrace]:
    cfg = cfg or PipelineConfig()
    img = as_image(img)
    size = cfg.target_size
    trace = StageTrace()

    resized = resize(img, size, size)
    gray = to_grayscale(resized)
    blurred = median_blur(gray, cfg.median_k)

    if cfg.spot_removal_enabled:
        trace.spots = detect_quad_spots(blurred, cfg.spot_criteria, cfg.dark_level)
        despotted = remove_spots(blurred, trace.spots, 255)
    else:
        despotted = blurred

    binary, trace.threshold = binarize(despotted, cfg.threshold_mode, cfg.fixed_level)
    if snapshots:
        trace.resized, trace.gray, trace.blurred = resized, gray, blurred
        trace.despotted, trace.binary = despotted, binary

    try:
        trace.crop = largest_contour_bbox(binary)
    except NoForeground:
        raise BlankImage(f'no foreground left after binarization at level {trace.threshold.level}')

    final = crop_to_square(binary, trace.crop, cfg)
    if snapshots:
        trace.final = final
    return final, trace

def raw_baseline(img: AnyImage, cfg: Optional[PipelineConfig] = None) -> GrayImage:
    """
    Comparison pathway: resize and grayscale only.
    """
    cfg = cfg or PipelineConfig()
    return to_grayscale(resize(as_image(img), cfg.target_size, cfg.target_size))

##
# Batches
#

def _preprocess_item(args):
    index, name, img, cfg, snapshots = args
    try:
        return preprocess(img, cfg, snapshots)
    except NumtaprepError as e:
        logger.debug(f'item {index} ({name}) skipped: {type(e).__name__}: {e}')
        return ItemError.of(index, name, e)

def preprocess_batch(inputs: Sequence[AnyImage], cfg: Optional[PipelineConfig] = None,
                     names: Optional[Sequence[str]] = None, workers: int = 1,
                     with_traces: bool = False, snapshots: bool = False,
                     progress: bool = False) -> List[Union[BinaryImage, Tuple[BinaryImage, StageTrace], ItemError]]:
    """
    Runs `preprocess` over every input independently. The result has
    one entry per input, in input order: the output image (or an
    (image, trace) pair with `with_traces`) or an `ItemError`.
    """
    cfg = cfg or PipelineConfig()
    names = list(names) if names is not None else [str(i) for i in range(len(inputs))]
    jobs = [(i, names[i], img, cfg, snapshots) for i, img in enumerate(inputs)]

    if workers > 1 and len(jobs) > 1:
        with mp.Pool(workers) as pool:
            results = list(tqdm(pool.imap(_preprocess_item, jobs, chunksize=16),
                                total=len(jobs), disable=not progress, desc='preprocess'))
    else:
        results = [_preprocess_item(job) for job in tqdm(jobs, disable=not progress, desc='preprocess')]

    n_failed = sum(isinstance(r, ItemError) for r in results)
    logger.info(f'preprocessed {len(results) - n_failed} of {len(results)} image(s)')
    if with_traces:
        return results
    return [r if isinstance(r, ItemError) else r[0] for r in results]

def write_trace(trace: StageTrace, directory: Union[str, Path]):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, img in trace.snapshots():
        suffix = 'ppm' if img.ndim == 3 else 'pgm'
        write_image(img, directory / f'{name}.{suffix}')
    with open(directory / 'trace.yaml', 'w') as f:
        yaml.safe_dump(trace.summary(), f, default_flow_style=None, sort_keys=False)

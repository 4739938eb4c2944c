"""
Labeled corpora: loading NumtaDB-style CSV + image directories,
deterministic train/test splitting, and a synthetic noisy-digit
generator standing in for the real archive.
"""
import logging
import math
import numpy as np
import pandas as pd
import scipy.ndimage as ndi

from dataclasses import dataclass, field, fields
from numpy.lib.stride_tricks import sliding_window_view
from pathlib import Path
from typing import Any, Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from .constants import NUMTAPREP_LOGGER, TRAIN_FRAC, DIGITS
from .errors import (ConfigError, ItemError, MalformedCsv, MissingColumn,
                     NumtaprepError, UnsupportedFormat)
from .glyphs import GLYPHS, ink_mask, place
from .pnm import read_image, write_image
from .raster import AnyImage, as_image, is_rgb, sample_positions
from .utils import file_stem, round_half_up

logger = logging.getLogger(NUMTAPREP_LOGGER)

Polygon = Tuple[Tuple[int, int], ...]

PathLike = Union[str, Path]


class LabeledImage(NamedTuple):
    image: AnyImage
    label: int
    source_tag: str
    filename: str
    spot: Optional[Polygon] = None


@dataclass
class LabeledDataset:
    items: List[LabeledImage] = field(default_factory=list)
    errors: List[ItemError] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for it in self.items:
            if it.label not in DIGITS:
                raise ValueError(f'{it.filename}: label {it.label} is not a digit')
            if it.filename in seen:
                raise ValueError(f'duplicate filename {it.filename}')
            seen.add(it.filename)

    def __len__(self):
        return len(self.items)

    def __iter__(self) -> Iterator[LabeledImage]:
        return iter(self.items)

    def __getitem__(self, idx) -> LabeledImage:
        return self.items[idx]

    @property
    def images(self) -> List[AnyImage]:
        return [it.image for it in self.items]

    @property
    def labels(self) -> np.ndarray:
        return np.array([it.label for it in self.items], dtype=np.int64)

    @property
    def filenames(self) -> List[str]:
        return [it.filename for it in self.items]

    @property
    def stems(self) -> List[str]:
        return [file_stem(it.filename) for it in self.items]

    def subset(self, indices: Sequence[int]) -> 'LabeledDataset':
        return LabeledDataset([self.items[i] for i in indices])


@dataclass(frozen=True)
class SplitSpec:
    train_frac: float = TRAIN_FRAC
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.train_frac <= 1:
            raise ConfigError(f'train_frac must lie in (0, 1], got {self.train_frac}')
        if self.seed < 0:
            raise ConfigError('split seed must be a non-negative integer')

##
# Loading
#

def _read_png(path: Path) -> AnyImage:
    # NumtaDB ships PNG; matplotlib is only needed for this adapter
    from matplotlib import image as mpimg

    arr = mpimg.imread(str(path))
    if arr.dtype.kind == 'f':
        arr = round_half_up(arr * 255.0)
    if arr.ndim == 3:
        if arr.shape[2] == 1:
            arr = arr[:, :, 0]
        else:
            arr = arr[:, :, :3]
    return as_image(arr)

def read_labeled_image(path: PathLike) -> AnyImage:
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix in ('.pgm', '.ppm', '.pnm'):
        return read_image(path)
    elif suffix == '.png':
        if not path.exists():
            raise FileNotFoundError(f'no such file: {path}')
        return _read_png(path)
    else:
        raise UnsupportedFormat(f'unsupported image file type "{suffix}" of {path.name}')

def format_spot(spot: Optional[Polygon]) -> str:
    if not spot:
        return ''
    return ';'.join(f'{x} {y}' for x, y in spot)

def parse_spot(text: str) -> Optional[Polygon]:
    text = (text or '').strip()
    if not text:
        return None
    try:
        return tuple(tuple(int(v) for v in p.split()) for p in text.split(';'))
    except ValueError:
        raise MalformedCsv(f'malformed spot polygon "{text}"')

def load_labeled(csv_path: PathLike, image_dir: Optional[PathLike] = None,
                 filename_col: str = 'filename', label_col: str = 'digit',
                 source_col: Optional[str] = None, spot_col: str = 'spot',
                 status_col: str = 'status') -> LabeledDataset:
    """
    One item per CSV row. Rows whose image cannot be read, whose
    label is not a digit, or which a preprocessing manifest marks as
    not ok, end up in `errors` instead of aborting the load.
    """
    csv_path = Path(csv_path)
    image_dir = Path(image_dir) if image_dir is not None else csv_path.parent
    try:
        frame = pd.read_csv(csv_path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise MalformedCsv(f'{csv_path}: {e}')

    required = [filename_col, label_col] + ([source_col] if source_col else [])
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise MissingColumn(f'{csv_path}: missing column(s) {", ".join(missing)}')

    items, errors, seen = [], [], set()
    for idx, row in enumerate(frame.to_dict('records')):
        name = row[filename_col].strip()
        status = row.get(status_col, '').strip()
        if status not in ('', 'ok'):
            errors.append(ItemError(idx, name, 'Skipped', row.get('error', '') or status))
            continue
        try:
            try:
                label = int(row[label_col])
            except ValueError:
                raise MalformedCsv(f'label "{row[label_col]}" is not an integer')
            if label not in DIGITS:
                raise MalformedCsv(f'label {label} is not a digit')
            if name in seen:
                raise MalformedCsv(f'duplicate filename {name}')
            image = read_labeled_image(image_dir / name)
            spot = parse_spot(row.get(spot_col, ''))
        except (NumtaprepError, FileNotFoundError) as e:
            logger.debug(f'row {idx} ({name}) not loaded: {e}')
            errors.append(ItemError.of(idx, name, e))
            continue
        seen.add(name)
        source = row[source_col] if source_col else csv_path.stem
        items.append(LabeledImage(image, label, source, name, spot))

    logger.info(f'loaded {len(items)} image(s) from {csv_path}, {len(errors)} row(s) failed')
    return LabeledDataset(items, errors)

def write_corpus(ds: LabeledDataset, out_dir: PathLike, csv_name: str = 'labels.csv') -> Path:
    """
    Writes every image under `out_dir` at its (relative) filename and
    a label file with columns filename, digit, source, spot.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for it in ds:
        path = out_dir / it.filename
        path.parent.mkdir(parents=True, exist_ok=True)
        write_image(it.image, path)
    frame = pd.DataFrame({
        'filename': ds.filenames,
        'digit': [it.label for it in ds],
        'source': [it.source_tag for it in ds],
        'spot': [format_spot(it.spot) for it in ds],
    }, columns=['filename', 'digit', 'source', 'spot'])
    csv_path = out_dir / csv_name
    frame.to_csv(csv_path, index=False)
    return csv_path

##
# Splitting
#

def split(ds: LabeledDataset, spec: SplitSpec) -> Tuple[LabeledDataset, LabeledDataset]:
    """
    Seeded shuffle, then the first ceil(train_frac * N) items go to
    train. Items are put in filename-stem order before shuffling, so
    corpora sharing stems get the same partition whatever their
    loading order.
    """
    n = len(ds)
    order = sorted(range(n), key=lambda i: (file_stem(ds[i].filename), ds[i].filename))
    perm = np.random.default_rng(spec.seed).permutation(n)
    n_train = math.ceil(round(spec.train_frac * n, 9))
    picked = [order[p] for p in perm]
    return ds.subset(picked[:n_train]), ds.subset(picked[n_train:])

##
# Synthetic corpus
#

INK_COLORS = ((20, 40, 180), (20, 120, 40), (170, 20, 20), (200, 90, 0))

REFERENCE_SIZE = 64


@dataclass(frozen=True)
class SynthConfig:
    """
    Lengths (`stroke_width`, spot extents, `spot_margin`) are given in
    pixels of a 64-pixel canvas and scale with `size`.
    """
    count: int = 100
    seed: int = 0
    salt_pepper_rate: float = 0.05
    spot_probability: float = 0.3
    invert_probability: float = 0.3
    jitter: float = 0.08
    grid_lines_probability: float = 0.1
    color_probability: float = 0.0
    size: int = REFERENCE_SIZE
    stroke_width: float = 3.0
    glyph_box: float = 0.5
    spot_min: int = 12
    spot_max: int = 18
    spot_margin: float = 8.0

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError('synth.count must be at least 1')
        for name in ('salt_pepper_rate', 'spot_probability', 'invert_probability',
                     'grid_lines_probability', 'color_probability'):
            if not 0 <= getattr(self, name) <= 1:
                raise ConfigError(f'synth.{name} must lie in [0, 1]')
        if not 0 <= self.jitter < 0.5:
            raise ConfigError('synth.jitter must lie in [0, 0.5)')
        if self.size < 8:
            raise ConfigError('synth.size must be at least 8')
        if not 1 <= self.spot_min <= self.spot_max:
            raise ConfigError('synth.spot_min must not exceed synth.spot_max')
        if self.stroke_width <= 0 or not 0 < self.glyph_box <= 1:
            raise ConfigError('synth.stroke_width and synth.glyph_box must be positive')

    @staticmethod
    def from_dict(dct: Optional[Dict[str, Any]] = None) -> 'SynthConfig':
        dct = dict(dct or {})
        unknown = set(dct) - {f.name for f in fields(SynthConfig)}
        if unknown:
            raise ConfigError(f'unknown synth option(s): {", ".join(sorted(unknown))}')
        return SynthConfig(**dct)

    def scaled(self, length: float) -> float:
        return length * self.size / REFERENCE_SIZE


def _spot_position(free: np.ndarray, w: int, h: int, u: float) -> Optional[Tuple[int, int]]:
    if w > free.shape[1] or h > free.shape[0]:
        return None
    fits = sliding_window_view(free, (h, w)).all(axis=(2, 3))
    candidates = np.argwhere(fits)
    if len(candidates) == 0:
        return None
    y, x = candidates[min(int(u * len(candidates)), len(candidates) - 1)]
    return int(x), int(y)

def _render(label: int, cfg: SynthConfig, rngs: Sequence[np.random.Generator]) -> Tuple[np.ndarray, Optional[Polygon]]:
    """
    Draws one corrupted glyph. Each corruption has its own random
    stream and always consumes the same draws, so switching one
    probability leaves the rest of the image untouched.
    """
    g_rng, paper_rng, ink_rng, inv_rng, spot_rng, noise_rng = rngs
    size = cfg.size

    scale = 1.0 + g_rng.uniform(-cfg.jitter, cfg.jitter)
    shift = g_rng.uniform(-cfg.jitter, cfg.jitter, 2) * size
    center = ((size - 1) / 2.0 + shift[0], (size - 1) / 2.0 + shift[1])

    paper = paper_rng.integers(225, 256)
    grid_u, grid_vertical_u = paper_rng.random(2)
    grid_spacing = paper_rng.integers(max(size // 8, 2), max(size // 5, 3) + 1)
    grid_offset = paper_rng.integers(0, grid_spacing)
    grid_value = paper_rng.integers(180, 216)

    ink = ink_rng.integers(0, 41)
    color_u = ink_rng.random()
    color = INK_COLORS[ink_rng.integers(0, len(INK_COLORS))]

    invert_u = inv_rng.random()

    spot_u, spot_pos_u = spot_rng.random(2)
    spot_w, spot_h = spot_rng.integers(cfg.spot_min, cfg.spot_max + 1, 2)
    spot_value = spot_rng.integers(0, 31)

    noise_u = noise_rng.random((size, size))
    salt = noise_rng.random((size, size)) < 0.5

    img = np.full((size, size), paper, dtype=np.uint8)
    if grid_u < cfg.grid_lines_probability:
        thickness = max(1, int(round(cfg.scaled(1))))
        for t in range(thickness):
            img[grid_offset + t::grid_spacing, :] = grid_value
            if grid_vertical_u < 0.5:
                img[:, grid_offset + t::grid_spacing] = grid_value

    mask = ink_mask(place(GLYPHS[label], cfg.glyph_box * size * scale, center),
                    size, cfg.scaled(cfg.stroke_width))
    if color_u < cfg.color_probability:
        img = np.repeat(img[:, :, None], 3, axis=2)
        img[mask] = color
    else:
        img[mask] = ink

    if invert_u < cfg.invert_probability:
        img = 255 - img

    spot = None
    if spot_u < cfg.spot_probability:
        free = ndi.distance_transform_edt(~mask) > cfg.scaled(cfg.spot_margin)
        w = max(1, int(round(cfg.scaled(spot_w))))
        h = max(1, int(round(cfg.scaled(spot_h))))
        pos = _spot_position(free, w, h, spot_pos_u)
        if pos is None:
            w = h = max(1, int(round(cfg.scaled(cfg.spot_min))))
            pos = _spot_position(free, w, h, spot_pos_u)
        if pos is None:
            logger.debug(f'no ink-free room for a {w}x{h} spot, placing it over the glyph')
            pos = _spot_position(np.ones_like(free), w, h, spot_pos_u)
        x, y = pos
        img[y:y + h, x:x + w] = spot_value
        spot = ((x, y), (x + w - 1, y), (x + w - 1, y + h - 1), (x, y + h - 1))

    flip = noise_u < cfg.salt_pepper_rate
    img[flip & salt] = 255
    img[flip & ~salt] = 0
    return img, spot

def generate_synthetic(cfg: SynthConfig) -> LabeledDataset:
    """
    `cfg.count` glyph images, labels cycling through 0..9. Fully
    determined by `cfg`.
    """
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.count)
    items = []
    for i, child in enumerate(children):
        label = i % 10
        rngs = [np.random.default_rng(s) for s in child.spawn(6)]
        img, spot = _render(label, cfg, rngs)
        ext = 'ppm' if is_rgb(img) else 'pgm'
        items.append(LabeledImage(img, label, 'synthetic', f'synth_{i:06d}.{ext}', spot))
    logger.info(f'generated {cfg.count} synthetic image(s) with seed {cfg.seed}')
    return LabeledDataset(items)

def spot_region_mask(spot: Polygon, src_shape: Tuple[int, int],
                     out_shape: Tuple[int, int]) -> np.ndarray:
    """
    Pixels of a resized frame whose resampling position falls inside
    the pixel extent of a ground-truth spot.
    """
    in_h, in_w = src_shape[:2]
    out_h, out_w = out_shape[:2]
    xs = [p[0] for p in spot]
    ys = [p[1] for p in spot]

    sx = sample_positions(in_w, out_w)
    sy = sample_positions(in_h, out_h)
    cols = (sx >= min(xs)) & (sx <= max(xs))
    rows = (sy >= min(ys)) & (sy <= max(ys))
    return np.outer(rows, cols)

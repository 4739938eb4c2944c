"""
Boundary tracing and contour geometry: outer-border following over
8-connected foreground components, polygon approximation, detection
and erasure of solid quadrilateral spots, and the bounding box of the
largest contour used for cropping.

Points are lattice coordinates (x, y) with x growing to the right
and y growing downwards.
"""
import logging
import numpy as np
import scipy.ndimage as ndi

from scipy.spatial.distance import cdist
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from .constants import NUMTAPREP_LOGGER, DARK_LEVEL
from .errors import ConfigError, EmptyContour, NoForeground, OutOfBounds
from .raster import GrayImage, BinaryImage, as_gray

logger = logging.getLogger(NUMTAPREP_LOGGER)

Point = Tuple[int, int]

# clockwise on screen, starting east
_DX = (1, 1, 0, -1, -1, -1, 0, 1)
_DY = (0, 1, 1, 1, 0, -1, -1, -1)
_DIR_INDEX = {(dx, dy): i for i, (dx, dy) in enumerate(zip(_DX, _DY))}
_WEST = 4

_EIGHT_CONN = np.ones((3, 3), dtype=int)


class Rect(NamedTuple):
    x: int
    y: int
    w: int
    h: int

    @property
    def x2(self) -> int:
        return self.x + self.w

    @property
    def y2(self) -> int:
        return self.y + self.h


class Contour(object):
    """
    Ordered boundary path of lattice points, implicitly closed
    (the last point connects back to the first).
    """
    __slots__ = ('points',)

    def __init__(self, points: Union[np.ndarray, Iterable[Point]]):
        self.points = np.asarray(list(points) if not isinstance(points, np.ndarray) else points,
                                 dtype=np.int64).reshape(-1, 2)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return (tuple(int(v) for v in p) for p in self.points)

    def __eq__(self, other):
        return isinstance(other, Contour) and np.array_equal(self.points, other.points)

    def __repr__(self):
        return f'Contour({len(self)} points, bbox={bounding_box(self) if len(self) else None})'

    def as_tuples(self) -> List[Point]:
        return list(iter(self))

    @property
    def area(self) -> float:
        return contour_area(self)

    @property
    def perimeter(self) -> float:
        return contour_perimeter(self)

    @property
    def bbox(self) -> Rect:
        return bounding_box(self)


def _as_points(c) -> np.ndarray:
    if isinstance(c, Contour):
        return c.points
    return np.asarray(c, dtype=np.float64).reshape(-1, 2)


class SpotCriteria(NamedTuple):
    """
    Acceptance window for a dark contour to count as a solid
    quadrilateral spot. `max_aspect` bounds the bounding-box
    long/short side ratio, so straight strokes are not taken
    for spots.
    """
    min_vertices: int = 4
    max_vertices: int = 8
    min_solidity: float = 0.90
    min_area_frac: float = 0.01
    max_area_frac: float = 0.50
    dp_epsilon_frac: float = 0.02
    max_aspect: float = 3.0

    def validate(self) -> 'SpotCriteria':
        if not (0 < self.min_area_frac < self.max_area_frac <= 1):
            raise ConfigError('spot area fractions must satisfy 0 < min_area_frac < max_area_frac <= 1')
        if not (0 < self.min_solidity <= 1):
            raise ConfigError('spot.min_solidity must lie in (0, 1]')
        if not (1 <= self.min_vertices <= self.max_vertices):
            raise ConfigError('spot.min_vertices must not exceed spot.max_vertices')
        if self.dp_epsilon_frac < 0:
            raise ConfigError('spot.dp_epsilon_frac must be non-negative')
        if self.max_aspect < 1:
            raise ConfigError('spot.max_aspect must be at least 1')
        return self

##
# Border following
#

def _trace_outer_border(mask: np.ndarray, x0: int, y0: int) -> List[Point]:
    """
    Follows the outer border of the component whose topmost-leftmost
    pixel is (x0, y0). `mask` is padded by one background pixel, so
    neighbour lookups never leave the array.
    """
    p1 = None
    for i in range(8):
        d = (_WEST + i) % 8
        nx, ny = x0 + _DX[d], y0 + _DY[d]
        if mask[ny, nx]:
            p1 = (nx, ny)
            break
    if p1 is None:
        return [(x0, y0)]

    p0 = (x0, y0)
    p2, p3 = p1, p0
    path = []
    while True:
        d2 = _DIR_INDEX[(p2[0] - p3[0], p2[1] - p3[1])]
        for i in range(1, 9):
            d = (d2 - i) % 8
            nx, ny = p3[0] + _DX[d], p3[1] + _DY[d]
            if mask[ny, nx]:
                p4 = (nx, ny)
                break
        path.append(p3)
        if p4 == p0 and p3 == p1:
            break
        p2, p3 = p3, p4
    return path

def find_contours(img: BinaryImage) -> List[Contour]:
    """
    One outer-border contour per 8-connected foreground (255)
    component, in raster-scan discovery order. Holes are not traced.
    """
    img = as_gray(img)
    fg = img == 255
    labels, n = ndi.label(fg, structure=_EIGHT_CONN)
    if n == 0:
        return []

    # first occurrence of every label in raster order is the component's topmost-leftmost pixel
    flat = labels.ravel()
    ids, first = np.unique(flat, return_index=True)
    starts = sorted(int(f) for i, f in zip(ids, first) if i != 0)

    padded = np.pad(fg, 1, mode='constant', constant_values=False)
    width = img.shape[1]
    contours = []
    for s in starts:
        y, x = divmod(s, width)
        path = _trace_outer_border(padded, x + 1, y + 1)
        contours.append(Contour(np.asarray(path, dtype=np.int64) - 1))
    return contours

##
# Geometry
#

def polygon_area(points) -> float:
    pts = _as_points(points).astype(np.float64)
    if len(pts) < 3:
        return 0.0
    x, y = pts[:, 0], pts[:, 1]
    return float(abs(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)) / 2.0)

def contour_area(c: Contour) -> float:
    """
    Absolute shoelace area of the closed point sequence.
    """
    return polygon_area(c)

def contour_perimeter(c: Contour) -> float:
    pts = _as_points(c).astype(np.float64)
    if len(pts) < 2:
        return 0.0
    return float(np.sum(np.hypot(*(np.roll(pts, -1, axis=0) - pts).T)))

def bounding_box(c: Contour) -> Rect:
    pts = _as_points(c)
    if len(pts) == 0:
        raise EmptyContour('bounding box of an empty contour')
    x_min, y_min = (int(v) for v in pts.min(axis=0))
    x_max, y_max = (int(v) for v in pts.max(axis=0))
    return Rect(x_min, y_min, x_max - x_min + 1, y_max - y_min + 1)

def convex_hull(points) -> np.ndarray:
    """
    Monotone chain convex hull; vertices counterclockwise in
    a y-up frame, without collinear points.
    """
    pts = sorted(set(map(tuple, _as_points(points).tolist())))
    if len(pts) < 3:
        return np.asarray(pts, dtype=np.float64).reshape(-1, 2)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.asarray(lower[:-1] + upper[:-1], dtype=np.float64)

def solidity(c: Contour) -> float:
    hull_area = polygon_area(convex_hull(c))
    if hull_area <= 0:
        return 0.0
    return contour_area(c) / hull_area

def _line_distances(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    norm = np.hypot(ab[0], ab[1])
    if norm == 0:
        return np.hypot(pts[:, 0] - a[0], pts[:, 1] - a[1])
    return np.abs(ab[0] * (pts[:, 1] - a[1]) - ab[1] * (pts[:, 0] - a[0])) / norm

def _simplify_chain(chain: np.ndarray, epsilon: float) -> List[int]:
    """
    Douglas-Peucker over an open chain; returns the kept indices,
    endpoints included, in chain order.
    """
    n = len(chain)
    keep = np.zeros(n, dtype=bool)
    keep[0] = keep[-1] = True
    stack = [(0, n - 1)]
    while stack:
        lo, hi = stack.pop()
        if hi - lo < 2:
            continue
        dists = _line_distances(chain[lo + 1:hi], chain[lo], chain[hi])
        i = int(np.argmax(dists))
        if dists[i] > epsilon:
            mid = lo + 1 + i
            keep[mid] = True
            stack.append((lo, mid))
            stack.append((mid, hi))
    return list(np.flatnonzero(keep))

def approx_polygon(c: Contour, epsilon: float) -> List[Point]:
    """
    Douglas-Peucker simplification of a closed contour. The path is
    split at its two mutually farthest points and both halves are
    simplified with tolerance `epsilon`.
    """
    if epsilon < 0:
        raise ValueError(f'epsilon must be non-negative, got {epsilon}')
    pts = _as_points(c)
    n = len(pts)
    if n <= 2:
        return [tuple(p) for p in pts.tolist()]

    fpts = pts.astype(np.float64)
    dist = cdist(fpts, fpts)
    i, j = sorted(np.unravel_index(int(np.argmax(dist)), dist.shape))
    if dist[i, j] == 0:
        return [tuple(pts[0].tolist())]

    first = np.arange(i, j + 1)
    second = np.concatenate([np.arange(j, n), np.arange(0, i + 1)])
    kept_first = first[_simplify_chain(fpts[first], epsilon)]
    kept_second = second[_simplify_chain(fpts[second], epsilon)]
    order = list(kept_first) + list(kept_second[1:-1])
    return [tuple(pts[k].tolist()) for k in order]

##
# Spots
#

def _aspect(rect: Rect) -> float:
    return max(rect.w, rect.h) / min(rect.w, rect.h)

def is_quad_spot(c: Contour, criteria: SpotCriteria, frame_area: int) -> bool:
    area_frac = contour_area(c) / frame_area
    if not (criteria.min_area_frac <= area_frac <= criteria.max_area_frac):
        return False
    if _aspect(bounding_box(c)) > criteria.max_aspect:
        return False
    n_vertices = len(approx_polygon(c, criteria.dp_epsilon_frac * contour_perimeter(c)))
    if not (criteria.min_vertices <= n_vertices <= criteria.max_vertices):
        return False
    return solidity(c) >= criteria.min_solidity

def dark_mask(img: GrayImage, dark_level: int = DARK_LEVEL) -> BinaryImage:
    img = as_gray(img)
    return BinaryImage(np.where(img < dark_level, 255, 0).astype(np.uint8))

def detect_quad_spots(img: GrayImage, criteria: Optional[SpotCriteria] = None,
                      dark_level: int = DARK_LEVEL) -> List[Contour]:
    """
    Dark solid quadrilaterals (possibly overlapped into up to
    `max_vertices` sides) in a pre-threshold gray image.
    """
    criteria = criteria or SpotCriteria()
    img = as_gray(img)
    frame_area = img.shape[0] * img.shape[1]
    spots = [c for c in find_contours(dark_mask(img, dark_level))
             if is_quad_spot(c, criteria, frame_area)]
    logger.debug(f'{len(spots)} quadrilateral spot(s) detected')
    return spots

def fill_contour(img: GrayImage, c: Contour, value: int) -> GrayImage:
    """
    Returns a copy of `img` with every pixel inside or on the closed
    contour set to `value`. The interior is found by even-odd scanline
    filling of the polygon through the contour points; an edge covers
    the half-open row range [min(y1, y2), max(y1, y2)).
    """
    img = as_gray(img)
    pts = _as_points(c).astype(np.int64)
    h, w = img.shape
    if len(pts) and (pts[:, 0].min() < 0 or pts[:, 1].min() < 0
                     or pts[:, 0].max() >= w or pts[:, 1].max() >= h):
        raise OutOfBounds(f'contour leaves the {w}x{h} image')

    out = img.copy()
    if len(pts) == 0:
        return out

    a = pts.astype(np.float64)
    b = np.roll(a, -1, axis=0)
    lo = np.minimum(a[:, 1], b[:, 1])
    hi = np.maximum(a[:, 1], b[:, 1])
    for y in range(int(pts[:, 1].min()), int(pts[:, 1].max()) + 1):
        crossing = (lo <= y) & (y < hi)
        if not crossing.any():
            continue
        ea, eb = a[crossing], b[crossing]
        xs = np.sort(ea[:, 0] + (y - ea[:, 1]) * (eb[:, 0] - ea[:, 0]) / (eb[:, 1] - ea[:, 1]))
        for x_start, x_end in zip(xs[0::2], xs[1::2]):
            x_from = max(int(np.ceil(x_start)), 0)
            x_to = min(int(np.floor(x_end)), w - 1)
            if x_from <= x_to:
                out[y, x_from:x_to + 1] = value
    out[pts[:, 1], pts[:, 0]] = value
    return GrayImage(out)

def remove_spots(img: GrayImage, spots: Sequence[Contour], value: int = 255) -> GrayImage:
    out = as_gray(img)
    for c in spots:
        out = fill_contour(out, c, value)
    return out

##
# Cropping
#

def largest_contour(img: BinaryImage) -> Contour:
    contours = find_contours(img)
    if not contours:
        raise NoForeground('image has no foreground pixel')
    areas = [contour_area(c) for c in contours]
    return contours[int(np.argmax(areas))]

def largest_contour_bbox(img: BinaryImage) -> Rect:
    """
    Bounding box of the contour with the largest shoelace area;
    ties go to the earliest discovered contour.
    """
    return bounding_box(largest_contour(img))

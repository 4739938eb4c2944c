"""
Stroke templates of the ten digit classes and their rasterization.

Templates are polylines in a unit box (x to the right, y down),
loosely following the Bengali digit shapes. All are open strokes
except 9, whose path returns to its start and closes one small loop
above its tail.
"""
import numpy as np

from typing import List, Sequence, Tuple

Polyline = List[Tuple[float, float]]


def _arc(cx, cy, rx, ry, start_deg, end_deg, n=14) -> Polyline:
    t = np.radians(np.linspace(start_deg, end_deg, n))
    return [(float(cx + rx * np.cos(a)), float(cy + ry * np.sin(a))) for a in t]


GLYPHS = {
    0: [_arc(0.5, 0.5, 0.26, 0.34, -60, 235)],
    1: [[(0.22, 0.22), (0.45, 0.12), (0.70, 0.18), (0.78, 0.36), (0.58, 0.52),
         (0.72, 0.70), (0.60, 0.88), (0.38, 0.84)]],
    2: [[(0.20, 0.28), (0.42, 0.12), (0.70, 0.20), (0.74, 0.40), (0.48, 0.58),
         (0.28, 0.72), (0.48, 0.86), (0.82, 0.80)]],
    3: [[(0.18, 0.18), (0.50, 0.12), (0.72, 0.28), (0.46, 0.46), (0.78, 0.62),
         (0.62, 0.86), (0.30, 0.88), (0.16, 0.72)]],
    4: [[(0.30, 0.12), (0.66, 0.26), (0.30, 0.48), (0.72, 0.68), (0.32, 0.88)]],
    5: [[(0.20, 0.84), (0.18, 0.36), (0.42, 0.14), (0.78, 0.26), (0.56, 0.52),
         (0.84, 0.86)]],
    6: [[(0.80, 0.14), (0.34, 0.18), (0.58, 0.42), (0.24, 0.62), (0.44, 0.88),
         (0.80, 0.74)]],
    7: [[(0.14, 0.20), (0.46, 0.36), (0.86, 0.14)], [(0.86, 0.14), (0.60, 0.56), (0.56, 0.90)]],
    8: [[(0.74, 0.10), (0.28, 0.52), (0.48, 0.90), (0.70, 0.52), (0.86, 0.64)]],
    9: [[(0.48, 0.50), (0.24, 0.34), (0.40, 0.12), (0.72, 0.18), (0.74, 0.42), (0.48, 0.50),
         (0.70, 0.76), (0.86, 0.90)]],
}


def _segment_distance(px: np.ndarray, py: np.ndarray, a, b) -> np.ndarray:
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    length2 = dx * dx + dy * dy
    if length2 == 0:
        return np.hypot(px - ax, py - ay)
    t = np.clip(((px - ax) * dx + (py - ay) * dy) / length2, 0.0, 1.0)
    return np.hypot(px - (ax + t * dx), py - (ay + t * dy))

def place(strokes: Sequence[Polyline], box: float,
          center: Tuple[float, float]) -> List[np.ndarray]:
    """
    Maps unit-box strokes to pixel coordinates: the unit box becomes
    a `box`-pixel square centered on `center`.
    """
    cx, cy = center
    return [np.array([(cx + (u - 0.5) * box, cy + (v - 0.5) * box) for u, v in s]) for s in strokes]

def ink_mask(strokes: Sequence[np.ndarray], size: int, width: float) -> np.ndarray:
    """
    Boolean mask of the pixels whose centers lie within width / 2 of
    any stroke segment. Edges are hard, no anti-aliasing.
    """
    py, px = np.mgrid[0:size, 0:size].astype(np.float64)
    dist = np.full((size, size), np.inf)
    for s in strokes:
        for a, b in zip(s[:-1], s[1:]):
            dist = np.minimum(dist, _segment_distance(px, py, a, b))
    return dist <= width / 2.0

"""
Raster types and the pointwise/windowed stages of the cleaning
dataflow: resizing, grayscale conversion and median blur.

Images are plain numpy arrays of dtype uint8, row-major, shaped
(height, width) for gray and (height, width, 3) for RGB rasters.
"""
import numpy as np

from numpy.lib.stride_tricks import sliding_window_view
from typing import NewType, Union

from .errors import InvalidImage, ZeroDimension, EvenKernel, KernelTooLarge
from .utils import round_half_up

GrayImage = NewType('GrayImage', np.ndarray)
RGBImage = NewType('RGBImage', np.ndarray)
BinaryImage = NewType('BinaryImage', np.ndarray)

AnyImage = Union[GrayImage, RGBImage]

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])

##
# Validation
#

def _as_uint8(img) -> np.ndarray:
    arr = np.asarray(img)
    if arr.dtype == np.uint8:
        return arr
    if arr.dtype.kind in 'iub' and arr.size > 0 and arr.min() >= 0 and arr.max() <= 255:
        return arr.astype(np.uint8)
    raise InvalidImage(f'pixels must be 8-bit integers, got dtype {arr.dtype}')

def is_rgb(img) -> bool:
    return np.ndim(img) == 3 and np.shape(img)[2] == 3

def as_gray(img) -> GrayImage:
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise InvalidImage(f'gray image must be 2-dimensional, got shape {arr.shape}')
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidImage(f'image dimensions must be positive, got {arr.shape}')
    return GrayImage(_as_uint8(arr))

def as_rgb(img) -> RGBImage:
    arr = np.asarray(img)
    if not is_rgb(arr):
        raise InvalidImage(f'RGB image must have shape (h, w, 3), got {arr.shape}')
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidImage(f'image dimensions must be positive, got {arr.shape}')
    return RGBImage(_as_uint8(arr))

def as_image(img) -> AnyImage:
    return as_rgb(img) if np.ndim(img) == 3 else as_gray(img)

def is_binary(img) -> bool:
    arr = np.asarray(img)
    return bool(np.all((arr == 0) | (arr == 255)))

def as_binary(img) -> BinaryImage:
    arr = as_gray(img)
    if not is_binary(arr):
        raise InvalidImage('binary image pixels must be 0 or 255')
    return BinaryImage(arr)

def invert(img: AnyImage) -> AnyImage:
    return 255 - as_image(img)

##
# Pipeline stages
#

def to_grayscale(img: AnyImage) -> GrayImage:
    """
    BT.601 luminance, rounded half away from zero. A gray image
    is returned unchanged (as a copy).
    """
    img = as_image(img)
    if not is_rgb(img):
        return GrayImage(img.copy())
    return GrayImage(round_half_up(img.astype(np.float64) @ LUMA_WEIGHTS))

def sample_positions(n_in: int, n_out: int) -> np.ndarray:
    src = (np.arange(n_out, dtype=np.float64) + 0.5) * (n_in / n_out) - 0.5
    return np.clip(src, 0.0, n_in - 1)

def _check_dims(out_w: int, out_h: int):
    if out_w < 1 or out_h < 1:
        raise ZeroDimension(f'output dimensions must be positive, got {out_w}x{out_h}')

def resize(img: AnyImage, out_w: int, out_h: int) -> AnyImage:
    """
    Bilinear resampling with pixel-center alignment:
    src = (dst + 0.5) * in / out - 0.5, clamped to the source
    rectangle. RGB rasters are resampled per channel.
    """
    img = as_image(img)
    _check_dims(out_w, out_h)
    in_h, in_w = img.shape[:2]
    if (in_w, in_h) == (out_w, out_h):
        return img.copy()

    sx = sample_positions(in_w, out_w)
    sy = sample_positions(in_h, out_h)
    x0 = np.floor(sx).astype(int)
    y0 = np.floor(sy).astype(int)
    x1 = np.minimum(x0 + 1, in_w - 1)
    y1 = np.minimum(y0 + 1, in_h - 1)
    fx = sx - x0
    fy = sy - y0

    src = img.astype(np.float64)
    extra = (1,) * (img.ndim - 2)
    fx = fx.reshape((1, -1) + extra)
    fy = fy.reshape((-1, 1) + extra)

    top = src[y0][:, x0] * (1 - fx) + src[y0][:, x1] * fx
    bottom = src[y1][:, x0] * (1 - fx) + src[y1][:, x1] * fx
    return round_half_up(top * (1 - fy) + bottom * fy)

def resize_nearest(img: AnyImage, out_w: int, out_h: int) -> AnyImage:
    img = as_image(img)
    _check_dims(out_w, out_h)
    in_h, in_w = img.shape[:2]
    xi = np.minimum(np.floor(sample_positions(in_w, out_w) + 0.5).astype(int), in_w - 1)
    yi = np.minimum(np.floor(sample_positions(in_h, out_h) + 0.5).astype(int), in_h - 1)
    return img[yi][:, xi].copy()

def median_blur(img: GrayImage, k: int = 3) -> GrayImage:
    """
    k x k median filter with edge replication at the borders.
    """
    img = as_gray(img)
    if k < 1 or k % 2 == 0:
        raise EvenKernel(f'median window must be odd and positive, got {k}')
    if k > min(img.shape):
        raise KernelTooLarge(f'median window {k} exceeds image size {img.shape[1]}x{img.shape[0]}')
    if k == 1:
        return GrayImage(img.copy())

    r = k // 2
    padded = np.pad(img, r, mode='edge')
    windows = sliding_window_view(padded, (k, k)).reshape(img.shape + (k * k,))
    mid = (k * k) // 2
    return GrayImage(np.partition(windows, mid, axis=-1)[..., mid].copy())

##
# Geometry helpers
#

def crop(img: AnyImage, x: int, y: int, w: int, h: int) -> AnyImage:
    return img[y:y + h, x:x + w].copy()

def pad_to_square(img: GrayImage, fill: int = 0) -> GrayImage:
    """
    Pads the shorter axis so the image becomes square, keeping
    it centered; the odd extra row/column goes to the bottom/right.
    """
    h, w = img.shape[:2]
    side = max(h, w)
    top = (side - h) // 2
    left = (side - w) // 2
    return np.pad(img, ((top, side - h - top), (left, side - w - left)),
                  mode='constant', constant_values=fill)

def pad_border(img: GrayImage, margin: int, fill: int = 0) -> GrayImage:
    if margin <= 0:
        return img.copy()
    return np.pad(img, margin, mode='constant', constant_values=fill)

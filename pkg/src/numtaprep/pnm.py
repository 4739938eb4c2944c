"""
Binary Netpbm codecs: P5 (gray) and P6 (RGB), maxval 255.

Layout: "P5\n<w> <h>\n255\n" followed by w*h raw bytes in row-major
order (three bytes per pixel for P6). Comments starting with '#' are
accepted in headers being read, never written.
"""
import numpy as np

from pathlib import Path
from typing import Tuple, Union

from .errors import UnsupportedFormat, Truncated, InvalidImage
from .raster import GrayImage, RGBImage, AnyImage, as_gray, as_rgb, is_rgb

PathLike = Union[str, Path]

_CHANNELS = {b'P5': 1, b'P6': 3}
_WHITESPACE = b' \t\r\n\x0b\x0c'


def _read_header(data: bytes) -> Tuple[bytes, int, int, int, int]:
    """
    Returns (magic, width, height, maxval, offset of the pixel data).
    """
    if len(data) < 2:
        raise Truncated('file too short for a PNM header')
    magic = data[:2]
    if magic not in _CHANNELS:
        raise UnsupportedFormat(f'unsupported image magic {magic!r} (only binary P5/P6)')

    tokens = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos] in _WHITESPACE:
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b'#':
            while pos < len(data) and data[pos:pos + 1] != b'\n':
                pos += 1
            continue
        start = pos
        while pos < len(data) and data[pos] not in _WHITESPACE and data[pos:pos + 1] != b'#':
            pos += 1
        if start == pos:
            raise Truncated('PNM header ended early')
        try:
            tokens.append(int(data[start:pos]))
        except ValueError:
            raise UnsupportedFormat(f'malformed PNM header token {data[start:pos]!r}')
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise Truncated('PNM header is not followed by pixel data')

    width, height, maxval = tokens
    if width < 1 or height < 1:
        raise UnsupportedFormat(f'invalid PNM dimensions {width}x{height}')
    if maxval != 255:
        raise UnsupportedFormat(f'only maxval 255 is supported, got {maxval}')
    return magic, width, height, maxval, pos + 1

def decode_pnm(data: bytes) -> AnyImage:
    magic, width, height, _, offset = _read_header(data)
    channels = _CHANNELS[magic]
    n = width * height * channels
    body = data[offset:offset + n]
    if len(body) < n:
        raise Truncated(f'expected {n} pixel bytes, found {len(body)}')
    arr = np.frombuffer(body, dtype=np.uint8)
    if channels == 1:
        return GrayImage(arr.reshape(height, width).copy())
    return RGBImage(arr.reshape(height, width, 3).copy())

def encode_pnm(img: AnyImage) -> bytes:
    if is_rgb(img):
        img, magic = as_rgb(img), b'P6'
    else:
        img, magic = as_gray(img), b'P5'
    h, w = img.shape[:2]
    return magic + f'\n{w} {h}\n255\n'.encode() + np.ascontiguousarray(img).tobytes()

def read_image(path: PathLike) -> AnyImage:
    return decode_pnm(Path(path).read_bytes())

def write_image(img: AnyImage, path: PathLike):
    Path(path).write_bytes(encode_pnm(img))

def read_pgm(path: PathLike) -> GrayImage:
    img = read_image(path)
    if is_rgb(img):
        raise UnsupportedFormat(f'{path}: expected a P5 gray image, found P6')
    return img

def write_pgm(img: GrayImage, path: PathLike):
    if is_rgb(img):
        raise InvalidImage('write_pgm expects a gray image')
    write_image(img, path)

def read_ppm(path: PathLike) -> RGBImage:
    img = read_image(path)
    if not is_rgb(img):
        raise UnsupportedFormat(f'{path}: expected a P6 RGB image, found P5')
    return img

def write_ppm(img: RGBImage, path: PathLike):
    write_image(as_rgb(img), path)

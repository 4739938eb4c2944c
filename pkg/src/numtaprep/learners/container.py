"""
Versioned binary container for fitted models.

    magic        4 bytes  b'NPML'
    version      u16
    tag          u16 length + UTF-8 model name
    field count  u32
    fields       u16 length + UTF-8 name, u8 kind, payload

Field kinds: 0 = none, 1 = int (i64), 2 = float (f64), 3 = str
(u32 length + UTF-8), 4 = array (u8 length + dtype string, u8 ndim,
u32 per dimension, raw little-endian bytes). All integers are
little-endian.
"""
import struct
import numpy as np

from pathlib import Path
from typing import Any, Tuple, Union

from .base import Classifier, State
from ..constants import MODEL_MAGIC, MODEL_VERSION
from ..errors import ModelFormatError, ModelVersionError

KIND_NONE, KIND_INT, KIND_FLOAT, KIND_STR, KIND_ARRAY = range(5)


def _pack_str(s: str, fmt: str) -> bytes:
    raw = s.encode('utf-8')
    return struct.pack(fmt, len(raw)) + raw

def _pack_field(name: str, value: Any) -> bytes:
    head = _pack_str(name, '<H')
    if value is None:
        return head + struct.pack('<B', KIND_NONE)
    elif isinstance(value, (bool, int, np.integer)):
        return head + struct.pack('<Bq', KIND_INT, int(value))
    elif isinstance(value, (float, np.floating)):
        return head + struct.pack('<Bd', KIND_FLOAT, float(value))
    elif isinstance(value, str):
        return head + struct.pack('<B', KIND_STR) + _pack_str(value, '<I')
    elif isinstance(value, np.ndarray):
        arr = np.ascontiguousarray(value)
        arr = arr.astype(arr.dtype.newbyteorder('<'), copy=False)
        return (head + struct.pack('<B', KIND_ARRAY) + _pack_str(arr.dtype.str, '<B')
                + struct.pack('<B', arr.ndim) + struct.pack(f'<{arr.ndim}I', *arr.shape)
                + arr.tobytes())
    else:
        raise TypeError(f'cannot store field {name} of type {type(value).__name__}')

def encode_model(tag: str, state: State) -> bytes:
    parts = [MODEL_MAGIC, struct.pack('<H', MODEL_VERSION), _pack_str(tag, '<H'),
             struct.pack('<I', len(state))]
    parts += [_pack_field(k, v) for k, v in sorted(state.items())]
    return b''.join(parts)


class _Reader(object):
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ModelFormatError('model file is truncated')
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str):
        fmt = '<' + fmt
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def string(self, len_fmt: str) -> str:
        (n,) = self.unpack(len_fmt)
        try:
            return self.take(n).decode('utf-8')
        except UnicodeDecodeError:
            raise ModelFormatError('model file holds an undecodable string')


def decode_model(data: bytes) -> Tuple[str, State]:
    r = _Reader(data)
    if r.take(len(MODEL_MAGIC)) != MODEL_MAGIC:
        raise ModelFormatError('not a model file (bad magic)')
    (version,) = r.unpack('H')
    if version != MODEL_VERSION:
        raise ModelVersionError(f'model container version {version}, expected {MODEL_VERSION}')
    tag = r.string('H')
    (count,) = r.unpack('I')

    state = {}
    for _ in range(count):
        name = r.string('H')
        (kind,) = r.unpack('B')
        if kind == KIND_NONE:
            state[name] = None
        elif kind == KIND_INT:
            state[name] = r.unpack('q')[0]
        elif kind == KIND_FLOAT:
            state[name] = r.unpack('d')[0]
        elif kind == KIND_STR:
            state[name] = r.string('I')
        elif kind == KIND_ARRAY:
            try:
                dtype = np.dtype(r.string('B'))
            except TypeError:
                raise ModelFormatError(f'field {name} has an unknown dtype')
            (ndim,) = r.unpack('B')
            shape = r.unpack(f'{ndim}I')
            n_bytes = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
            state[name] = np.frombuffer(r.take(n_bytes), dtype=dtype).reshape(shape).copy()
        else:
            raise ModelFormatError(f'field {name} has unknown kind {kind}')
    if r.pos != len(data):
        raise ModelFormatError('trailing bytes after the last field')
    return tag, state

def save_model(model: Classifier, path: Union[str, Path]):
    Path(path).write_bytes(encode_model(model.name, model.get_state()))

def restore_model(tag: str, state: State) -> Classifier:
    """
    Rebuilds a fitted model from a decoded state. A missing or
    mistyped field is a format error, not a crash.
    """
    from . import get_model_class

    model_class = get_model_class(tag)
    try:
        return model_class.from_state(state)
    except KeyError as e:
        raise ModelFormatError(f'{tag} model lacks field {e.args[0]!r}')
    except (TypeError, ValueError) as e:
        raise ModelFormatError(f'{tag} model holds a malformed field: {e}')

def load_model(path: Union[str, Path]) -> Classifier:
    return restore_model(*decode_model(Path(path).read_bytes()))

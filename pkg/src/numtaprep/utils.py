import struct
import hashlib
import base64
import numpy as np

from copy import deepcopy
from typing import Any, Dict, Iterator, Tuple

##
# Misc
#

def round_half_up(x) -> np.ndarray:
    """
    Rounds non-negative reals half away from zero and
    clamps them into the 8-bit range.
    """
    return np.clip(np.floor(np.asarray(x, dtype=np.float64) + 0.5), 0, 255).astype(np.uint8)

def make_batches(size, batch_size):
    num_batches = int(np.ceil(size / float(batch_size)))
    for i in range(0, num_batches):
        yield (i * batch_size, min(size, (i + 1) * batch_size))

def file_stem(filename: str) -> str:
    base = filename.replace('\\', '/').rsplit('/', 1)[-1]
    return base.rsplit('.', 1)[0] if '.' in base else base

##
# Hashing
#

def to_bytes(data):
    if isinstance(data, bytes):
        return data
    elif isinstance(data, str):
        return data.encode()
    elif isinstance(data, bool):
        return struct.pack("!?", data)
    elif isinstance(data, (int, np.integer)):
        return struct.pack("!q", int(data))
    elif isinstance(data, (float, np.floating)):
        return struct.pack("!d", float(data))
    elif data is None:
        return b'\x00'
    elif isinstance(data, np.ndarray):
        return to_bytes(str(data.dtype)) + to_bytes(data.shape) + data.tobytes()

    elif isinstance(data, (set, frozenset)):
        return b''.join([to_bytes(x) for x in sorted(data)])
    elif isinstance(data, (tuple, list)):
        return b''.join([to_bytes(x) for x in data])

    elif isinstance(data, dict):
        return b''.join([to_bytes((k, v)) for k, v in sorted(data.items())])

    else:
        raise Exception('Unsupported type for digest: {}'.format(type(data)))

def data_digest(data) -> str:
    ba = to_bytes(data)
    m = hashlib.sha256()
    m.update(ba)
    return base64.b16encode(m.digest()).decode('utf-8').lower()

##
# Config dictionaries
#

def dict_merge(old_dct, merge_dct, inplace=False):
    """
    Recursive dict merge: nested dicts of `merge_dct` are merged
    into the matching dicts of `old_dct`, other values replace.
    """
    if inplace:
        dct = old_dct
    else:
        dct = deepcopy(old_dct)

    for k, v in merge_dct.items():
        if (k in dct and isinstance(dct[k], dict)
                and isinstance(merge_dct[k], dict)):
            dict_merge(dct[k], merge_dct[k], inplace=True)
        else:
            dct[k] = deepcopy(v)
    return dct

def unflatten_keys(dct: Dict[str, Any]) -> Dict[str, Any]:
    """
    Turns `{'pipeline.median_k': 5}` into `{'pipeline': {'median_k': 5}}`,
    leaving already nested entries as they are.
    """
    res = {}
    for k, v in dct.items():
        if isinstance(v, dict):
            v = unflatten_keys(v)
        parts = str(k).split('.')
        node = res
        for p in parts[:-1]:
            node = node.setdefault(p, {})
        if parts[-1] in node and isinstance(node[parts[-1]], dict) and isinstance(v, dict):
            dict_merge(node[parts[-1]], v, inplace=True)
        else:
            node[parts[-1]] = v
    return res

def flatten_keys(dct: Dict[str, Any], prefix: str = '') -> Iterator[Tuple[str, Any]]:
    for k, v in dct.items():
        key = prefix + str(k)
        if isinstance(v, dict):
            yield from flatten_keys(v, key + '.')
        else:
            yield key, v

import logging
import struct
from collections.abc import Mapping

import numpy as np

from pathfinder.errors import DataError, DimensionError
from pathfinder.numerics.tensor import Tensor

Logger = logging.getLogger('pathfinder.numerics.params')

MAGIC = b'PFND'
FORMAT_VERSION = 1


class ParamStore(Mapping):
    """Named parameters, iterated in lexicographic name order."""

    def __init__(self, tensors=None):
        self._tensors = {}
        for name, value in (tensors or {}).items():
            if not isinstance(value, Tensor):
                value = Tensor(value)
            if not value.requires_grad:
                value = Tensor(value.data, requires_grad=True)
            self._tensors[name] = value

    def __getitem__(self, name):
        return self._tensors[name]

    def __iter__(self):
        return iter(sorted(self._tensors))

    def __len__(self):
        return len(self._tensors)

    def __repr__(self):
        return 'ParamStore(%d tensors, %d scalars)' % (len(self), self.count())

    def count(self):
        return sum(t.size for t in self._tensors.values())

    def shapes(self):
        return {name: self[name].shape for name in self}

    def replace(self, updates):
        """A new store with some tensors swapped; shapes must not change."""
        merged = dict(self._tensors)
        for name, value in updates.items():
            if name not in merged:
                raise KeyError(name)
            value = np.asarray(value.data if isinstance(value, Tensor) else value)
            if value.shape != merged[name].shape:
                raise DimensionError('parameter %s: shape %s, expected %s'
                                     % (name, value.shape, merged[name].shape))
            merged[name] = value
        return ParamStore(merged)

    def astype(self, dtype):
        return ParamStore({name: self[name].data.astype(dtype) for name in self})


def dumps_params(params):
    chunks = [MAGIC, struct.pack('<II', FORMAT_VERSION, len(params))]
    for name in params:
        data = np.ascontiguousarray(params[name].data, dtype='<f4')
        encoded = name.encode('utf-8')
        chunks.append(struct.pack('<H', len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack('<B', data.ndim))
        chunks.append(struct.pack('<%dI' % data.ndim, *data.shape))
        chunks.append(data.tobytes())
    return b''.join(chunks)


def loads_params(payload, source='<bytes>'):
    view = memoryview(payload)
    offset = 0

    def take(n):
        nonlocal offset
        if offset + n > len(view):
            raise DataError('truncated model file', source)
        chunk = view[offset:offset + n]
        offset += n
        return chunk

    if bytes(take(4)) != MAGIC:
        raise DataError('not a PFND model file', source)
    version, count = struct.unpack('<II', take(8))
    if version != FORMAT_VERSION:
        raise DataError('unsupported model format version %d' % version, source)
    tensors = {}
    for _ in range(count):
        (length,) = struct.unpack('<H', take(2))
        name = bytes(take(length)).decode('utf-8')
        (rank,) = struct.unpack('<B', take(1))
        shape = struct.unpack('<%dI' % rank, take(4 * rank))
        size = int(np.prod(shape, dtype=np.int64))
        data = np.frombuffer(bytes(take(4 * size)), dtype='<f4').reshape(shape)
        tensors[name] = data.astype(np.float32)
    if offset != len(view):
        raise DataError('trailing bytes after %d parameters' % count, source)
    Logger.debug('Loaded %d parameters from %s' % (count, source))
    return ParamStore(tensors)

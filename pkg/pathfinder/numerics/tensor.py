import itertools
import logging
from threading import local

import numpy as np

from pathfinder.errors import ContractError, DimensionError, NonFiniteError

Logger = logging.getLogger('pathfinder.numerics.tensor')

DTYPES = (np.dtype(np.float32), np.dtype(np.float64))

_uids = itertools.count(1)
_active = local()


class Tensor(object):
    """Immutable dense array with an identity used by the tape.

    ``requires_grad`` marks leaves that gradients are requested for; every
    result of an operation on such a tensor inherits the flag.
    """

    __slots__ = ('data', 'uid', 'requires_grad')

    def __init__(self, data, dtype=None, requires_grad=False, allow_inf=False):
        array = np.array(data, dtype=dtype, copy=True)
        if array.dtype not in DTYPES:
            array = array.astype(np.float64)
        if allow_inf:
            if np.isnan(array).any() or np.isposinf(array).any():
                raise NonFiniteError('mask tensors may only hold 0 and -inf')
        elif not np.isfinite(array).all():
            raise NonFiniteError('non-finite value in tensor of shape %s' % (array.shape,))
        array.setflags(write=False)
        self.data = array
        self.uid = next(_uids)
        self.requires_grad = requires_grad

    def __repr__(self):
        return 'Tensor(shape=%s, dtype=%s)' % (self.shape, self.dtype)

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def numpy(self):
        return self.data

    def item(self):
        if self.data.size != 1:
            raise ContractError('item() needs a single-element tensor, got shape %s' % (self.shape,))
        return float(self.data.reshape(-1)[0])

    def astype(self, dtype):
        return Tensor(self.data.astype(dtype), requires_grad=self.requires_grad)


def as_tensor(value, dtype=None):
    if isinstance(value, Tensor):
        if dtype is not None and value.dtype != np.dtype(dtype):
            return value.astype(dtype)
        return value
    return Tensor(value, dtype=dtype)


class _Record(object):
    __slots__ = ('name', 'inputs', 'output', 'vjps')

    def __init__(self, name, inputs, output, vjps):
        self.name = name
        self.inputs = inputs
        self.output = output
        self.vjps = vjps


class Tape(object):
    """Ordered record of primitive operations.

    Used as a context manager; operations executed inside the block are
    recorded on the innermost active tape of the current thread.
    """

    def __init__(self):
        self.records = []

    def __len__(self):
        return len(self.records)

    def __enter__(self):
        stack = getattr(_active, 'stack', None)
        if stack is None:
            stack = _active.stack = []
        stack.append(self)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        _active.stack.pop()

    def record(self, name, inputs, output, vjps):
        self.records.append(_Record(name, inputs, output, vjps))


def active_tape():
    stack = getattr(_active, 'stack', None)
    if stack:
        return stack[-1]
    return None


def record(name, inputs, output, vjps):
    """Attach ``output`` to the active tape when any input needs gradients.

    ``vjps`` holds one callable per input mapping the output cotangent to
    that input's cotangent.
    """
    if any(t.requires_grad for t in inputs):
        output.requires_grad = True
        tape = active_tape()
        if tape is not None:
            tape.record(name, inputs, output, vjps)
    return output


def backward(loss, tape, params):
    """Gradients of a scalar ``loss`` for every tensor in ``params``.

    Returns a dict keyed like ``params``; parameters the loss does not depend
    on get zero arrays.
    """
    if loss.size != 1:
        raise ContractError('backward needs a scalar loss, got shape %s' % (loss.shape,))
    grads = {loss.uid: np.ones_like(loss.data)}
    for rec in reversed(tape.records):
        g = grads.pop(rec.output.uid, None)
        if g is None:
            continue
        for tensor, vjp in zip(rec.inputs, rec.vjps):
            if not tensor.requires_grad:
                continue
            contribution = vjp(g)
            if contribution.shape != tensor.shape:
                raise DimensionError('%s produced a gradient of shape %s for input %s'
                                     % (rec.name, contribution.shape, tensor.shape))
            if tensor.uid in grads:
                grads[tensor.uid] = grads[tensor.uid] + contribution
            else:
                grads[tensor.uid] = contribution
    result = {}
    for name, tensor in params.items():
        g = grads.get(tensor.uid)
        result[name] = np.zeros_like(tensor.data) if g is None else g.astype(tensor.dtype, copy=False)
    return result

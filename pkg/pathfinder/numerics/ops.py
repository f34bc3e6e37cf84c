"""Differentiable primitives over :class:`Tensor`.

Only the shapes the transformer needs are supported: 2-D matrices, row
vectors broadcast across rows, and scalar reductions.
"""
import math

import numpy as np
from scipy.special import erf

from pathfinder.errors import DimensionError
from pathfinder.numerics.tensor import Tensor, as_tensor, record

SQRT_HALF = math.sqrt(0.5)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _require_2d(name, t):
    if t.ndim != 2:
        raise DimensionError('%s expects a 2-D tensor, got shape %s' % (name, t.shape))


def _row_broadcast(name, a, b):
    """True when ``b`` is a row vector added across the rows of ``a``."""
    if a.shape == b.shape:
        return False
    if b.ndim == 1 and a.ndim == 2 and a.shape[1] == b.shape[0]:
        return True
    raise DimensionError('%s: incompatible shapes %s and %s' % (name, a.shape, b.shape))


def matmul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _require_2d('matmul', a)
    _require_2d('matmul', b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError('matmul: inner dimensions differ, %s @ %s' % (a.shape, b.shape))
    out = Tensor(a.data @ b.data)
    return record('matmul', (a, b), out, (
        lambda g: g @ b.data.T,
        lambda g: a.data.T @ g,
    ))


def add(a, b):
    a, b = as_tensor(a), as_tensor(b)
    broadcast = _row_broadcast('add', a, b)
    out = Tensor(a.data + b.data)
    return record('add', (a, b), out, (
        lambda g: g,
        (lambda g: g.sum(axis=0)) if broadcast else (lambda g: g),
    ))


def sub(a, b):
    a, b = as_tensor(a), as_tensor(b)
    broadcast = _row_broadcast('sub', a, b)
    out = Tensor(a.data - b.data)
    return record('sub', (a, b), out, (
        lambda g: g,
        (lambda g: -g.sum(axis=0)) if broadcast else (lambda g: -g),
    ))


def mul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    if a.shape != b.shape:
        raise DimensionError('mul: shapes differ, %s and %s' % (a.shape, b.shape))
    out = Tensor(a.data * b.data)
    return record('mul', (a, b), out, (
        lambda g: g * b.data,
        lambda g: g * a.data,
    ))


def scale(a, factor):
    a = as_tensor(a)
    factor = float(factor)
    out = Tensor(a.data * a.dtype.type(factor))
    return record('scale', (a,), out, (lambda g: g * g.dtype.type(factor),))


def transpose(a):
    a = as_tensor(a)
    _require_2d('transpose', a)
    out = Tensor(a.data.T)
    return record('transpose', (a,), out, (lambda g: g.T,))


def slice_cols(a, start, stop):
    a = as_tensor(a)
    _require_2d('slice_cols', a)
    if not 0 <= start < stop <= a.shape[1]:
        raise DimensionError('slice_cols: [%d, %d) outside %d columns' % (start, stop, a.shape[1]))
    out = Tensor(a.data[:, start:stop])

    def vjp(g):
        full = np.zeros_like(a.data)
        full[:, start:stop] = g
        return full
    return record('slice_cols', (a,), out, (vjp,))


def concat_cols(tensors):
    tensors = [as_tensor(t) for t in tensors]
    for t in tensors:
        _require_2d('concat_cols', t)
    if len({t.shape[0] for t in tensors}) != 1:
        raise DimensionError('concat_cols: row counts differ')
    out = Tensor(np.concatenate([t.data for t in tensors], axis=1))
    bounds = np.cumsum([0] + [t.shape[1] for t in tensors])
    vjps = tuple(
        (lambda g, lo=lo, hi=hi: g[:, lo:hi]) for lo, hi in zip(bounds[:-1], bounds[1:])
    )
    return record('concat_cols', tuple(tensors), out, vjps)


def take_rows(table, indices):
    """Gather rows of ``table``; ``indices`` is a plain integer array."""
    table = as_tensor(table)
    _require_2d('take_rows', table)
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size and (indices.min() < 0 or indices.max() >= table.shape[0]):
        raise DimensionError('take_rows: index outside table of %d rows' % table.shape[0])
    out = Tensor(table.data[indices])

    def vjp(g):
        full = np.zeros_like(table.data)
        np.add.at(full, indices, g)
        return full
    return record('take_rows', (table,), out, (vjp,))


def gelu(a):
    """Exact GELU, x * Phi(x)."""
    a = as_tensor(a)
    x = a.data
    cdf = 0.5 * (1.0 + erf(x * SQRT_HALF))
    out = Tensor((x * cdf).astype(a.dtype, copy=False))

    def vjp(g):
        pdf = INV_SQRT_2PI * np.exp(-0.5 * x * x)
        return (g * (cdf + x * pdf)).astype(a.dtype, copy=False)
    return record('gelu', (a,), out, (vjp,))


def softmax_masked(x, mask):
    """Row softmax over entries whose additive mask is 0.

    Blocked entries (mask -inf) come out as exact zeros and a fully blocked
    row is all zeros.
    """
    x = as_tensor(x)
    _require_2d('softmax_masked', x)
    if not isinstance(mask, Tensor):
        mask = Tensor(mask, dtype=x.dtype, allow_inf=True)
    if mask.shape != x.shape:
        raise DimensionError('softmax_masked: mask shape %s, input %s' % (mask.shape, x.shape))
    allowed = mask.data == 0
    shifted = np.where(allowed, x.data, -np.inf)
    row_max = shifted.max(axis=1, keepdims=True)
    row_max = np.where(np.isfinite(row_max), row_max, 0.0)
    e = np.where(allowed, np.exp(np.where(allowed, x.data - row_max, 0.0)), 0.0)
    total = e.sum(axis=1, keepdims=True)
    y = (e / np.where(total > 0, total, 1.0)).astype(x.dtype, copy=False)
    out = Tensor(y)

    def vjp(g):
        return (y * (g - (g * y).sum(axis=1, keepdims=True))).astype(x.dtype, copy=False)
    return record('softmax_masked', (x,), out, (vjp,))


def layer_norm(x, gain, bias, eps=1e-5):
    x, gain, bias = as_tensor(x), as_tensor(gain), as_tensor(bias)
    d = x.shape[-1]
    if gain.shape != (d,) or bias.shape != (d,):
        raise DimensionError('layer_norm: gain/bias must have shape (%d,)' % d)
    rows = x.data.reshape(-1, d)
    mean = rows.mean(axis=1, keepdims=True)
    centred = rows - mean
    var = (centred * centred).mean(axis=1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = centred * inv_std
    out = Tensor((xhat * gain.data + bias.data).reshape(x.shape).astype(x.dtype, copy=False))

    def vjp_x(g):
        g = g.reshape(-1, d)
        dxhat = g * gain.data
        dx = inv_std * (dxhat - dxhat.mean(axis=1, keepdims=True)
                        - xhat * (dxhat * xhat).mean(axis=1, keepdims=True))
        return dx.reshape(x.shape).astype(x.dtype, copy=False)

    def vjp_gain(g):
        return (g.reshape(-1, d) * xhat).sum(axis=0).astype(gain.dtype, copy=False)

    def vjp_bias(g):
        return g.reshape(-1, d).sum(axis=0).astype(bias.dtype, copy=False)
    return record('layer_norm', (x, gain, bias), out, (vjp_x, vjp_gain, vjp_bias))


def sum_all(a):
    a = as_tensor(a)
    out = Tensor(a.data.sum())
    return record('sum_all', (a,), out, (lambda g: np.full_like(a.data, g),))


def mean_all(a):
    a = as_tensor(a)
    n = a.size
    out = Tensor(a.data.mean())
    return record('mean_all', (a,), out, (lambda g: np.full_like(a.data, g / n),))


def square(a):
    return mul(a, a)


def dropout(a, keep_mask, rate):
    """Inverted dropout with a precomputed boolean keep mask."""
    a = as_tensor(a)
    if rate <= 0.0:
        return a
    factor = np.where(keep_mask, 1.0 / (1.0 - rate), 0.0).astype(a.dtype)
    return mul(a, Tensor(factor))

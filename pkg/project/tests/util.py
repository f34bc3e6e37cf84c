import numpy as np

from pathfinder.numerics import ParamStore, Tape, backward
from pathfinder.patchnet.hyper import Hyper


def finite_difference(loss_fn, params, h=1e-5):
    """Central differences of ``loss_fn(params) -> float`` for every scalar of every parameter."""
    grads = {}
    for name in params:
        base = params[name].data
        grad = np.zeros_like(base)
        for idx in np.ndindex(base.shape):
            plus, minus = base.copy(), base.copy()
            plus[idx] += h
            minus[idx] -= h
            f_plus = loss_fn(params.replace({name: plus}))
            f_minus = loss_fn(params.replace({name: minus}))
            grad[idx] = (f_plus - f_minus) / (2.0 * h)
        grads[name] = grad
    return grads


def taped_gradients(loss_fn, params):
    with Tape() as tape:
        loss = loss_fn(params)
    return backward(loss, tape, params)


def max_relative_error(analytic, numeric):
    """Largest gradient error, relative to the gradient's own scale (floored at 1)."""
    worst = 0.0
    for name in numeric:
        a, n = np.asarray(analytic[name]), np.asarray(numeric[name])
        scale = max(1.0, float(np.abs(n).max(initial=0.0)))
        worst = max(worst, float(np.abs(a - n).max(initial=0.0)) / scale)
    return worst


def random_params(rng, shapes, dtype=np.float64):
    return ParamStore({name: rng.normal(size=shape).astype(dtype) for name, shape in shapes.items()})


def tiny_hyper(**overrides):
    """Networks small enough to train on a handful of 32x24 frames."""
    values = dict(patch_size=4, dim=8, depth=1, head_dim=4, heads=2, token_dropout=0.0, embed_dropout=0.0,
                  alpha=1.0, learning_rate=1e-2, epochs=2, batch_size=4, frame_stride=1, planes=3, grid_size=8)
    values.update(overrides)
    return Hyper(**values)

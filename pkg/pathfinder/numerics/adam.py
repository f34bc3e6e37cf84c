from dataclasses import dataclass, field

import numpy as np

from pathfinder.errors import DimensionError
from pathfinder.numerics.params import ParamStore


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adam_step(params, grads, state):
    """One bias-corrected Adam update; returns ``(params, state)``.

    Neither input is modified.
    """
    t = state.t + 1
    m, v, updated = {}, {}, {}
    c1 = 1.0 - state.beta1 ** t
    c2 = 1.0 - state.beta2 ** t
    for name in params:
        theta = params[name].data
        g = np.asarray(grads[name])
        if g.shape != theta.shape:
            raise DimensionError('gradient for %s has shape %s, parameter %s'
                                 % (name, g.shape, theta.shape))
        m_prev = state.m.get(name)
        v_prev = state.v.get(name)
        if m_prev is None:
            m_prev = np.zeros_like(theta)
            v_prev = np.zeros_like(theta)
        elif m_prev.shape != theta.shape:
            raise DimensionError('moment for %s has shape %s' % (name, m_prev.shape))
        m[name] = state.beta1 * m_prev + (1.0 - state.beta1) * g
        v[name] = state.beta2 * v_prev + (1.0 - state.beta2) * g * g
        m_hat = m[name] / c1
        v_hat = v[name] / c2
        updated[name] = (theta - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)).astype(theta.dtype)
    new_state = AdamState(lr=state.lr, beta1=state.beta1, beta2=state.beta2, eps=state.eps,
                          t=t, m=m, v=v)
    return ParamStore(updated), new_state

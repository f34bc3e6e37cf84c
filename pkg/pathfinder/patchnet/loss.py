import numpy as np

from pathfinder.errors import DimensionError
from pathfinder.numerics import ops
from pathfinder.numerics.tensor import Tensor, as_tensor


def _squared_error(estimates, target):
    target = Tensor(np.asarray(target, dtype=estimates.dtype).reshape(2), dtype=estimates.dtype)
    return ops.scale(ops.sum_all(ops.square(ops.sub(estimates, target))), 0.5)


def nlos_loss(positions, velocities, gt_position, gt_velocity, alpha):
    """Sum over examples of MSE(X, X_m) + alpha * MSE(V, V_m).

    ``positions`` and ``velocities`` are ``(M, 2)`` tensors; the MSE runs over
    the two components. ``velocities`` may be ``None`` when ``alpha`` is 0.
    """
    positions = as_tensor(positions)
    if positions.ndim != 2 or positions.shape[1] != 2:
        raise DimensionError('position estimates must be (M, 2), got %s' % (positions.shape,))
    loss = _squared_error(positions, gt_position)
    if alpha > 0:
        velocities = as_tensor(velocities)
        if velocities.shape != positions.shape:
            raise DimensionError('velocity estimates %s do not match positions %s'
                                 % (velocities.shape, positions.shape))
        loss = ops.add(loss, ops.scale(_squared_error(velocities, gt_velocity), alpha))
    return loss

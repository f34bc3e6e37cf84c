from dataclasses import dataclass

import numpy as np

from pathfinder.errors import ContractError
from pathfinder.geometry.plane import Plane3D, PlaneTransform, apply_plane_transform, reflect_point


@dataclass(frozen=True, eq=False)
class GlobalEstimate:
    """A per-plane estimate in global metres with z and z-velocity forced to 0."""

    position: np.ndarray
    velocity: np.ndarray
    plane_id: int
    normal: np.ndarray
    offset: float
    rank: int
    area: int = 1

    def __post_init__(self):
        position = np.zeros(3)
        velocity = np.zeros(3)
        position[:2] = np.asarray(self.position, dtype=np.float64).reshape(-1)[:2]
        velocity[:2] = np.asarray(self.velocity, dtype=np.float64).reshape(-1)[:2]
        object.__setattr__(self, 'position', position)
        object.__setattr__(self, 'velocity', velocity)
        object.__setattr__(self, 'normal', np.asarray(self.normal, dtype=np.float64).reshape(3))
        object.__setattr__(self, 'offset', float(self.offset))

    @property
    def plane(self):
        return Plane3D(normal=self.normal, offset=self.offset)


def to_global(estimate, room_scale, frame_interval=1.0, rank=None):
    """De-normalise a network estimate, move it through ``T_m`` and zero z.

    Velocities come out in metres per second.
    """
    T = PlaneTransform.from_list(estimate.transform)
    x_cam = np.array([estimate.position[0], estimate.position[1], 0.0]) * room_scale
    v_cam = np.array([estimate.velocity[0], estimate.velocity[1], 0.0]) * room_scale / frame_interval
    return GlobalEstimate(
        position=apply_plane_transform(T, x_cam),
        velocity=T.rotation @ v_cam,
        plane_id=estimate.plane_id,
        normal=estimate.normal,
        offset=estimate.offset,
        rank=estimate.example if rank is None else rank,
        area=estimate.area,
    )


def propagate(x, v, dt):
    if dt < 0:
        raise ContractError('propagation step must be non-negative, got %r' % dt)
    return np.asarray(x, dtype=np.float64) + np.asarray(v, dtype=np.float64) * dt


def reflect_fn(x, v, normal, offset, dt):
    """Propagate, lift to the z = 0 plane, mirror across the wall and drop z again."""
    moved = propagate(np.asarray(x, dtype=np.float64)[:2], np.asarray(v, dtype=np.float64)[:2], dt)
    lifted = np.array([moved[0], moved[1], 0.0])
    mirrored = reflect_point(lifted, Plane3D(normal=normal, offset=offset))
    mirrored[2] = 0.0
    return mirrored

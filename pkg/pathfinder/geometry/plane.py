from dataclasses import dataclass

import numpy as np

from pathfinder.errors import ConfigurationError, DimensionError
from pathfinder.geometry.poses import rotation_z


@dataclass(frozen=True, eq=False)
class Plane3D:
    """Plane ``N . x = d`` with a rectangular extent given by four corners."""

    normal: np.ndarray
    offset: float
    corners: np.ndarray = None

    def __post_init__(self):
        normal = np.asarray(self.normal, dtype=np.float64).reshape(3)
        if abs(np.linalg.norm(normal) - 1.0) > 1e-12:
            raise ConfigurationError('plane normal must be unit length', key='normal')
        object.__setattr__(self, 'normal', normal)
        object.__setattr__(self, 'offset', float(self.offset))
        if self.corners is not None:
            corners = np.asarray(self.corners, dtype=np.float64).reshape(4, 3)
            if np.abs(corners @ normal - self.offset).max() >= 1e-9:
                raise ConfigurationError('plane corners are not on the plane', key='corners')
            object.__setattr__(self, 'corners', corners)

    def signed_distance(self, x):
        return np.asarray(x, dtype=np.float64) @ self.normal - self.offset

    def to_dict(self):
        data = {'normal': [float(v) for v in self.normal], 'offset': self.offset}
        if self.corners is not None:
            data['corners'] = [[float(v) for v in c] for c in self.corners]
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(normal=data['normal'], offset=data['offset'], corners=data.get('corners'))


def reflect_point(x, plane):
    x = np.asarray(x, dtype=np.float64)
    distance = x @ plane.normal - plane.offset
    return x - 2.0 * np.multiply.outer(distance, plane.normal)


@dataclass(frozen=True, eq=False)
class PlaneTransform:
    """3x4 ``[R | t]`` taking homogeneous camera-frame points to global."""

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.float64)
        if matrix.shape != (3, 4):
            raise DimensionError('plane transform must be 3x4, got %s' % (matrix.shape,))
        R = matrix[:, :3]
        if not np.allclose(R.T @ R, np.eye(3), atol=1e-9) or abs(np.linalg.det(R) - 1.0) > 1e-9:
            raise ConfigurationError('plane transform rotation block is not a rotation', key='transform')
        object.__setattr__(self, 'matrix', matrix)

    @property
    def rotation(self):
        return self.matrix[:, :3]

    @property
    def translation(self):
        return self.matrix[:, 3]

    def inverse(self):
        R = self.rotation
        return PlaneTransform(np.column_stack([R.T, -R.T @ self.translation]))

    def to_list(self):
        return [float(v) for v in self.matrix.reshape(-1)]

    @classmethod
    def from_list(cls, values):
        return cls(np.asarray(values, dtype=np.float64).reshape(3, 4))

    @classmethod
    def identity(cls):
        return cls(np.column_stack([np.eye(3), np.zeros(3)]))


def apply_plane_transform(T, x_cam):
    x_cam = np.asarray(x_cam, dtype=np.float64)
    return x_cam @ T.rotation.T + T.translation


def heading_transform(pose):
    """Camera heading frame: camera position, yaw-only rotation about global z.

    Estimates expressed in this frame lie in a plane parallel to the floor,
    so a 2-D estimate ``(a, b)`` lifts to ``(a, b, 0)``.
    """
    return PlaneTransform(np.column_stack([rotation_z(pose.yaw), pose.p]))

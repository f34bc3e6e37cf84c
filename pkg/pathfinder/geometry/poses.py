"""Rigid camera poses and the pinhole model.

Convention: ``R`` maps camera-frame vectors into the global frame, so a
global point ``x`` has camera coordinates ``R.T @ (x - p)``. The camera
looks along +z with +x to the right and +y down the image.
"""
import math
from dataclasses import dataclass

import numpy as np

from pathfinder.errors import ConfigurationError, DimensionError

ORTHONORMAL_TOLERANCE = 1e-9


def _as_rotation(R):
    R = np.asarray(R, dtype=np.float64)
    if R.shape != (3, 3):
        raise DimensionError('rotation must be 3x3, got %s' % (R.shape,))
    if not np.allclose(R.T @ R, np.eye(3), atol=ORTHONORMAL_TOLERANCE):
        raise ConfigurationError('rotation is not orthonormal')
    if abs(np.linalg.det(R) - 1.0) > ORTHONORMAL_TOLERANCE:
        raise ConfigurationError('rotation has determinant %r' % np.linalg.det(R))
    return R


@dataclass(frozen=True, eq=False)
class Pose:
    p: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64).reshape(3)
        object.__setattr__(self, 'p', p)
        object.__setattr__(self, 'R', _as_rotation(self.R))

    def to_camera(self, x):
        return (np.asarray(x, dtype=np.float64) - self.p) @ self.R

    def to_global(self, x_cam):
        return np.asarray(x_cam, dtype=np.float64) @ self.R.T + self.p

    @property
    def forward(self):
        return self.R[:, 2]

    @property
    def yaw(self):
        f = self.forward
        return math.atan2(f[1], f[0])

    def as_lists(self):
        return [float(v) for v in self.p], [[float(v) for v in row] for row in self.R]


def rotation_z(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_from_axis_angle(axis_angle):
    """Rodrigues' formula for a rotation vector."""
    w = np.asarray(axis_angle, dtype=np.float64)
    theta = float(np.linalg.norm(w))
    if theta < 1e-15:
        return np.eye(3)
    k = w / theta
    K = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + math.sin(theta) * K + (1.0 - math.cos(theta)) * (K @ K)


def look_at(position, target, up=(0.0, 0.0, 1.0)):
    position = np.asarray(position, dtype=np.float64)
    forward = np.asarray(target, dtype=np.float64) - position
    norm = np.linalg.norm(forward)
    if norm < 1e-12:
        raise ConfigurationError('look_at target coincides with the camera position')
    forward = forward / norm
    right = np.cross(forward, np.asarray(up, dtype=np.float64))
    if np.linalg.norm(right) < 1e-9:
        raise ConfigurationError('look_at direction is parallel to the up vector')
    right = right / np.linalg.norm(right)
    down = np.cross(forward, right)
    return Pose(p=position, R=np.column_stack([right, down, forward]))


@dataclass(frozen=True)
class Intrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ConfigurationError('focal lengths must be positive', key='intrinsics')
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ConfigurationError('principal point outside the image', key='intrinsics')

    @classmethod
    def from_fov(cls, width, height, hfov_deg=69.0, vfov_deg=42.0):
        fx = (width / 2.0) / math.tan(math.radians(hfov_deg) / 2.0)
        fy = (height / 2.0) / math.tan(math.radians(vfov_deg) / 2.0)
        return cls(fx=fx, fy=fy, cx=(width - 1) / 2.0, cy=(height - 1) / 2.0,
                   width=int(width), height=int(height))

    @property
    def matrix(self):
        return np.array([[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]])

    def to_dict(self):
        return {'fx': self.fx, 'fy': self.fy, 'cx': self.cx, 'cy': self.cy,
                'width': self.width, 'height': self.height}


def project_points(pose, K, points):
    """Project global points; returns ``(uv, in_front)``.

    ``uv`` holds NaN for points at camera-frame z <= 0.
    """
    cam = pose.to_camera(np.atleast_2d(points))
    in_front = cam[:, 2] > 0
    z = np.where(in_front, cam[:, 2], 1.0)
    uv = np.column_stack([K.fx * cam[:, 0] / z + K.cx, K.fy * cam[:, 1] / z + K.cy])
    uv[~in_front] = np.nan
    return uv, in_front


def project(pose, K, x):
    """Pixel ``(u, v)`` of a global point, or ``None`` behind the camera."""
    uv, in_front = project_points(pose, K, np.asarray(x, dtype=np.float64).reshape(1, 3))
    if not in_front[0]:
        return None
    return float(uv[0, 0]), float(uv[0, 1])


def pixel_directions(pose, K, u, v):
    """Unit global ray directions through pixel coordinates."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    cam = np.stack([(u - K.cx) / K.fx, (v - K.cy) / K.fy, np.ones_like(u)], axis=-1)
    cam = cam / np.linalg.norm(cam, axis=-1, keepdims=True)
    return cam @ pose.R.T


def back_project(pose, K, uv):
    """Ray ``(origin, unit direction)`` through a pixel."""
    direction = pixel_directions(pose, K, uv[0], uv[1])
    return pose.p.copy(), direction

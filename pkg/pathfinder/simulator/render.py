"""Single-bounce rendering of the relay walls.

The hidden person is an isotropic point source at ``(X.x, X.y, h)``; each
wall is Lambertian with its own reflectivity. Pixel ``(u, v)`` looks through
its centre, so integer coordinates index pixel centres.
"""
import logging

import numpy as np

from pathfinder.geometry.poses import pixel_directions
from pathfinder.numerics.rng import Rng, derive_stream

Logger = logging.getLogger('pathfinder.simulator.render')

NOISE_STREAM = 0x6e6f697365


def source_position(scene, person_x):
    return np.array([person_x[0], person_x[1], scene.source_height], dtype=np.float64)


def radiance_field(points, normal, reflectivity, person_x, scene):
    """Vectorised wall radiance at ``points`` (..., 3) on a wall with inward ``normal``."""
    points = np.asarray(points, dtype=np.float64)
    to_source = source_position(scene, person_x) - points
    r2 = np.sum(to_source * to_source, axis=-1)
    r = np.sqrt(r2)
    cos_theta = np.divide(to_source @ np.asarray(normal, dtype=np.float64), r,
                          out=np.zeros_like(r), where=r > 0)
    falloff = np.maximum(r2, scene.r_min ** 2)
    return scene.ambient + reflectivity * scene.source_intensity * np.maximum(0.0, cos_theta) / falloff


def radiance_at(q, wall_id, person_x, scene):
    plane = scene.wall_plane(wall_id)
    rho = scene.walls[wall_id].reflectivity
    return float(radiance_field(np.asarray(q, dtype=np.float64).reshape(3), plane.normal, rho, person_x, scene))


def intersect_walls(scene, origin, directions):
    """Ray parameter to each wall rectangle, ``inf`` where the ray misses.

    Returns an array of shape ``(walls,) + directions.shape[:-1]``.
    """
    origin = np.asarray(origin, dtype=np.float64)
    directions = np.asarray(directions, dtype=np.float64)
    low = np.asarray(scene.room.low)
    high = np.asarray(scene.room.high)
    hits = np.full((len(scene.walls),) + directions.shape[:-1], np.inf)
    with np.errstate(divide='ignore', invalid='ignore'):
        for wall_id, plane in enumerate(scene.planes()):
            axis = int(np.argmax(np.abs(plane.normal)))
            value = plane.offset * plane.normal[axis]
            d = directions[..., axis]
            t = (value - origin[axis]) / d
            valid = (d != 0) & (t > 0)
            point = origin + t[..., None] * directions
            for other in range(3):
                if other == axis:
                    continue
                valid &= (point[..., other] >= low[other]) & (point[..., other] <= high[other])
            hits[wall_id] = np.where(valid, t, np.inf)
    return hits


def render_frame(scene, pose, person_x, frame_index=0):
    """Render one grayscale frame and the per-wall masks.

    The nearest hit wins; equal distances go to the lower wall id. Noise is
    drawn from a stream derived from the scene seed and ``frame_index``.
    """
    K = scene.intrinsics
    v, u = np.mgrid[0:K.height, 0:K.width].astype(np.float64)
    directions = pixel_directions(pose, K, u, v)
    hits = intersect_walls(scene, pose.p, directions)
    nearest = np.argmin(hits, axis=0)
    t = np.take_along_axis(hits, nearest[None], axis=0)[0]
    hit_any = np.isfinite(t)

    image = np.zeros((K.height, K.width), dtype=np.float64)
    masks = {}
    for wall_id, plane in enumerate(scene.planes()):
        mask = hit_any & (nearest == wall_id)
        masks[wall_id] = mask
        if mask.any():
            points = pose.p + t[mask][:, None] * directions[mask]
            image[mask] = radiance_field(points, plane.normal, scene.walls[wall_id].reflectivity,
                                         person_x, scene)
    if scene.noise_sigma > 0:
        rng = Rng(scene.seed, derive_stream(NOISE_STREAM, frame_index))
        image += scene.noise_sigma * rng.normal_array(image.size).reshape(image.shape)
    return image, masks

"""Pixel correspondences on a wall between two frames.

Two sources exist: the simulator projects a grid of known wall points into
both frames, and an external source reads ``u1,v1,u2,v2`` CSV files. An
external directory names its files ``matches_<frame>_<label>.csv`` after the
later frame index and the wall label.
"""
import logging
import os

import numpy as np

from pathfinder.errors import TrackingLoss
from pathfinder.geometry.correspondences import Correspondences, read_matches
from pathfinder.geometry.poses import project_points
from pathfinder.numerics.rng import Rng, derive_stream

Logger = logging.getLogger('pathfinder.planes.matching')

MATCH_STREAM = 0x6d61746368
MIN_MATCHES = 4


def wall_grid(plane, grid):
    """``grid x grid`` cell centres spanning the wall rectangle."""
    c0, c1, _, c3 = plane.corners
    ticks = (np.arange(grid) + 0.5) / grid
    a, b = np.meshgrid(ticks, ticks, indexing='ij')
    return c0 + a.reshape(-1, 1) * (c1 - c0) + b.reshape(-1, 1) * (c3 - c0)


def _visible(uv, in_front, mask):
    height, width = mask.shape
    ok = in_front & np.all(np.isfinite(uv), axis=1)
    ok &= (uv[:, 0] >= 0) & (uv[:, 0] <= width - 1) & (uv[:, 1] >= 0) & (uv[:, 1] <= height - 1)
    cols = np.clip(np.rint(np.nan_to_num(uv[:, 0])).astype(np.int64), 0, width - 1)
    rows = np.clip(np.rint(np.nan_to_num(uv[:, 1])).astype(np.int64), 0, height - 1)
    return ok & mask[rows, cols]


def project_wall_matches(plane, pose_a, pose_b, K, mask_a, mask_b, grid=12,
                         noise_px=0.0, outlier_fraction=0.0, rng=None):
    """Project wall grid points into both frames and keep those visible in both."""
    points = wall_grid(plane, grid)
    uv_a, front_a = project_points(pose_a, K, points)
    uv_b, front_b = project_points(pose_b, K, points)
    keep = _visible(uv_a, front_a, mask_a) & _visible(uv_b, front_b, mask_b)
    src, dst = uv_a[keep], uv_b[keep].copy()
    if src.shape[0] < MIN_MATCHES:
        raise TrackingLoss('only %d wall points visible in both frames' % src.shape[0])
    if (noise_px > 0 or outlier_fraction > 0) and rng is None:
        raise TrackingLoss('perturbed matches need a random stream')
    if noise_px > 0:
        dst += noise_px * rng.normal_array(dst.size).reshape(dst.shape)
    if outlier_fraction > 0:
        count = int(round(outlier_fraction * dst.shape[0]))
        picks = rng.choice(dst.shape[0], count)
        u = rng.uniform_array(2 * count).reshape(count, 2)
        dst[picks] = u * np.array([K.width - 1, K.height - 1])
    return Correspondences(src=src, dst=dst)


class SimulatorMatches(object):
    """Correspondences synthesised from the dataset's ground-truth geometry."""

    def __init__(self, dataset, grid=12, noise_px=0.0, outlier_fraction=0.0):
        self.dataset = dataset
        self.grid = grid
        self.noise_px = noise_px
        self.outlier_fraction = outlier_fraction

    def __call__(self, frame_a, frame_b, label):
        manifest = self.dataset.manifest
        scene = manifest.scene
        rng = Rng(scene.seed, derive_stream(MATCH_STREAM, frame_b, label))
        return project_wall_matches(
            scene.wall_plane(label),
            manifest.frames[frame_a].pose,
            manifest.frames[frame_b].pose,
            scene.intrinsics,
            self.dataset.mask(frame_a, label),
            self.dataset.mask(frame_b, label),
            grid=self.grid,
            noise_px=self.noise_px,
            outlier_fraction=self.outlier_fraction,
            rng=rng,
        )


class FileMatches(object):
    """Externally supplied matches; pairs without a file use ``fallback``."""

    def __init__(self, path, fallback=None):
        self.path = path
        self.fallback = fallback
        self._single = None if os.path.isdir(path) else read_matches(path)

    def file_for(self, frame_b, label):
        return os.path.join(self.path, 'matches_%05d_%03d.csv' % (frame_b, label))

    def __call__(self, frame_a, frame_b, label):
        if self._single is not None:
            matches = self._single
        else:
            name = self.file_for(frame_b, label)
            if not os.path.exists(name):
                if self.fallback is None:
                    raise TrackingLoss('no correspondence file %s' % name)
                return self.fallback(frame_a, frame_b, label)
            matches = read_matches(name)
        if len(matches) < MIN_MATCHES:
            raise TrackingLoss('only %d external matches for frame %d label %d' % (len(matches), frame_b, label))
        return matches


def plane_matches(frame_a, frame_b, label, source):
    """Correspondences on wall ``label`` between two frames from ``source``."""
    matches = source(frame_a, frame_b, label)
    Logger.debug('Frames %d->%d label %d: %d matches' % (frame_a, frame_b, label, len(matches)))
    return matches

"""Frame pairs ``(i, i+1)`` turned into network inputs and targets.

Targets are expressed in the camera heading frame of frame ``i+1`` and
normalised by the room scale: the position target is ``X(t_i)``, the
velocity target ``V(t_{i+1})`` as displacement per frame interval.
"""
import logging
from dataclasses import dataclass, replace

import numpy as np

from pathfinder.errors import PipelineStall
from pathfinder.geometry.plane import apply_plane_transform
from pathfinder.patchnet.tokens import TAG_CURRENT, TAG_DIFF, TAG_PREVIOUS, patchify
from pathfinder.planes.tracking import select_top_m

Logger = logging.getLogger('pathfinder.patchnet.pairs')


@dataclass(frozen=True, eq=False)
class FramePair:
    frame: int
    time: float
    entries: tuple
    position_tokens: tuple
    velocity_tokens: tuple
    target_position: np.ndarray
    target_velocity: np.ndarray


def heading_coordinates(entry, global_xy, room_scale):
    """Planar global point to normalised heading-frame coordinates."""
    T = entry.plane_transform
    x, y = np.asarray(global_xy, dtype=np.float64)[:2]
    return apply_plane_transform(T.inverse(), [x, y, T.translation[2]])[:2] / room_scale


def heading_velocity(entry, global_v, room_scale, frame_interval):
    R2 = entry.plane_transform.rotation[:2, :2]
    return R2.T @ np.asarray(global_v, dtype=np.float64) * frame_interval / room_scale


def frame_pairs(index, manifest, hyper, frames=None):
    """Build one :class:`FramePair` per usable frame pair.

    ``frames`` restricts the later frames considered; by default every
    ``frame_stride``-th pair is used. Pairs with no tracked plane are skipped.
    """
    if frames is None:
        frames = range(1, len(index), hyper.frame_stride)
    pairs = []
    for frame in frames:
        try:
            chosen, short = select_top_m(index.paired(frame), hyper.planes)
        except PipelineStall:
            Logger.debug('Frame %d has no tracked plane; skipped' % frame)
            continue
        if short:
            Logger.debug('Frame %d has %d of %d planes' % (frame, len(chosen), hyper.planes))
        position_tokens = []
        velocity_tokens = []
        for m, entry in enumerate(chosen):
            previous = index.masked_plane(index.entry(frame - 1, entry.plane_id))
            current = index.masked_plane(entry)
            position_tokens.append(tuple(patchify(previous, hyper.patch_size, m, TAG_PREVIOUS)
                                         + patchify(current, hyper.patch_size, m, TAG_CURRENT)))
            if hyper.uses_velocity:
                diff = patchify(index.diff_plane(entry), hyper.patch_size, m, TAG_DIFF)
                if not diff:
                    # no valid overlap: fall back to the current plane's footprint with zero signal
                    diff = [replace(t, pixels=np.zeros_like(t.pixels), tag=TAG_DIFF)
                            for t in patchify(current, hyper.patch_size, m, TAG_CURRENT)]
                velocity_tokens.append(tuple(diff))
        record_prev = manifest.frames[frame - 1]
        record = manifest.frames[frame]
        anchor = chosen[0]
        pairs.append(FramePair(
            frame=frame,
            time=record.time,
            entries=tuple(chosen),
            position_tokens=tuple(position_tokens),
            velocity_tokens=tuple(velocity_tokens),
            target_position=heading_coordinates(anchor, record_prev.person_x, index.room_scale),
            target_velocity=heading_velocity(anchor, record.person_v, index.room_scale, index.frame_interval),
        ))
    return pairs

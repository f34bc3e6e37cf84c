import logging
from dataclasses import dataclass, field

import numpy as np

from pathfinder.errors import DimensionError, PipelineStall
from pathfinder.geometry.homography import warp_image
from pathfinder.planes.masked import first_pixel

Logger = logging.getLogger('pathfinder.planes.tracking')

# warped-mask coverage that counts as inside for overlap scoring
OVERLAP_COVERAGE = 0.5


@dataclass
class PlaneTrack:
    id: int
    label: int
    first: int
    last: int
    normal: tuple
    offset: float
    homographies: list = field(default_factory=list)

    @property
    def span(self):
        return self.last - self.first + 1

    def extend(self, frame, homography):
        self.homographies.append(homography)
        self.last = frame

    def to_dict(self):
        return {
            'id': self.id,
            'label': self.label,
            'first': self.first,
            'last': self.last,
            'normal': list(self.normal),
            'offset': self.offset,
            'homographies': [H.to_list() for H in self.homographies],
        }


@dataclass(frozen=True)
class IdAssignment:
    ids: tuple
    retired: tuple
    next_id: int
    scores: tuple = ()


def iou(a, b):
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.shape != b.shape:
        raise DimensionError('masks %s and %s differ in shape' % (a.shape, b.shape))
    union = np.count_nonzero(a | b)
    if union == 0:
        return 0.0
    return np.count_nonzero(a & b) / union


def warp_mask(mask, H, out_shape=None):
    return warp_image(np.asarray(mask, dtype=np.float64), H, out_shape) >= OVERLAP_COVERAGE


def assign_ids(prev_masks, homographies, new_masks, iou_threshold=0.5, next_id=0):
    """Carry plane IDs into the new frame by warped-mask overlap.

    ``prev_masks`` maps live IDs to their previous-frame masks; tracks
    without an entry in ``homographies`` cannot be warped and retire.
    Matching is greedy in descending IoU; ties go to the lower old ID, then
    to the new mask whose first pixel comes first in row-major order.
    Unmatched new masks take fresh IDs in that same order.
    """
    new_masks = [np.asarray(m, dtype=bool) for m in new_masks]
    order = {j: first_pixel(m) for j, m in enumerate(new_masks)}
    candidates = []
    for old_id in sorted(prev_masks):
        if old_id not in homographies:
            continue
        shape = new_masks[0].shape if new_masks else prev_masks[old_id].shape
        warped = warp_mask(prev_masks[old_id], homographies[old_id], shape)
        for j, mask in enumerate(new_masks):
            score = iou(warped, mask)
            if score >= iou_threshold:
                candidates.append((-score, old_id, order[j], j))
    candidates.sort()

    ids = [None] * len(new_masks)
    used = set()
    scores = []
    for neg_score, old_id, _, j in candidates:
        if old_id in used or ids[j] is not None:
            continue
        ids[j] = old_id
        used.add(old_id)
        scores.append((old_id, -neg_score))
    for j in sorted(range(len(new_masks)), key=lambda k: (order[k], k)):
        if ids[j] is None:
            ids[j] = next_id
            Logger.debug('New plane ID %d' % next_id)
            next_id += 1
    retired = tuple(old_id for old_id in sorted(prev_masks) if old_id not in used)
    for old_id in retired:
        Logger.debug('Retired plane ID %d' % old_id)
    return IdAssignment(ids=tuple(ids), retired=retired, next_id=next_id, scores=tuple(sorted(scores)))


def select_top_m(planes, m):
    """Largest-area planes first; ties go to the lower plane ID.

    ``planes`` holds objects with ``plane_id`` and ``area``. Returns the
    selection and whether fewer than ``m`` were available.
    """
    planes = list(planes)
    if not planes:
        raise PipelineStall('no visible planes')
    ranked = sorted(planes, key=lambda p: (-p.area, p.plane_id))
    return ranked[:m], len(ranked) < m

from dataclasses import dataclass

import numpy as np

from pathfinder.errors import DimensionError


def mask_bbox(mask):
    """``(row0, col0, row1, col1)`` half-open box around the mask, or ``None``."""
    rows = np.flatnonzero(mask.any(axis=1))
    if rows.size == 0:
        return None
    cols = np.flatnonzero(mask.any(axis=0))
    return int(rows[0]), int(cols[0]), int(rows[-1]) + 1, int(cols[-1]) + 1


def first_pixel(mask):
    """Row-major index of the first mask pixel; empty masks sort last."""
    flat = np.flatnonzero(np.asarray(mask).reshape(-1))
    return int(flat[0]) if flat.size else np.iinfo(np.int64).max


@dataclass(frozen=True, eq=False)
class MaskedPlane:
    plane_id: int
    frame: int
    raster: np.ndarray
    mask: np.ndarray
    bbox: tuple
    area: int

    @property
    def shape(self):
        return self.raster.shape

    def crop(self):
        """``(raster, mask)`` restricted to the bounding box; empty planes give 0x0 arrays."""
        if self.bbox is None:
            return np.zeros((0, 0), dtype=self.raster.dtype), np.zeros((0, 0), dtype=bool)
        r0, c0, r1, c1 = self.bbox
        return self.raster[r0:r1, c0:c1], self.mask[r0:r1, c0:c1]


def mask_apply(image, mask, plane_id=-1, frame=-1):
    image = np.asarray(image, dtype=np.float64)
    mask = np.asarray(mask).astype(bool)
    if image.shape != mask.shape:
        raise DimensionError('image %s and mask %s differ in shape' % (image.shape, mask.shape))
    return MaskedPlane(
        plane_id=int(plane_id),
        frame=int(frame),
        raster=np.where(mask, image, 0.0),
        mask=mask,
        bbox=mask_bbox(mask),
        area=int(np.count_nonzero(mask)),
    )

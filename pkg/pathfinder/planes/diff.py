from dataclasses import dataclass

import numpy as np

from pathfinder.errors import ContractError
from pathfinder.geometry.homography import Homography, warp_image

# the warped previous mask must fully cover a pixel for it to count as valid
FULL_COVERAGE = 1.0 - 1e-9


@dataclass(frozen=True, eq=False)
class DiffImage:
    plane_id: int
    frame: int
    raster: np.ndarray
    valid: np.ndarray


def diff_image(previous, current, H):
    """Current masked plane minus the previous one warped by ``H``."""
    if previous.plane_id != current.plane_id:
        raise ContractError('difference of planes %d and %d' % (previous.plane_id, current.plane_id))
    if not isinstance(H, Homography):
        H = Homography(H)
    shape = current.shape
    warped_mask = warp_image(previous.mask.astype(np.float64), H, shape)
    valid = (warped_mask >= FULL_COVERAGE) & current.mask
    warped = warp_image(previous.raster, H, shape)
    return DiffImage(
        plane_id=current.plane_id,
        frame=current.frame,
        raster=np.where(valid, current.raster - warped, 0.0),
        valid=valid,
    )

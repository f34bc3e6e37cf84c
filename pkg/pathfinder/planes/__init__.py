from pathfinder.planes.diff import DiffImage, diff_image
from pathfinder.planes.masked import MaskedPlane, mask_apply
from pathfinder.planes.matching import FileMatches, SimulatorMatches, plane_matches
from pathfinder.planes.pipeline import PlaneEntry, PlanesIndex, run_planes
from pathfinder.planes.tracking import PlaneTrack, assign_ids, iou, select_top_m

__all__ = [
    'DiffImage', 'FileMatches', 'MaskedPlane', 'PlaneEntry', 'PlaneTrack', 'PlanesIndex',
    'SimulatorMatches', 'assign_ids', 'diff_image', 'iou', 'mask_apply', 'plane_matches',
    'run_planes', 'select_top_m',
]

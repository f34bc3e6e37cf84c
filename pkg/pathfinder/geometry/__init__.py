from pathfinder.geometry.correspondences import Correspondences, parse_matches, read_matches
from pathfinder.geometry.homography import (
    Homography, homography_dlt, ransac_homography, warp_image,
)
from pathfinder.geometry.plane import (
    Plane3D, PlaneTransform, apply_plane_transform, heading_transform, reflect_point,
)
from pathfinder.geometry.poses import (
    Intrinsics, Pose, back_project, look_at, project, project_points,
)

__all__ = [
    'Correspondences', 'Homography', 'Intrinsics', 'Plane3D', 'PlaneTransform', 'Pose',
    'apply_plane_transform', 'back_project', 'heading_transform', 'homography_dlt',
    'look_at', 'parse_matches', 'project', 'project_points', 'ransac_homography',
    'read_matches', 'reflect_point', 'warp_image',
]

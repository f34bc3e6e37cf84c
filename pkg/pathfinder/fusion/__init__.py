from pathfinder.fusion.estimates import GlobalEstimate, propagate, reflect_fn, to_global
from pathfinder.fusion.solver import FusedState, fuse
from pathfinder.fusion.tracking import EstimatedTrack, track

__all__ = [
    'EstimatedTrack', 'FusedState', 'GlobalEstimate', 'fuse', 'propagate', 'reflect_fn',
    'to_global', 'track',
]

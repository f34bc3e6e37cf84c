from pathfinder.simulator.dataset import (
    Dataset, DatasetManifest, FrameRecord, PlaneRecord, generate_dataset, load_manifest,
)
from pathfinder.simulator.render import radiance_at, render_frame
from pathfinder.simulator.scene import Region, SceneConfig, Wall
from pathfinder.simulator.trajectory import Trajectory, bezier_path

__all__ = [
    'Dataset', 'DatasetManifest', 'FrameRecord', 'PlaneRecord', 'Region', 'SceneConfig',
    'Trajectory', 'Wall', 'bezier_path', 'generate_dataset', 'load_manifest', 'radiance_at',
    'render_frame',
]

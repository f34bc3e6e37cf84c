import os
import tempfile

import numpy as np

from pathfinder.geometry.poses import Pose, look_at, rotation_z
from pathfinder.planes.pipeline import run_planes
from pathfinder.simulator.dataset import generate_dataset

from ..factories import SceneConfigFactory


class MockScene(object):
    """
    Small random desk scenes, optionally rendered to disk. Also useful for
    poking at the pipeline by hand.
    """

    def __init__(self, seed=0, **overrides):
        self.rng = np.random.default_rng(seed)
        self.scene = SceneConfigFactory(seed=seed, **overrides)
        self.tmp = None

    def random_pose(self):
        region = self.scene.camera_region
        target = self.scene.target_region
        position = self.rng.uniform(region.low, region.high)
        pose = look_at(position, self.rng.uniform(target.low, target.high))
        return Pose(p=pose.p, R=rotation_z(self.rng.normal(scale=0.02)) @ pose.R)

    def random_person(self):
        region = self.scene.person_region
        return self.rng.uniform(region.low, region.high)

    def workdir(self):
        if self.tmp is None:
            self.tmp = tempfile.TemporaryDirectory(prefix='pathfinder-test-')
        return self.tmp.name

    def dataset(self):
        root = os.path.join(self.workdir(), 'dataset')
        manifest = generate_dataset(self.scene, root)
        return root, manifest

    def planes(self, iou_threshold=None):
        root, manifest = self.dataset()
        out = os.path.join(self.workdir(), 'planes')
        index = run_planes(root, out, iou_threshold=iou_threshold)
        return root, out, manifest, index

    def cleanup(self):
        if self.tmp is not None:
            self.tmp.cleanup()
            self.tmp = None

# -*- coding: utf-8 -*-
import factory
import numpy as np

from pathfinder.fusion.estimates import GlobalEstimate
from pathfinder.geometry.plane import Plane3D
from pathfinder.geometry.poses import Intrinsics, look_at
from pathfinder.simulator.scene import Region, SceneConfig, Wall

WALL_NORMALS = [(1.0, 0.0, 0.0), (0.0, -1.0, 0.0), (-1.0, 0.0, 0.0), (0.0, 1.0, 0.0)]


class PoseFactory(factory.Factory):
    position = factory.Sequence(lambda n: np.array([1.6 + 0.05 * (n % 7), 0.6 + 0.03 * (n % 5), 1.3]))
    target = factory.Sequence(lambda n: np.array([1.0 + 0.2 * (n % 11), 3.5, 1.0]))

    class Meta:
        model = look_at


class PlaneFactory(factory.Factory):
    normal = factory.Iterator(WALL_NORMALS)
    offset = factory.Sequence(lambda n: [0.0, -4.0, -4.0, 0.0][n % 4] + 0.01 * n)

    class Meta:
        model = Plane3D


class SceneConfigFactory(factory.Factory):
    """A scene small enough to render in milliseconds."""

    room = Region((0.0, 0.0, 0.0), (4.0, 4.0, 2.5))
    walls = (Wall('west', 0.75), Wall('north', 0.85), Wall('east', 0.8))
    noise_sigma = 0.0
    fps = 5.0
    duration = 2.0
    intrinsics = factory.LazyFunction(lambda: Intrinsics.from_fov(32, 24))
    seed = factory.Sequence(lambda n: n)

    class Meta:
        model = SceneConfig


class GlobalEstimateFactory(factory.Factory):
    position = factory.Sequence(lambda n: np.array([1.0 + 0.1 * n, 2.0]))
    velocity = factory.LazyFunction(lambda: np.array([0.1, -0.05]))
    plane_id = factory.Sequence(lambda n: n)
    normal = factory.Iterator(WALL_NORMALS)
    offset = factory.Iterator([0.0, -4.0, -4.0, 0.0])
    rank = factory.Sequence(lambda n: n)
    area = 100

    class Meta:
        model = GlobalEstimate

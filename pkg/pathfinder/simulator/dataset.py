import csv
import io
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from pathfinder.config import PathfinderConfig
from pathfinder.errors import DataError
from pathfinder.geometry.plane import Plane3D
from pathfinder.geometry.poses import Pose, look_at, rotation_from_axis_angle, rotation_z
from pathfinder.imageio import decode_pfm, decode_pgm, encode_pfm, encode_pgm
from pathfinder.numerics.rng import Rng, derive_stream
from pathfinder.simulator.render import render_frame
from pathfinder.simulator.scene import SceneConfig
from pathfinder.simulator.trajectory import CONTROL_POINTS, Trajectory, bezier_path
from pathfinder.storage import ArtifactStorage

Logger = logging.getLogger('pathfinder.simulator.dataset')

FORMAT_VERSION = 1
MANIFEST_NAME = 'manifest.json'

CAMERA_STREAM = 1
TARGET_STREAM = 2
PERSON_STREAM = 3
JITTER_STREAM = 4
POSE_NOISE_STREAM = 5


def frame_image_name(index):
    return 'frames/frame_%05d.pfm' % index


def frame_mask_name(index, plane_id):
    return 'masks/frame_%05d_plane_%02d.pgm' % (index, plane_id)


def _floats(values):
    return tuple(float(v) for v in np.asarray(values, dtype=np.float64).reshape(-1))


@dataclass(frozen=True)
class FrameRecord:
    index: int
    time: float
    camera_position: tuple
    camera_rotation: tuple
    estimated_position: tuple
    estimated_rotation: tuple
    person_x: tuple
    person_v: tuple
    image: str
    masks: tuple
    visible_planes: tuple

    @property
    def pose(self):
        return Pose(p=self.camera_position, R=np.reshape(self.camera_rotation, (3, 3)))

    @property
    def estimated_pose(self):
        return Pose(p=self.estimated_position, R=np.reshape(self.estimated_rotation, (3, 3)))

    def mask_path(self, plane_id):
        for pid, path in self.masks:
            if pid == plane_id:
                return path
        return None

    def to_dict(self):
        return {
            'index': self.index,
            'time': self.time,
            'camera': {'p': list(self.camera_position), 'R': list(self.camera_rotation)},
            'estimated_camera': {'p': list(self.estimated_position), 'R': list(self.estimated_rotation)},
            'person': {'x': list(self.person_x), 'v': list(self.person_v)},
            'image': self.image,
            'masks': {str(pid): path for pid, path in self.masks},
            'visible_planes': list(self.visible_planes),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            index=int(data['index']),
            time=float(data['time']),
            camera_position=_floats(data['camera']['p']),
            camera_rotation=_floats(data['camera']['R']),
            estimated_position=_floats(data['estimated_camera']['p']),
            estimated_rotation=_floats(data['estimated_camera']['R']),
            person_x=_floats(data['person']['x']),
            person_v=_floats(data['person']['v']),
            image=str(data['image']),
            masks=tuple(sorted((int(k), str(v)) for k, v in data['masks'].items())),
            visible_planes=tuple(int(v) for v in data['visible_planes']),
        )


@dataclass(frozen=True)
class PlaneRecord:
    id: int
    side: str
    reflectivity: float
    normal: tuple
    offset: float

    @property
    def plane(self):
        return Plane3D(normal=self.normal, offset=self.offset)

    def to_dict(self):
        return {'id': self.id, 'side': self.side, 'reflectivity': self.reflectivity,
                'normal': list(self.normal), 'offset': self.offset}

    @classmethod
    def from_dict(cls, data):
        return cls(id=int(data['id']), side=str(data['side']), reflectivity=float(data['reflectivity']),
                   normal=_floats(data['normal']), offset=float(data['offset']))


@dataclass(frozen=True)
class DatasetManifest:
    scene: SceneConfig
    frames: tuple
    planes: tuple
    format_version: int = FORMAT_VERSION

    def to_dict(self):
        return {
            'format_version': self.format_version,
            'scene': self.scene.to_dict(),
            'frames': [f.to_dict() for f in self.frames],
            'planes': [p.to_dict() for p in self.planes],
        }

    @classmethod
    def from_dict(cls, data, source='<manifest>'):
        try:
            version = int(data['format_version'])
            if version != FORMAT_VERSION:
                raise DataError('unsupported manifest format version %d' % version, source)
            return cls(
                scene=SceneConfig.from_dict(data['scene']),
                frames=tuple(FrameRecord.from_dict(f) for f in data['frames']),
                planes=tuple(PlaneRecord.from_dict(p) for p in data['planes']),
                format_version=version,
            )
        except (KeyError, TypeError, ValueError) as e:
            raise DataError('malformed manifest (%s)' % e, source)

    def person_trajectory(self):
        return Trajectory(
            timestamps=[f.time for f in self.frames],
            positions=[f.person_x for f in self.frames],
            velocities=[f.person_v for f in self.frames],
        )


class Dataset(object):
    """A generated dataset directory opened for reading."""

    def __init__(self, root):
        self.root = root
        self.storage = ArtifactStorage(root)
        if not self.storage.exists(MANIFEST_NAME):
            raise DataError('dataset has no manifest', os.path.join(root, MANIFEST_NAME))
        self.manifest = DatasetManifest.from_dict(self.storage.read_json(MANIFEST_NAME),
                                                  source=self.storage.path(MANIFEST_NAME))
        if not self.manifest.frames:
            raise DataError('dataset has no frames', root)

    def __len__(self):
        return len(self.manifest.frames)

    @property
    def scene(self):
        return self.manifest.scene

    def image(self, index):
        name = self.manifest.frames[index].image
        return decode_pfm(self.storage.read_bytes(name), source=self.storage.path(name))

    def mask(self, index, plane_id):
        name = self.manifest.frames[index].mask_path(plane_id)
        if name is None:
            return np.zeros((self.scene.intrinsics.height, self.scene.intrinsics.width), dtype=bool)
        return decode_pgm(self.storage.read_bytes(name), source=self.storage.path(name))


def _camera_poses(scene, camera_path, target_path):
    jitter = Rng(scene.seed, JITTER_STREAM).normal_array(len(camera_path)) * scene.yaw_jitter
    poses = []
    for k, (p, target) in enumerate(zip(camera_path.positions, target_path.positions)):
        pose = look_at(p, target)
        poses.append(Pose(p=pose.p, R=rotation_z(jitter[k]) @ pose.R))
    return poses


def _estimated_poses(scene, poses):
    rng = Rng(scene.seed, POSE_NOISE_STREAM)
    noise = rng.normal_array(6 * len(poses)).reshape(len(poses), 6)
    estimated = []
    for pose, n in zip(poses, noise):
        R = rotation_from_axis_angle(scene.pose_noise_rotation * n[3:]) @ pose.R
        estimated.append(Pose(p=pose.p + scene.pose_noise_position * n[:3], R=R))
    return estimated


def scene_paths(scene):
    """Camera, look-at target and person paths drawn from the scene seed."""
    camera_ctrl = scene.camera_region.sample(Rng(scene.seed, CAMERA_STREAM), CONTROL_POINTS)
    target_ctrl = scene.target_region.sample(Rng(scene.seed, TARGET_STREAM), CONTROL_POINTS)
    person_ctrl = scene.person_region.sample(Rng(scene.seed, PERSON_STREAM), CONTROL_POINTS)
    return (
        bezier_path(camera_ctrl, scene.duration, scene.fps),
        bezier_path(target_ctrl, scene.duration, scene.fps),
        bezier_path(person_ctrl, scene.duration, scene.fps),
    )


def _camera_csv(times, poses):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(['t', 'px', 'py', 'pz'] + ['r%d%d' % (i, j) for i in range(3) for j in range(3)])
    for t, pose in zip(times, poses):
        writer.writerow([repr(float(v)) for v in (t,) + _floats(pose.p) + _floats(pose.R)])
    return buffer.getvalue()


def generate_dataset(config, out_dir):
    """Render every frame of ``config`` into ``out_dir`` and write the manifest."""
    storage = ArtifactStorage(out_dir)
    camera_path, target_path, person_path = scene_paths(config)
    poses = _camera_poses(config, camera_path, target_path)
    estimated = _estimated_poses(config, poses)
    Logger.info('Simulating %d frames (seed %d) into %s' % (config.frame_count, config.seed, out_dir))

    def render(k):
        return render_frame(config, poses[k], person_path.positions[k], frame_index=k)

    workers = max(1, int(PathfinderConfig().PATHFINDER_WORKERS or 1))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        rendered = list(executor.map(render, range(config.frame_count)))

    frames = []
    for k, (image, masks) in enumerate(rendered):
        storage.save_bytes(frame_image_name(k), encode_pfm(image))
        mask_refs = []
        for plane_id in sorted(masks):
            if masks[plane_id].any():
                name = frame_mask_name(k, plane_id)
                storage.save_bytes(name, encode_pgm(masks[plane_id]))
                mask_refs.append((plane_id, name))
        frames.append(FrameRecord(
            index=k,
            time=float(person_path.timestamps[k]),
            camera_position=_floats(poses[k].p),
            camera_rotation=_floats(poses[k].R),
            estimated_position=_floats(estimated[k].p),
            estimated_rotation=_floats(estimated[k].R),
            person_x=_floats(person_path.positions[k]),
            person_v=_floats(person_path.velocities[k]),
            image=frame_image_name(k),
            masks=tuple(mask_refs),
            visible_planes=tuple(pid for pid, _ in mask_refs),
        ))
        if not mask_refs:
            Logger.warning('Frame %d sees no wall' % k)

    planes = tuple(
        PlaneRecord(id=i, side=wall.side, reflectivity=wall.reflectivity,
                    normal=_floats(plane.normal), offset=plane.offset)
        for i, (wall, plane) in enumerate(zip(config.walls, config.planes()))
    )
    manifest = DatasetManifest(scene=config, frames=tuple(frames), planes=planes)
    storage.save_text('trajectory.csv', person_path.to_csv())
    storage.save_text('camera.csv', _camera_csv(person_path.timestamps, poses))
    storage.save_json(MANIFEST_NAME, manifest.to_dict())
    Logger.info('Wrote dataset manifest %s' % storage.path(MANIFEST_NAME))
    return manifest


def load_manifest(root):
    return Dataset(root).manifest

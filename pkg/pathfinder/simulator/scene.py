import json
import logging
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from pathfinder.errors import ConfigurationError
from pathfinder.geometry.plane import Plane3D
from pathfinder.geometry.poses import Intrinsics

Logger = logging.getLogger('pathfinder.simulator.scene')

SIDES = {
    # side: (axis, bound index into (min, max), inward normal sign)
    'west': (0, 0, 1.0),
    'east': (0, 1, -1.0),
    'south': (1, 0, 1.0),
    'north': (1, 1, -1.0),
    'floor': (2, 0, 1.0),
    'ceiling': (2, 1, -1.0),
}


@dataclass(frozen=True)
class Wall:
    side: str
    reflectivity: float

    def __post_init__(self):
        if self.side not in SIDES:
            raise ConfigurationError('unknown wall side %r' % self.side, key='walls.side')
        if not 0.0 <= self.reflectivity <= 1.0:
            raise ConfigurationError('reflectivity must lie in [0, 1]', key='walls.reflectivity')


@dataclass(frozen=True)
class Region:
    low: tuple
    high: tuple

    def __post_init__(self):
        object.__setattr__(self, 'low', tuple(float(v) for v in self.low))
        object.__setattr__(self, 'high', tuple(float(v) for v in self.high))
        if len(self.low) != len(self.high) or any(l > h for l, h in zip(self.low, self.high)):
            raise ConfigurationError('region bounds are inverted or mismatched', key='region')

    def sample(self, rng, count):
        low = np.asarray(self.low)
        high = np.asarray(self.high)
        u = rng.uniform_array(count * low.size).reshape(count, low.size)
        return low + (high - low) * u

    def contains(self, points):
        points = np.atleast_2d(points)
        return bool(np.all(points >= np.asarray(self.low) - 1e-12)
                    and np.all(points <= np.asarray(self.high) + 1e-12))


def _desk_intrinsics():
    return Intrinsics.from_fov(64, 48, 69.0, 42.0)


@dataclass(frozen=True)
class SceneConfig:
    room: Region = Region((0.0, 0.0, 0.0), (4.0, 4.0, 2.5))
    walls: tuple = (Wall('west', 0.75), Wall('north', 0.85), Wall('east', 0.8))
    ambient: float = 0.02
    source_height: float = 1.0
    source_intensity: float = 1.0
    noise_sigma: float = 0.002
    fps: float = 10.0
    duration: float = 10.0
    intrinsics: Intrinsics = field(default_factory=_desk_intrinsics)
    camera_region: Region = Region((1.5, 0.4, 1.2), (2.5, 1.0, 1.5))
    target_region: Region = Region((0.8, 3.2, 0.8), (3.2, 3.8, 1.4))
    person_region: Region = Region((0.6, 1.6), (3.4, 3.2))
    yaw_jitter: float = 0.01
    pose_noise_position: float = 0.0
    pose_noise_rotation: float = 0.0
    r_min: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if not self.walls:
            raise ConfigurationError('a scene needs at least one wall', key='walls')
        if len({w.side for w in self.walls}) != len(self.walls):
            raise ConfigurationError('duplicate wall side', key='walls')
        for key in ('ambient', 'noise_sigma', 'yaw_jitter', 'pose_noise_position', 'pose_noise_rotation'):
            if getattr(self, key) < 0:
                raise ConfigurationError('%s must be non-negative' % key, key=key)
        for key in ('source_intensity', 'fps', 'duration', 'r_min', 'source_height'):
            if getattr(self, key) <= 0:
                raise ConfigurationError('%s must be positive' % key, key=key)
        if abs(self.fps * self.duration - round(self.fps * self.duration)) > 1e-9:
            raise ConfigurationError('fps * duration must be an integer frame count', key='duration')
        if self.frame_count < 2:
            raise ConfigurationError('a dataset needs at least two frames', key='duration')
        if len(self.room.low) != 3:
            raise ConfigurationError('room bounds must be 3-D', key='room')
        room = Region(self.room.low[:2], self.room.high[:2])
        if not (self.room.contains(np.array(self.camera_region.low))
                and self.room.contains(np.array(self.camera_region.high))):
            raise ConfigurationError('camera region leaves the room', key='camera_region')
        if not (room.contains(np.array(self.person_region.low))
                and room.contains(np.array(self.person_region.high))):
            raise ConfigurationError('person region leaves the room', key='person_region')
        if not self.room.low[2] < self.source_height < self.room.high[2]:
            raise ConfigurationError('source height outside the room', key='source_height')

    @property
    def frame_count(self):
        return int(round(self.fps * self.duration))

    @property
    def frame_interval(self):
        return self.duration / (self.frame_count - 1)

    @property
    def room_scale(self):
        low, high = self.room.low, self.room.high
        return max(high[0] - low[0], high[1] - low[1])

    def wall_plane(self, wall_id):
        axis, bound, sign = SIDES[self.walls[wall_id].side]
        low = np.asarray(self.room.low)
        high = np.asarray(self.room.high)
        value = (low, high)[bound][axis]
        normal = np.zeros(3)
        normal[axis] = sign
        others = [a for a in range(3) if a != axis]
        corners = []
        for ca, cb in ((0, 0), (1, 0), (1, 1), (0, 1)):
            c = np.zeros(3)
            c[axis] = value
            c[others[0]] = (low, high)[ca][others[0]]
            c[others[1]] = (low, high)[cb][others[1]]
            corners.append(c)
        return Plane3D(normal=normal, offset=sign * value, corners=np.array(corners))

    def planes(self):
        return [self.wall_plane(i) for i in range(len(self.walls))]

    def to_dict(self):
        data = asdict(self)
        data['room'] = {'min': list(self.room.low), 'max': list(self.room.high)}
        for key in ('camera_region', 'target_region', 'person_region'):
            region = getattr(self, key)
            data[key] = {'min': list(region.low), 'max': list(region.high)}
        data['walls'] = [{'side': w.side, 'reflectivity': w.reflectivity} for w in self.walls]
        data['intrinsics'] = self.intrinsics.to_dict()
        return data

    @classmethod
    def from_dict(cls, data):
        """Strict parse: unknown keys are rejected, missing keys take desk defaults."""
        if not isinstance(data, dict):
            raise ConfigurationError('scene config must be a JSON object', key='scene')
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigurationError('unknown scene key', key=key)
        values = {}
        try:
            for key, raw in data.items():
                if key in ('room', 'camera_region', 'target_region', 'person_region'):
                    _check_keys(raw, {'min', 'max'}, key)
                    values[key] = Region(raw['min'], raw['max'])
                elif key == 'walls':
                    walls = []
                    for wall in raw:
                        _check_keys(wall, {'side', 'reflectivity'}, 'walls')
                        walls.append(Wall(str(wall['side']), float(wall['reflectivity'])))
                    values[key] = tuple(walls)
                elif key == 'intrinsics':
                    values[key] = _parse_intrinsics(raw)
                elif key == 'seed':
                    values[key] = int(raw)
                else:
                    values[key] = float(raw)
        except (TypeError, ValueError) as e:
            raise ConfigurationError('malformed scene value (%s)' % e, key=key)
        return cls(**values)

    @classmethod
    def loads(cls, text):
        try:
            data = json.loads(text)
        except ValueError as e:
            raise ConfigurationError('scene config is not valid JSON (%s)' % e, key='scene')
        return cls.from_dict(data)

    def with_seed(self, seed):
        return replace(self, seed=int(seed))


def _check_keys(raw, expected, key):
    if not isinstance(raw, dict):
        raise ConfigurationError('expected an object', key=key)
    for k in raw:
        if k not in expected:
            raise ConfigurationError('unknown key', key='%s.%s' % (key, k))
    for k in expected:
        if k not in raw:
            raise ConfigurationError('missing key', key='%s.%s' % (key, k))


def _parse_intrinsics(raw):
    if not isinstance(raw, dict):
        raise ConfigurationError('expected an object', key='intrinsics')
    if 'hfov' in raw or 'vfov' in raw:
        _check_keys(raw, {'width', 'height', 'hfov', 'vfov'}, 'intrinsics')
        return Intrinsics.from_fov(int(raw['width']), int(raw['height']),
                                   float(raw['hfov']), float(raw['vfov']))
    _check_keys(raw, {'fx', 'fy', 'cx', 'cy', 'width', 'height'}, 'intrinsics')
    return Intrinsics(fx=float(raw['fx']), fy=float(raw['fy']), cx=float(raw['cx']),
                      cy=float(raw['cy']), width=int(raw['width']), height=int(raw['height']))


import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.special import comb

from pathfinder.errors import ConfigurationError, DataError, DimensionError

CONTROL_POINTS = 10
CSV_HEADER = ['t', 'x', 'y', 'vx', 'vy']


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Timestamped positions and velocities, one row per sample."""

    timestamps: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.timestamps, dtype=np.float64).reshape(-1)
        x = np.asarray(self.positions, dtype=np.float64)
        v = np.asarray(self.velocities, dtype=np.float64)
        if x.ndim != 2 or x.shape != v.shape or x.shape[0] != t.size:
            raise DimensionError('trajectory arrays disagree: t %s, x %s, v %s' % (t.shape, x.shape, v.shape))
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise DataError('trajectory timestamps must be strictly increasing')
        object.__setattr__(self, 'timestamps', t)
        object.__setattr__(self, 'positions', x)
        object.__setattr__(self, 'velocities', v)

    def __len__(self):
        return self.timestamps.size

    @property
    def dims(self):
        return self.positions.shape[1]

    def planar(self):
        return Trajectory(self.timestamps, self.positions[:, :2], self.velocities[:, :2])

    def to_csv(self):
        if self.dims != 2:
            raise DimensionError('trajectory CSV holds planar tracks, got %d-D' % self.dims)
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(CSV_HEADER)
        for t, (x, y), (vx, vy) in zip(self.timestamps, self.positions, self.velocities):
            writer.writerow([repr(float(v)) for v in (t, x, y, vx, vy)])
        return buffer.getvalue()

    @classmethod
    def from_csv(cls, text, source='<trajectory>'):
        reader = csv.reader(io.StringIO(text))
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError('empty trajectory file', source)
        if header[:5] != CSV_HEADER:
            raise DataError('trajectory header must start with t,x,y,vx,vy', source)
        rows = []
        for line_num, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append([float(v) for v in row[:5]])
            except ValueError:
                raise DataError('non-numeric value on line %d' % line_num, source)
            if len(rows[-1]) != 5:
                raise DataError('expected 5 columns on line %d' % line_num, source)
        data = np.asarray(rows, dtype=np.float64).reshape(-1, 5)
        return cls(timestamps=data[:, 0], positions=data[:, 1:3], velocities=data[:, 3:5])


def _bernstein(degree, s):
    s = np.asarray(s, dtype=np.float64).reshape(-1, 1)
    i = np.arange(degree + 1)
    return comb(degree, i) * s ** i * (1.0 - s) ** (degree - i)


def bezier_sample(control, s):
    """Point ``B(s)`` and parameter derivative ``B'(s)`` of the curve."""
    control = np.asarray(control, dtype=np.float64)
    degree = control.shape[0] - 1
    points = _bernstein(degree, s) @ control
    if degree == 0:
        return points, np.zeros_like(points)
    derivative = degree * (_bernstein(degree - 1, s) @ np.diff(control, axis=0))
    return points, derivative


def frame_times(duration, fps):
    count = fps * duration
    if abs(count - round(count)) > 1e-9 or round(count) < 2:
        raise ConfigurationError('fps * duration must be an integer count of at least 2', key='fps')
    n = int(round(count))
    return np.arange(n) * (duration / (n - 1)), np.arange(n) / (n - 1)


def bezier_path(control, duration, fps):
    """Sample the degree-9 curve through ``control`` uniformly in its parameter.

    Sample ``k`` of ``n = fps * duration`` sits at ``t_k = k * T / (n - 1)``,
    parameter ``s_k = t_k / T``; velocities are ``B'(s) / T``.
    """
    control = np.asarray(control, dtype=np.float64)
    if control.ndim != 2 or control.shape[0] != CONTROL_POINTS:
        raise ConfigurationError('a path needs exactly %d control points, got shape %s'
                                 % (CONTROL_POINTS, control.shape), key='control')
    if duration <= 0 or fps <= 0:
        raise ConfigurationError('duration and fps must be positive', key='duration')
    t, s = frame_times(duration, fps)
    points, derivative = bezier_sample(control, s)
    return Trajectory(timestamps=t, positions=points, velocities=derivative / duration)

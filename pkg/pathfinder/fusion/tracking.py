import csv
import io
import logging
from dataclasses import dataclass

import numpy as np

from pathfinder.config import PathfinderConfig
from pathfinder.errors import DataError, DimensionError
from pathfinder.fusion.solver import fuse
from pathfinder.simulator.trajectory import Trajectory

Logger = logging.getLogger('pathfinder.fusion.tracking')

FLAG_FUSED = 0
FLAG_CARRIED = 1
CSV_HEADER = ['t', 'x', 'y', 'vx', 'vy', 'planes_used', 'flag']


@dataclass(frozen=True, eq=False)
class EstimatedTrack:
    """Fused trajectory with per-sample plane counts and gap flags."""

    timestamps: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    planes_used: np.ndarray
    flags: np.ndarray

    def __post_init__(self):
        n = np.asarray(self.timestamps).size
        for name in ('planes_used', 'flags'):
            values = np.asarray(getattr(self, name), dtype=np.int64).reshape(-1)
            if values.size != n:
                raise DimensionError('%s has %d entries for %d samples' % (name, values.size, n))
            object.__setattr__(self, name, values)
        for name in ('timestamps', 'positions', 'velocities'):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        if n == 0:
            object.__setattr__(self, 'positions', np.zeros((0, 2)))
            object.__setattr__(self, 'velocities', np.zeros((0, 2)))

    def __len__(self):
        return self.timestamps.size

    @property
    def trajectory(self):
        return Trajectory(self.timestamps, self.positions, self.velocities)

    def to_csv(self):
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(CSV_HEADER)
        for t, (x, y), (vx, vy), used, flag in zip(self.timestamps, self.positions, self.velocities,
                                                    self.planes_used, self.flags):
            writer.writerow([repr(float(v)) for v in (t, x, y, vx, vy)] + [int(used), int(flag)])
        return buffer.getvalue()

    @classmethod
    def from_csv(cls, text, source='<track>'):
        reader = csv.reader(io.StringIO(text))
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError('empty trajectory file', source)
        if header != CSV_HEADER:
            raise DataError('estimated trajectory header must be %s' % ','.join(CSV_HEADER), source)
        rows = []
        for line_num, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise DataError('expected %d columns on line %d' % (len(CSV_HEADER), line_num), source)
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise DataError('non-numeric value on line %d' % line_num, source)
        data = np.asarray(rows, dtype=np.float64).reshape(-1, len(CSV_HEADER))
        return cls(data[:, 0], data[:, 1:3], data[:, 3:5], data[:, 5].astype(np.int64), data[:, 6].astype(np.int64))


def track(frames, dt, lam=None, objective=None, fuse_dt=0.0):
    """Fuse each ``(time, estimates)`` frame in order.

    Frames without estimates carry the previous state forward by ``dt`` and
    are flagged; frames before the first fused state are skipped.
    ``fuse_dt`` is the propagation step used inside the solver, 0 when the
    estimates already refer to the frame time. The objective defaults to
    PATHFINDER_FUSION_OBJECTIVE ('consensus' unless configured), while
    :func:`fuse` alone defaults to 'reflection': every fused sample equals
    ``fuse(estimates, fuse_dt, lam, objective)`` only with the same objective
    and step passed to both.
    """
    objective = objective or PathfinderConfig().PATHFINDER_FUSION_OBJECTIVE
    times, positions, velocities, used, flags = [], [], [], [], []
    state = None
    for time, estimates in frames:
        if estimates:
            fused = fuse(list(estimates), fuse_dt, lam=lam, objective=objective)
            state = (fused.position, fused.velocity)
            count, flag = fused.planes_used, FLAG_FUSED
        elif state is None:
            Logger.debug('No state yet at t=%.3f; skipped' % time)
            continue
        else:
            state = (state[0] + state[1] * dt, state[1])
            count, flag = 0, FLAG_CARRIED
            Logger.info('Gap at t=%.3f filled by propagation' % time)
        times.append(time)
        positions.append(state[0])
        velocities.append(state[1])
        used.append(count)
        flags.append(flag)
    return EstimatedTrack(
        timestamps=np.asarray(times, dtype=np.float64),
        positions=np.asarray(positions, dtype=np.float64).reshape(-1, 2),
        velocities=np.asarray(velocities, dtype=np.float64).reshape(-1, 2),
        planes_used=used,
        flags=flags,
    )

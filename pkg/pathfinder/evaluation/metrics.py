import logging
from dataclasses import dataclass

import numpy as np

from pathfinder.errors import DataError

Logger = logging.getLogger('pathfinder.evaluation.metrics')

MM = 1000.0


@dataclass(frozen=True, eq=False)
class Association:
    gt_index: np.ndarray
    est_index: np.ndarray
    unmatched: int

    def __len__(self):
        return self.gt_index.size


@dataclass(frozen=True)
class AteSummary:
    min: float
    q1: float
    median: float
    q3: float
    max: float

    def to_dict(self):
        return {'min': self.min, 'q1': self.q1, 'median': self.median, 'q3': self.q3, 'max': self.max}


def associate(gt, est, tolerance=None):
    """Pair every estimate with the nearest ground-truth sample within ``tolerance``.

    The default tolerance is half the median ground-truth sample spacing.
    """
    gt_t = gt.timestamps
    est_t = est.timestamps
    if gt_t.size == 0 or est_t.size == 0:
        return Association(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), int(est_t.size))
    if tolerance is None:
        tolerance = 0.5 * float(np.median(np.diff(gt_t))) if gt_t.size > 1 else np.inf
    right = np.clip(np.searchsorted(gt_t, est_t), 0, gt_t.size - 1)
    left = np.clip(right - 1, 0, gt_t.size - 1)
    nearest = np.where(np.abs(gt_t[left] - est_t) <= np.abs(gt_t[right] - est_t), left, right)
    ok = np.abs(gt_t[nearest] - est_t) <= tolerance + 1e-9
    return Association(nearest[ok], np.flatnonzero(ok), int(np.count_nonzero(~ok)))


def _matched(gt, est, channel):
    pairs = associate(gt, est)
    if len(pairs) == 0:
        raise DataError('ground truth and estimate share no timestamps')
    return getattr(gt, channel)[pairs.gt_index, :2], getattr(est, channel)[pairs.est_index, :2]


def rmse_x(gt, est):
    """Position RMSE in millimetres."""
    a, b = _matched(gt, est, 'positions')
    return float(np.sqrt(np.mean(np.sum((a - b) ** 2, axis=1)))) * MM


def rmse_v(gt, est):
    """Velocity RMSE in millimetres per second."""
    a, b = _matched(gt, est, 'velocities')
    return float(np.sqrt(np.mean(np.sum((a - b) ** 2, axis=1)))) * MM


def ate_series(gt, est):
    """``(timestamps, errors_mm)`` over the associated samples."""
    pairs = associate(gt, est)
    if len(pairs) == 0:
        raise DataError('ground truth and estimate share no timestamps')
    delta = gt.positions[pairs.gt_index, :2] - est.positions[pairs.est_index, :2]
    return est.timestamps[pairs.est_index], np.linalg.norm(delta, axis=1) * MM


def ate_summary(errors):
    errors = np.asarray(errors, dtype=np.float64)
    if errors.size == 0:
        raise DataError('empty ATE series')
    q = np.percentile(errors, [0, 25, 50, 75, 100])
    return AteSummary(*(float(v) for v in q))

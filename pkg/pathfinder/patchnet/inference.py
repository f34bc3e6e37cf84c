import logging
from dataclasses import dataclass

import numpy as np

from pathfinder.patchnet.pairs import frame_pairs
from pathfinder.patchnet.training import pack_buckets, predict
from pathfinder.planes.pipeline import PlanesIndex
from pathfinder.simulator.dataset import Dataset

Logger = logging.getLogger('pathfinder.patchnet.inference')


@dataclass(frozen=True)
class PlaneEstimate:
    """Network output for one example plane, in normalised heading-frame units.

    ``position`` is already propagated to the later frame of the pair;
    ``velocity`` is displacement per frame interval.
    """

    example: int
    plane_id: int
    position: tuple
    velocity: tuple
    normal: tuple
    offset: float
    transform: tuple
    area: int


@dataclass(frozen=True)
class FrameEstimates:
    frame: int
    time: float
    estimates: tuple


def estimate_pair(pair, params, hyper, buckets=None):
    positions, velocities = predict(pair, params, hyper, buckets)
    x = positions.numpy().astype(np.float64)
    v = velocities.numpy().astype(np.float64) if velocities is not None else np.zeros_like(x)
    x = x + v
    estimates = []
    for m, entry in enumerate(pair.entries):
        estimates.append(PlaneEstimate(
            example=m,
            plane_id=entry.plane_id,
            position=(float(x[m, 0]), float(x[m, 1])),
            velocity=(float(v[m, 0]), float(v[m, 1])),
            normal=entry.normal,
            offset=entry.offset,
            transform=entry.transform,
            area=entry.area,
        ))
    return tuple(estimates)


def infer_index(index, manifest, params, hyper):
    """Estimates for every later frame ``1 .. n-1``; frames without planes get none."""
    buckets = pack_buckets()
    pairs = {pair.frame: pair for pair in frame_pairs(index, manifest, hyper, frames=range(1, len(index)))}
    results = []
    for frame in range(1, len(index)):
        pair = pairs.get(frame)
        estimates = estimate_pair(pair, params, hyper, buckets) if pair is not None else ()
        results.append(FrameEstimates(frame=frame, time=index.time(frame), estimates=estimates))
    Logger.info('Inferred %d frames, %d without planes'
                % (len(results), sum(1 for r in results if not r.estimates)))
    return results


def infer(dataset_dir, planes_dir, params, hyper):
    return infer_index(PlanesIndex(planes_dir), Dataset(dataset_dir).manifest, params, hyper)

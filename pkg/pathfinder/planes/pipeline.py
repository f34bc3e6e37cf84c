"""Plane extraction over a whole dataset.

For every frame the wall masks are applied to the image, each live track is
carried forward by a RANSAC homography fitted to its wall's correspondences,
IDs are assigned by warped-mask overlap, and difference images are formed
for every plane that kept its ID. Everything lands in ``planes.json`` plus
per-plane rasters.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from pathfinder.config import PathfinderConfig
from pathfinder.errors import DataError, EstimationError, TrackingLoss
from pathfinder.geometry.homography import ransac_homography
from pathfinder.geometry.plane import PlaneTransform, heading_transform
from pathfinder.imageio import decode_pfm, decode_pgm, encode_pfm, encode_pgm
from pathfinder.numerics.rng import Rng, derive_stream
from pathfinder.planes.diff import DiffImage, diff_image
from pathfinder.planes.masked import MaskedPlane, mask_apply, mask_bbox
from pathfinder.planes.matching import FileMatches, SimulatorMatches, plane_matches
from pathfinder.planes.tracking import PlaneTrack, assign_ids, select_top_m
from pathfinder.simulator.dataset import Dataset
from pathfinder.storage import ArtifactStorage

Logger = logging.getLogger('pathfinder.planes.pipeline')

FORMAT_VERSION = 1
INDEX_NAME = 'planes.json'
RANSAC_STREAM = 0x72616e736163


def raster_name(frame, plane_id, kind):
    ext = 'pgm' if kind in ('mask', 'valid') else 'pfm'
    return 'planes/frame_%05d_id_%03d_%s.%s' % (frame, plane_id, kind, ext)


@dataclass(frozen=True)
class PlaneEntry:
    """One plane visible at one frame, as recorded in ``planes.json``."""

    frame: int
    plane_id: int
    label: int
    area: int
    bbox: tuple
    rank: int
    masked: str
    mask: str
    diff: str
    valid: str
    transform: tuple
    normal: tuple
    offset: float

    @property
    def plane_transform(self):
        return PlaneTransform.from_list(self.transform)

    def to_dict(self):
        return {
            'id': self.plane_id,
            'label': self.label,
            'area': self.area,
            'bbox': list(self.bbox) if self.bbox is not None else None,
            'rank': self.rank,
            'masked': self.masked,
            'mask': self.mask,
            'diff': self.diff,
            'valid': self.valid,
            'transform': list(self.transform),
            'normal': list(self.normal),
            'offset': self.offset,
        }

    @classmethod
    def from_dict(cls, frame, data):
        return cls(
            frame=frame,
            plane_id=int(data['id']),
            label=int(data['label']),
            area=int(data['area']),
            bbox=tuple(data['bbox']) if data['bbox'] is not None else None,
            rank=int(data['rank']),
            masked=data['masked'],
            mask=data['mask'],
            diff=data['diff'],
            valid=data['valid'],
            transform=tuple(float(v) for v in data['transform']),
            normal=tuple(float(v) for v in data['normal']),
            offset=float(data['offset']),
        )


class PlanesIndex(object):
    """Reader for a plane-pipeline output directory."""

    def __init__(self, root):
        self.root = root
        self.storage = ArtifactStorage(root)
        if not self.storage.exists(INDEX_NAME):
            raise DataError('no plane index', self.storage.path(INDEX_NAME))
        data = self.storage.read_json(INDEX_NAME)
        try:
            if int(data['format_version']) != FORMAT_VERSION:
                raise DataError('unsupported plane index version %s' % data['format_version'],
                                self.storage.path(INDEX_NAME))
            self.iou_threshold = float(data['iou'])
            self.room_scale = float(data['room_scale'])
            self.frame_interval = float(data['frame_interval'])
            self.image_size = tuple(data['image_size'])
            self.tracks = data['tracks']
            self.frames = [
                (int(f['frame']), float(f['time']), [PlaneEntry.from_dict(int(f['frame']), p) for p in f['planes']])
                for f in data['frames']
            ]
        except (KeyError, TypeError, ValueError) as e:
            raise DataError('malformed plane index (%s)' % e, self.storage.path(INDEX_NAME))

    def __len__(self):
        return len(self.frames)

    def entries(self, frame):
        return self.frames[frame][2]

    def time(self, frame):
        return self.frames[frame][1]

    def entry(self, frame, plane_id):
        for entry in self.entries(frame):
            if entry.plane_id == plane_id:
                return entry
        return None

    def paired(self, frame):
        """Entries at ``frame`` that kept their ID from ``frame - 1``."""
        return [e for e in self.entries(frame) if e.diff is not None]

    def masked_plane(self, entry):
        raster = decode_pfm(self.storage.read_bytes(entry.masked), source=self.storage.path(entry.masked))
        mask = decode_pgm(self.storage.read_bytes(entry.mask), source=self.storage.path(entry.mask))
        return MaskedPlane(plane_id=entry.plane_id, frame=entry.frame, raster=raster.astype(np.float64),
                           mask=mask, bbox=mask_bbox(mask), area=int(np.count_nonzero(mask)))

    def diff_image(self, entry):
        raster = decode_pfm(self.storage.read_bytes(entry.diff), source=self.storage.path(entry.diff))
        valid = decode_pgm(self.storage.read_bytes(entry.valid), source=self.storage.path(entry.valid))
        return DiffImage(plane_id=entry.plane_id, frame=entry.frame, raster=raster.astype(np.float64), valid=valid)

    def diff_plane(self, entry):
        """Difference raster wrapped as a masked plane over its validity mask."""
        diff = self.diff_image(entry)
        return MaskedPlane(plane_id=entry.plane_id, frame=entry.frame, raster=diff.raster, mask=diff.valid,
                           bbox=mask_bbox(diff.valid), area=int(np.count_nonzero(diff.valid)))


def match_source(dataset, matches=None):
    config = PathfinderConfig()
    simulator = SimulatorMatches(
        dataset,
        grid=int(config.PATHFINDER_MATCH_GRID),
        noise_px=float(config.PATHFINDER_MATCH_NOISE),
        outlier_fraction=float(config.PATHFINDER_MATCH_OUTLIERS),
    )
    if matches is None:
        return simulator
    return FileMatches(matches, fallback=simulator)


def _track_homography(source, seed, frame, track):
    """RANSAC homography carrying ``track`` into ``frame``, or ``None`` on tracking loss."""
    config = PathfinderConfig()
    try:
        matches = plane_matches(frame - 1, frame, track.label, source)
        H, flags = ransac_homography(
            matches.src, matches.dst,
            inlier_threshold_px=float(config.PATHFINDER_RANSAC_THRESHOLD),
            iterations=int(config.PATHFINDER_RANSAC_ITERATIONS),
            rng=Rng(seed, derive_stream(RANSAC_STREAM, frame, track.id)),
        )
    except (TrackingLoss, EstimationError) as e:
        Logger.info('Plane %d lost at frame %d: %s' % (track.id, frame, e))
        return None
    Logger.debug('Plane %d frame %d: %d/%d inliers' % (track.id, frame, int(flags.sum()), len(flags)))
    return H


def run_planes(dataset_dir, out_dir, iou_threshold=None, matches=None):
    """Run plane extraction over ``dataset_dir`` and write the index to ``out_dir``."""
    config = PathfinderConfig()
    if iou_threshold is None:
        iou_threshold = float(config.PATHFINDER_IOU_THRESHOLD)
    dataset = Dataset(dataset_dir)
    manifest = dataset.manifest
    scene = manifest.scene
    storage = ArtifactStorage(out_dir)
    source = match_source(dataset, matches)
    workers = max(1, int(config.PATHFINDER_WORKERS or 1))

    tracks = {}
    live = {}  # plane id -> MaskedPlane at the previous frame
    next_id = 0
    frames = []
    Logger.info('Extracting planes from %d frames (iou %.2f)' % (len(dataset), iou_threshold))
    for frame in manifest.frames:
        k = frame.index
        image = dataset.image(k)
        labels = list(frame.visible_planes)
        current = [mask_apply(image, dataset.mask(k, label), frame=k) for label in labels]

        homographies = {}
        if live:
            order = sorted(live)
            with ThreadPoolExecutor(max_workers=workers) as executor:
                found = list(executor.map(lambda pid: _track_homography(source, scene.seed, k, tracks[pid]), order))
            homographies = {pid: H for pid, H in zip(order, found) if H is not None}

        assignment = assign_ids({pid: plane.mask for pid, plane in live.items()}, homographies,
                                [plane.mask for plane in current], iou_threshold, next_id)
        next_id = assignment.next_id
        transform = heading_transform(frame.estimated_pose)

        planes = []
        new_live = {}
        for plane, label, pid in zip(current, labels, assignment.ids):
            plane = MaskedPlane(plane_id=pid, frame=k, raster=plane.raster, mask=plane.mask,
                                bbox=plane.bbox, area=plane.area)
            wall = scene.wall_plane(label)
            diff_ref = valid_ref = None
            if pid in tracks:
                H = homographies[pid]
                tracks[pid].extend(k, H)
                diff = diff_image(live[pid], plane, H)
                diff_ref = storage.save_bytes(raster_name(k, pid, 'diff'), encode_pfm(diff.raster))
                valid_ref = storage.save_bytes(raster_name(k, pid, 'valid'), encode_pgm(diff.valid))
            else:
                tracks[pid] = PlaneTrack(id=pid, label=label, first=k, last=k,
                                         normal=tuple(float(v) for v in wall.normal), offset=wall.offset)
            new_live[pid] = plane
            planes.append(PlaneEntry(
                frame=k,
                plane_id=pid,
                label=label,
                area=plane.area,
                bbox=plane.bbox,
                rank=0,
                masked=storage.save_bytes(raster_name(k, pid, 'masked'), encode_pfm(plane.raster)),
                mask=storage.save_bytes(raster_name(k, pid, 'mask'), encode_pgm(plane.mask)),
                diff=diff_ref,
                valid=valid_ref,
                transform=tuple(transform.to_list()),
                normal=tuple(float(v) for v in wall.normal),
                offset=wall.offset,
            ))
        if planes:
            ranked, _ = select_top_m(planes, len(planes))
            rank = {p.plane_id: r for r, p in enumerate(ranked)}
            planes = sorted((replace(p, rank=rank[p.plane_id]) for p in planes), key=lambda p: p.rank)
        else:
            Logger.warning('Frame %d has no visible planes' % k)
        frames.append({'frame': k, 'time': frame.time, 'planes': [p.to_dict() for p in planes]})
        live = new_live

    index = {
        'format_version': FORMAT_VERSION,
        'iou': iou_threshold,
        'image_size': [scene.intrinsics.width, scene.intrinsics.height],
        'room_scale': scene.room_scale,
        'frame_interval': scene.frame_interval,
        'tracks': [tracks[pid].to_dict() for pid in sorted(tracks)],
        'frames': frames,
    }
    storage.save_json(INDEX_NAME, index)
    Logger.info('Tracked %d plane IDs; index at %s' % (len(tracks), storage.path(INDEX_NAME)))
    return PlanesIndex(out_dir)

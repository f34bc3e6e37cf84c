import json
import os
import tempfile

import numpy as np
from django.test import SimpleTestCase

from pathfinder.errors import ContractError, DimensionError, NumericalDegeneracy, PipelineStall, TrackingLoss
from pathfinder.geometry import Homography, homography_dlt, look_at
from pathfinder.geometry.correspondences import Correspondences, format_matches
from pathfinder.planes import (FileMatches, PlanesIndex, assign_ids, diff_image, iou, mask_apply, plane_matches,
                               select_top_m)
from pathfinder.planes.matching import project_wall_matches
from pathfinder.planes.pipeline import run_planes
from pathfinder.simulator import Dataset, render_frame
from pathfinder.simulator.dataset import scene_paths
from pathfinder.geometry.poses import Pose, Intrinsics

from .factories import SceneConfigFactory
from .test_lib.mock_scene import MockScene

NORTH = 1


class Area(object):
    def __init__(self, plane_id, area):
        self.plane_id = plane_id
        self.area = area


def square_mask(shape, r0, c0, size):
    mask = np.zeros(shape, dtype=bool)
    mask[r0:r0 + size, c0:c0 + size] = True
    return mask


class TestMaskApply(SimpleTestCase):
    def setUp(self):
        self.image = np.random.default_rng(1).uniform(size=(6, 8))

    def test_full_mask(self):
        plane = mask_apply(self.image, np.ones((6, 8)))
        np.testing.assert_array_equal(plane.raster, self.image)
        self.assertEqual(plane.bbox, (0, 0, 6, 8))

    def test_empty_mask(self):
        plane = mask_apply(self.image, np.zeros((6, 8)))
        self.assertFalse(plane.raster.any())
        self.assertEqual(plane.area, 0)
        self.assertIsNone(plane.bbox)
        raster, mask = plane.crop()
        self.assertEqual((raster.shape, mask.shape), ((0, 0), (0, 0)))

    def test_area_counts_pixels(self):
        mask = np.random.default_rng(2).uniform(size=(6, 8)) > 0.6
        count = 0
        for row in mask:
            for value in row:
                count += int(value)
        plane = mask_apply(self.image, mask)
        self.assertEqual(plane.area, count)
        self.assertFalse(plane.raster[~mask].any())

    def test_bbox_crop(self):
        plane = mask_apply(self.image, square_mask((6, 8), 1, 2, 3))
        self.assertEqual(plane.bbox, (1, 2, 4, 5))
        raster, mask = plane.crop()
        np.testing.assert_array_equal(raster, self.image[1:4, 2:5])
        self.assertTrue(mask.all())

    def test_shape_mismatch(self):
        with self.assertRaises(DimensionError):
            mask_apply(self.image, np.ones((6, 7)))


class TestPlaneMatches(SimpleTestCase):
    def setUp(self):
        self.scene = SceneConfigFactory(intrinsics=Intrinsics.from_fov(48, 36))
        self.K = self.scene.intrinsics
        self.wall = self.scene.wall_plane(NORTH)

    def masks(self, pose):
        return render_frame(self.scene, pose, (2.0, 2.0))[1][NORTH]

    def test_identical_poses(self):
        pose = look_at([2.0, 1.0, 1.2], [2.0, 4.0, 1.2])
        mask = self.masks(pose)
        matches = project_wall_matches(self.wall, pose, pose, self.K, mask, mask, grid=8)
        np.testing.assert_array_equal(matches.src, matches.dst)
        self.assertGreaterEqual(len(matches), 4)

    def test_translation_parallel_to_wall(self):
        a = look_at([2.0, 1.0, 1.2], [2.0, 4.0, 1.2])
        b = Pose(p=a.p + [0.1, 0.0, 0.0], R=a.R)
        matches = project_wall_matches(self.wall, a, b, self.K, self.masks(a), self.masks(b), grid=8)
        shift = matches.dst - matches.src
        np.testing.assert_allclose(shift, np.tile(shift[0], (len(matches), 1)), atol=1e-9)

    def test_noiseless_matches_fit_homography(self):
        mock = MockScene(seed=5, intrinsics=Intrinsics.from_fov(48, 36))
        a, b = mock.random_pose(), mock.random_pose()
        matches = project_wall_matches(self.wall, a, b, self.K, self.masks(a), self.masks(b), grid=8)
        H = homography_dlt(matches.src, matches.dst)
        self.assertLess(np.abs(H.apply(matches.src) - matches.dst).max(), 1e-6)

    def test_not_visible(self):
        pose = look_at([2.0, 1.0, 1.2], [2.0, 4.0, 1.2])
        empty = np.zeros((self.K.height, self.K.width), dtype=bool)
        with self.assertRaises(TrackingLoss):
            project_wall_matches(self.wall, pose, pose, self.K, self.masks(pose), empty, grid=8)


class TestFileMatches(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.matches = Correspondences(src=np.arange(10.0).reshape(5, 2), dst=np.arange(10.0).reshape(5, 2) + 1)
        with open(os.path.join(self.tmp.name, 'matches_00003_001.csv'), 'w') as f:
            f.write(format_matches(self.matches))

    def tearDown(self):
        self.tmp.cleanup()

    def test_directory_lookup(self):
        source = FileMatches(self.tmp.name)
        np.testing.assert_array_equal(plane_matches(2, 3, 1, source).dst, self.matches.dst)

    def test_fallback(self):
        calls = []
        source = FileMatches(self.tmp.name, fallback=lambda a, b, label: calls.append((a, b, label)) or self.matches)
        plane_matches(3, 4, 1, source)
        self.assertEqual(calls, [(3, 4, 1)])

    def test_missing_without_fallback(self):
        with self.assertRaises(TrackingLoss):
            plane_matches(3, 4, 1, FileMatches(self.tmp.name))

    def test_single_file(self):
        source = FileMatches(os.path.join(self.tmp.name, 'matches_00003_001.csv'))
        self.assertEqual(len(plane_matches(7, 8, 0, source)), 5)

    def test_too_few(self):
        path = os.path.join(self.tmp.name, 'few.csv')
        with open(path, 'w') as f:
            f.write('u1,v1,u2,v2\n1,2,3,4\n')
        with self.assertRaises(TrackingLoss):
            plane_matches(0, 1, 0, FileMatches(path))


class TestAssignIds(SimpleTestCase):
    shape = (12, 16)

    def test_static_camera_keeps_ids(self):
        prev = {0: square_mask(self.shape, 0, 0, 4), 1: square_mask(self.shape, 6, 8, 5)}
        identity = {0: Homography.identity(), 1: Homography.identity()}
        result = assign_ids(prev, identity, [prev[1], prev[0]], next_id=2)
        self.assertEqual(result.ids, (1, 0))
        self.assertEqual(result.retired, ())
        self.assertEqual(result.next_id, 2)

    def test_new_disjoint_mask(self):
        prev = {3: square_mask(self.shape, 0, 0, 4)}
        new = [prev[3], square_mask(self.shape, 7, 10, 3)]
        result = assign_ids(prev, {3: Homography.identity()}, new, next_id=4)
        self.assertEqual(result.ids, (3, 4))
        self.assertEqual(result.next_id, 5)

    def test_translated_mask_follows_homography(self):
        prev = {0: square_mask(self.shape, 2, 2, 4)}
        moved = square_mask(self.shape, 3, 5, 4)
        result = assign_ids(prev, {0: Homography.translation(3.0, 1.0)}, [moved], next_id=1)
        self.assertEqual(result.ids, (0,))
        self.assertEqual(result.scores, ((0, 1.0),))

    def test_lost_track_retires(self):
        prev = {0: square_mask(self.shape, 0, 0, 4), 1: square_mask(self.shape, 6, 8, 5)}
        result = assign_ids(prev, {1: Homography.identity()}, [prev[0], prev[1]], next_id=2)
        self.assertEqual(result.ids, (2, 1))
        self.assertEqual(result.retired, (0,))

    def test_below_threshold_gets_fresh_id(self):
        prev = {0: square_mask(self.shape, 0, 0, 4)}
        shifted = square_mask(self.shape, 0, 2, 4)
        result = assign_ids(prev, {0: Homography.identity()}, [shifted], iou_threshold=0.5, next_id=1)
        self.assertEqual(result.ids, (1,))
        self.assertEqual(result.retired, (0,))

    def test_iou_matches_pixel_count(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            a = rng.uniform(size=self.shape) > 0.5
            b = rng.uniform(size=self.shape) > 0.4
            inter = sum(1 for x, y in zip(a.flat, b.flat) if x and y)
            union = sum(1 for x, y in zip(a.flat, b.flat) if x or y)
            self.assertAlmostEqual(iou(a, b), inter / union, delta=1e-12)

    def test_order_invariant(self):
        prev = {0: square_mask(self.shape, 0, 0, 4), 1: square_mask(self.shape, 6, 8, 5)}
        identity = {0: Homography.identity(), 1: Homography.identity()}
        fresh = square_mask(self.shape, 0, 12, 3)
        forward = assign_ids(prev, identity, [prev[0], fresh, prev[1]], next_id=2)
        backward = assign_ids(prev, identity, [prev[1], fresh, prev[0]], next_id=2)
        self.assertEqual(forward.ids, (0, 2, 1))
        self.assertEqual(backward.ids, (1, 2, 0))


class TestDiffImage(SimpleTestCase):
    def setUp(self):
        rng = np.random.default_rng(8)
        self.image = rng.uniform(size=(10, 12))
        self.mask = square_mask((10, 12), 1, 1, 8)

    def test_identical_frames(self):
        plane = mask_apply(self.image, self.mask, plane_id=2, frame=0)
        diff = diff_image(plane, plane, Homography.identity())
        self.assertFalse(diff.raster.any())
        np.testing.assert_array_equal(diff.valid, self.mask)

    def test_static_camera_is_subtraction(self):
        later = self.image + np.random.default_rng(9).normal(scale=0.1, size=self.image.shape)
        a = mask_apply(self.image, self.mask, plane_id=2, frame=0)
        b = mask_apply(later, self.mask, plane_id=2, frame=1)
        diff = diff_image(a, b, np.eye(3))
        np.testing.assert_allclose(diff.raster[self.mask], (later - self.image)[self.mask], atol=1e-12)
        self.assertFalse(diff.raster[~self.mask].any())

    def test_swap_negates(self):
        H = Homography.translation(2.0, 1.0)
        a = mask_apply(self.image, self.mask, plane_id=0, frame=0)
        moved = np.roll(np.roll(self.image, 1, axis=0), 2, axis=1)
        b = mask_apply(moved + 0.05, square_mask((10, 12), 2, 3, 8), plane_id=0, frame=1)
        forward = diff_image(a, b, H)
        backward = diff_image(b, a, H.inverse())
        common_a = backward.valid
        common_b = forward.valid
        self.assertEqual(common_a.sum(), common_b.sum())
        np.testing.assert_allclose(forward.raster[common_b], -backward.raster[common_a], atol=1e-6)

    def test_plane_mismatch(self):
        a = mask_apply(self.image, self.mask, plane_id=0)
        b = mask_apply(self.image, self.mask, plane_id=1)
        with self.assertRaises(ContractError):
            diff_image(a, b, Homography.identity())

    def test_singular_homography(self):
        a = mask_apply(self.image, self.mask, plane_id=0)
        with self.assertRaises(NumericalDegeneracy):
            diff_image(a, a, np.zeros((3, 3)))

    def test_static_scene_moving_camera(self):
        scene = SceneConfigFactory(seed=3, fps=10.0, duration=3.0, intrinsics=Intrinsics.from_fov(64, 48))
        camera, target, _ = scene_paths(scene)
        person = (2.0, 2.4)
        poses = [look_at(p, t) for p, t in zip(camera.positions, target.positions)]
        rendered = [render_frame(scene, pose, person) for pose in poses]
        checked = 0
        for k in range(1, len(poses)):
            image_a, masks_a = rendered[k - 1]
            image_b, masks_b = rendered[k]
            spread = image_b.max() - image_b.min()
            for label in range(len(scene.walls)):
                try:
                    matches = project_wall_matches(scene.wall_plane(label), poses[k - 1], poses[k], scene.intrinsics,
                                                   masks_a[label], masks_b[label], grid=12)
                except TrackingLoss:
                    continue
                H = homography_dlt(matches.src, matches.dst)
                diff = diff_image(mask_apply(image_a, masks_a[label], label), mask_apply(image_b, masks_b[label], label),
                                  H)
                if diff.valid.any():
                    self.assertLess(np.abs(diff.raster[diff.valid]).mean(), 1e-3 * spread)
                    checked += 1
        self.assertGreaterEqual(checked, 29)


class TestSelectTopM(SimpleTestCase):
    def test_fewer_than_m(self):
        selected, short = select_top_m([Area(4, 10)], 3)
        self.assertEqual([p.plane_id for p in selected], [4])
        self.assertTrue(short)

    def test_largest_first(self):
        planes = [Area(0, 300), Area(1, 500), Area(2, 200), Area(3, 400)]
        selected, short = select_top_m(planes, 3)
        self.assertEqual([p.plane_id for p in selected], [1, 3, 0])
        self.assertFalse(short)

    def test_tie_lower_id(self):
        selected, _ = select_top_m([Area(7, 100), Area(2, 100)], 2)
        self.assertEqual([p.plane_id for p in selected], [2, 7])

    def test_no_planes(self):
        with self.assertRaises(PipelineStall):
            select_top_m([], 3)


class TestRunPlanes(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super(TestRunPlanes, cls).setUpClass()
        cls.mock = MockScene(seed=11, fps=5.0, duration=3.0)
        cls.dataset_dir, cls.planes_dir, cls.manifest, cls.index = cls.mock.planes()

    @classmethod
    def tearDownClass(cls):
        cls.mock.cleanup()
        super(TestRunPlanes, cls).tearDownClass()

    def test_areas_match_manifest_masks(self):
        dataset = Dataset(self.dataset_dir)
        for frame, _, entries in self.index.frames:
            for entry in entries:
                self.assertEqual(entry.area, int(dataset.mask(frame, entry.label).sum()))

    def test_wall_keeps_its_id(self):
        ids = set()
        for frame, _, entries in self.index.frames:
            labels = {e.label: e.plane_id for e in entries}
            self.assertIn(NORTH, labels)
            ids.add(labels[NORTH])
        self.assertEqual(len(ids), 1)

    def test_retired_ids_never_return(self):
        seen, retired = set(), set()
        previous = set()
        for _, _, entries in self.index.frames:
            current = {e.plane_id for e in entries}
            self.assertFalse(current & retired)
            retired |= previous - current
            seen |= current
            previous = current

    def test_ranks_by_area(self):
        for frame, _, entries in self.index.frames:
            self.assertEqual([e.rank for e in entries], list(range(len(entries))))
            areas = [e.area for e in entries]
            self.assertEqual(areas, sorted(areas, reverse=True))

    def test_diffs_for_carried_planes(self):
        self.assertTrue(all(e.diff is None for e in self.index.entries(0)))
        for frame in range(1, len(self.index)):
            for entry in self.index.paired(frame):
                diff = self.index.diff_image(entry)
                self.assertFalse(diff.raster[~diff.valid].any())

    def test_masked_plane_on_disk(self):
        entry = self.index.entries(2)[0]
        plane = self.index.masked_plane(entry)
        dataset = Dataset(self.dataset_dir)
        expected = np.where(dataset.mask(2, entry.label), dataset.image(2), 0.0)
        np.testing.assert_array_equal(plane.raster, expected)

    def test_index_metadata(self):
        scene = self.manifest.scene
        self.assertEqual(self.index.room_scale, scene.room_scale)
        self.assertEqual(self.index.frame_interval, scene.frame_interval)
        self.assertEqual(self.index.iou_threshold, 0.5)

    def test_empty_match_directory_falls_back(self):
        matches = os.path.join(self.mock.workdir(), 'no-matches')
        os.makedirs(matches, exist_ok=True)
        out = os.path.join(self.mock.workdir(), 'planes-fallback')
        run_planes(self.dataset_dir, out, matches=matches)
        with open(os.path.join(out, 'planes.json')) as a, open(os.path.join(self.planes_dir, 'planes.json')) as b:
            self.assertEqual(json.load(a), json.load(b))

    def test_reopen(self):
        reopened = PlanesIndex(self.planes_dir)
        self.assertEqual(len(reopened), len(self.manifest.frames))

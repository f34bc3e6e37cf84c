import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from pathfinder.errors import DataError
from pathfinder.evaluation import (Report, associate, ate_series, ate_summary, config_digest, evaluate,
                                   render_summary, rmse_v, rmse_x)
from pathfinder.simulator.trajectory import Trajectory


def circle(times, radius=1.0, center=(2.0, 2.0)):
    t = np.asarray(times, dtype=np.float64)
    x = np.stack([center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)], axis=1)
    v = np.stack([-radius * np.sin(t), radius * np.cos(t)], axis=1)
    return Trajectory(t, x, v)


def shifted(trajectory, dx=(0.0, 0.0), dv=(0.0, 0.0)):
    return Trajectory(trajectory.timestamps, trajectory.positions + dx, trajectory.velocities + dv)


class TestMetrics(SimpleTestCase):
    def setUp(self):
        self.gt = circle(np.arange(0.0, 5.0, 0.1))

    def test_identical(self):
        self.assertEqual(rmse_x(self.gt, self.gt), 0.0)
        self.assertEqual(rmse_v(self.gt, self.gt), 0.0)
        _, errors = ate_series(self.gt, self.gt)
        self.assertFalse(errors.any())

    def test_constant_offset(self):
        est = shifted(self.gt, dx=(0.01, 0.0), dv=(0.003, 0.004))
        self.assertAlmostEqual(rmse_x(self.gt, est), 10.0, places=9)
        self.assertAlmostEqual(rmse_v(self.gt, est), 5.0, places=9)
        _, errors = ate_series(self.gt, est)
        np.testing.assert_allclose(errors, 10.0, atol=1e-9)

    def test_rmse_by_hand(self):
        gt = Trajectory([0.0, 1.0], [[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]])
        est = Trajectory([0.0, 1.0], [[0.003, 0.004], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]])
        self.assertAlmostEqual(rmse_x(gt, est), np.sqrt(25.0 / 2.0), places=9)

    def test_ate_summary_quartiles(self):
        summary = ate_summary([5.0, 1.0, 4.0, 2.0, 3.0])
        self.assertEqual(summary.to_dict(), {'min': 1.0, 'q1': 2.0, 'median': 3.0, 'q3': 4.0, 'max': 5.0})

    def test_random_pairs_against_loops(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            n = int(rng.integers(2, 60))
            times = np.arange(n) * 0.1
            gt = Trajectory(times, rng.uniform(0, 4, size=(n, 2)), rng.normal(size=(n, 2)))
            est = Trajectory(times, rng.uniform(0, 4, size=(n, 2)), rng.normal(size=(n, 2)))
            sq_x = sq_v = 0.0
            errors = []
            for i in range(n):
                dx = gt.positions[i, :2] - est.positions[i, :2]
                dv = gt.velocities[i, :2] - est.velocities[i, :2]
                sq_x += dx[0] ** 2 + dx[1] ** 2
                sq_v += dv[0] ** 2 + dv[1] ** 2
                errors.append(np.hypot(dx[0], dx[1]) * 1000.0)
            self.assertAlmostEqual(rmse_x(gt, est), np.sqrt(sq_x / n) * 1000.0, delta=1e-12 * rmse_x(gt, est))
            self.assertAlmostEqual(rmse_v(gt, est), np.sqrt(sq_v / n) * 1000.0, delta=1e-12 * rmse_v(gt, est))
            ordered = sorted(errors)
            expected = []
            for p in (0.0, 0.25, 0.5, 0.75, 1.0):
                pos = p * (n - 1)
                lo = int(np.floor(pos))
                hi = min(lo + 1, n - 1)
                expected.append(ordered[lo] + (pos - lo) * (ordered[hi] - ordered[lo]))
            summary = ate_summary(ate_series(gt, est)[1])
            np.testing.assert_allclose([summary.min, summary.q1, summary.median, summary.q3, summary.max], expected,
                                       rtol=1e-12, atol=1e-12)

    def test_ate_summary_empty(self):
        with self.assertRaises(DataError):
            ate_summary([])


class TestMetricProperties(SimpleTestCase):
    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 30), st.integers(0, 2 ** 32 - 1), st.floats(-10.0, 10.0), st.floats(-10.0, 10.0))
    def test_common_translation_leaves_rmse(self, n, seed, tx, ty):
        rng = np.random.default_rng(seed)
        times = np.arange(n) * 0.1
        gt = Trajectory(times, rng.uniform(0, 4, size=(n, 2)), rng.normal(size=(n, 2)))
        est = Trajectory(times, rng.uniform(0, 4, size=(n, 2)), rng.normal(size=(n, 2)))
        before = rmse_x(gt, est)
        after = rmse_x(shifted(gt, dx=(tx, ty)), shifted(est, dx=(tx, ty)))
        self.assertAlmostEqual(after, before, delta=1e-9 * max(1.0, before))
        self.assertEqual(rmse_v(shifted(gt, dx=(tx, ty)), shifted(est, dx=(tx, ty))), rmse_v(gt, est))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(st.integers(-2000, 2000), st.integers(-2000, 2000)), min_size=1, max_size=20))
    def test_zero_only_when_coincident(self, offsets_mm):
        gt = circle(np.arange(len(offsets_mm)) * 0.1)
        delta = np.array(offsets_mm, dtype=np.float64) / 1000.0
        error = rmse_x(gt, Trajectory(gt.timestamps, gt.positions + delta, gt.velocities))
        if delta.any():
            self.assertGreater(error, 0.0)
        else:
            self.assertEqual(error, 0.0)


class TestAssociate(SimpleTestCase):
    def setUp(self):
        self.gt = circle(np.arange(0.0, 2.0, 0.1))

    def test_subset(self):
        est = circle(self.gt.timestamps[3:10])
        pairs = associate(self.gt, est)
        np.testing.assert_array_equal(pairs.gt_index, np.arange(3, 10))
        self.assertEqual(pairs.unmatched, 0)

    def test_jittered_times(self):
        est = circle(self.gt.timestamps + 0.02)
        pairs = associate(self.gt, est)
        np.testing.assert_array_equal(pairs.gt_index, np.arange(len(self.gt)))

    def test_outside_tolerance(self):
        est = circle([0.5, 5.0])
        pairs = associate(self.gt, est)
        self.assertEqual(len(pairs), 1)
        self.assertEqual(pairs.unmatched, 1)

    def test_no_overlap(self):
        with self.assertRaises(DataError):
            rmse_x(self.gt, circle([10.0, 11.0]))


class TestReport(SimpleTestCase):
    def setUp(self):
        self.gt = circle(np.arange(0.0, 3.0, 0.1))
        self.est = shifted(self.gt, dx=(0.0, 0.02))

    def test_evaluate(self):
        report = evaluate(self.gt, self.est, digest='abc')
        self.assertAlmostEqual(report.rmse_x_mm, 20.0, places=9)
        self.assertEqual(report.matched, len(self.gt))
        self.assertEqual(report.config_digest, 'abc')
        self.assertAlmostEqual(report.summary.median, 20.0, places=9)

    def test_deterministic_serialisation(self):
        a = evaluate(self.gt, self.est).dumps()
        b = evaluate(self.gt, self.est).dumps()
        self.assertEqual(a, b)
        self.assertNotIn('runtimes', a)

    def test_round_trip(self):
        report = evaluate(self.gt, self.est, runtimes={'train': 1.5})
        loaded = Report.loads(report.dumps())
        self.assertEqual(loaded, report)

    def test_bad_version(self):
        data = evaluate(self.gt, self.est).to_dict()
        data['format_version'] = 99
        with self.assertRaises(DataError):
            Report.from_dict(data)

    def test_malformed(self):
        with self.assertRaises(DataError):
            Report.loads('{"format_version": 1}')
        with self.assertRaises(DataError):
            Report.loads('not json')

    def test_ate_csv(self):
        lines = evaluate(self.gt, self.est).ate_csv().splitlines()
        self.assertEqual(lines[0], 't,ate_mm')
        self.assertEqual(len(lines), len(self.gt) + 1)


class TestConfigDigest(SimpleTestCase):
    def test_key_order_irrelevant(self):
        self.assertEqual(config_digest({'a': 1, 'b': [1, 2]}), config_digest({'b': [1, 2], 'a': 1}))

    def test_sensitive(self):
        self.assertNotEqual(config_digest({'seed': 1}), config_digest({'seed': 2}))
        self.assertEqual(len(config_digest({})), 64)


class TestSummary(SimpleTestCase):
    def test_render(self):
        gt = circle(np.arange(0.0, 1.0, 0.1))
        report = evaluate(gt, shifted(gt, dx=(0.01, 0.0)), digest='f00d', runtimes={'train': 2.0, 'infer': 0.25})
        text = render_summary(report)
        self.assertTrue(text.startswith('Trajectory evaluation'))
        self.assertIn('RMSE position     10.000 mm', text)
        self.assertIn('infer   0.25', text)
        self.assertIn('config f00d', text)

    def test_no_runtimes(self):
        gt = circle(np.arange(0.0, 1.0, 0.1))
        text = render_summary(evaluate(gt, gt))
        self.assertNotIn('Stage runtimes', text)
        self.assertNotIn('unmatched', text)

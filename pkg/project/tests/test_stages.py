import json
import os
import tempfile
from dataclasses import replace

import numpy as np
import pytest
from django.test import SimpleTestCase

from pathfinder import stages
from pathfinder.collector import StageCollector
from pathfinder.config import PathfinderConfig
from pathfinder.errors import ConfigurationError, DataError
from pathfinder.fusion.tracking import EstimatedTrack
from pathfinder.patchnet import Hyper, load_model
from pathfinder.patchnet.inference import infer_index
from pathfinder.simulator.scene import SceneConfig
from pathfinder.simulator.trajectory import Trajectory

from .factories import SceneConfigFactory
from .test_lib.mock_scene import MockScene
from .util import tiny_hyper


def write(path, text):
    with open(path, 'w') as f:
        f.write(text)
    return path


def read_json(path):
    with open(path) as f:
        return json.load(f)


def e2e_config(directory, **hyper):
    scene = SceneConfigFactory(fps=5.0, duration=2.0).to_dict()
    scene.pop('seed')
    return write(os.path.join(directory, 'e2e.json'),
                 json.dumps({'scene': scene, 'hyper': tiny_hyper(**hyper).to_dict()}))


class StageTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = self.tmp.name

    def tearDown(self):
        self.tmp.cleanup()
        StageCollector().clear()
        PathfinderConfig.reload()


class TestSimulateStage(StageTestCase):
    def test_stamp(self):
        config = write(os.path.join(self.dir, 'scene.json'), json.dumps({'fps': 5.0, 'duration': 1.0}))
        out = os.path.join(self.dir, 'data')
        manifest = stages.simulate(config, out, seed=17)
        stamp = read_json(os.path.join(out, 'stamp.json'))
        self.assertEqual(stamp['stage'], 'simulate')
        self.assertEqual(stamp['seed'], 17)
        self.assertEqual(set(stamp['format_versions']), {'manifest', 'planes', 'model', 'report'})
        self.assertEqual(len(stamp['config_digest']), 64)
        self.assertEqual(manifest.scene.seed, 17)

    def test_default_scene(self):
        scene = stages.load_scene(None, seed=3)
        self.assertEqual(scene.seed, 3)
        self.assertEqual(scene.fps, 10.0)

    def test_missing_config(self):
        with self.assertRaises(DataError):
            stages.load_scene(os.path.join(self.dir, 'absent.json'))

    def test_unknown_scene_key(self):
        config = write(os.path.join(self.dir, 'scene.json'), json.dumps({'frames_per_second': 5}))
        with self.assertRaises(ConfigurationError) as ctx:
            stages.load_scene(config)
        self.assertEqual(ctx.exception.key, 'frames_per_second')


class TestEvalStage(StageTestCase):
    def setUp(self):
        super(TestEvalStage, self).setUp()
        t = np.arange(0.0, 2.0, 0.1)
        truth = Trajectory(t, np.stack([t, 2 * t], axis=1), np.tile([1.0, 2.0], (t.size, 1)))
        self.gt = write(os.path.join(self.dir, 'trajectory.csv'), truth.to_csv())

    def test_identical_tracks(self):
        report_path = os.path.join(self.dir, 'report.json')
        report = stages.eval_stage(self.gt, self.gt, report_path)
        self.assertEqual(report.rmse_x_mm, 0.0)
        self.assertEqual(report.rmse_v_mm_s, 0.0)
        self.assertEqual(report.summary.max, 0.0)
        for name in ('report.json', 'report_ate.csv', 'report.txt', 'report.json.stamp.json'):
            self.assertTrue(os.path.exists(os.path.join(self.dir, name)), name)
        self.assertNotIn('runtimes', read_json(report_path))

    def test_report_bytes_stable(self):
        a = os.path.join(self.dir, 'a.json')
        b = os.path.join(self.dir, 'b.json')
        stages.eval_stage(self.gt, self.gt, a)
        stages.eval_stage(self.gt, self.gt, b)
        with open(a, 'rb') as fa, open(b, 'rb') as fb:
            self.assertEqual(fa.read(), fb.read())

    def test_runtimes_opt_in(self):
        PathfinderConfig().PATHFINDER_REPORT_RUNTIMES = True
        report_path = os.path.join(self.dir, 'report.json')
        stages.eval_stage(self.gt, self.gt, report_path)
        stages.eval_stage(self.gt, self.gt, report_path)
        self.assertIn('eval', read_json(report_path)['runtimes'])

    def test_missing_estimate(self):
        with self.assertRaises(DataError):
            stages.eval_stage(self.gt, os.path.join(self.dir, 'none.csv'), os.path.join(self.dir, 'r.json'))

    def test_run_writes_runtimes(self):
        report_path = os.path.join(self.dir, 'out', 'report.json')
        status = stages.run('eval', {'gt': self.gt, 'est': self.gt, 'report': report_path})
        self.assertEqual(status, 0)
        runtimes = read_json(os.path.join(self.dir, 'out', 'runtimes.json'))
        self.assertEqual(list(runtimes), ['eval'])
        self.assertEqual(StageCollector().stages, [])

    def test_run_unknown_command(self):
        with self.assertRaises(ConfigurationError) as ctx:
            stages.run('calibrate', {})
        self.assertEqual(ctx.exception.key, 'command')


class TestTrainInferStages(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super(TestTrainInferStages, cls).setUpClass()
        cls.mock = MockScene(seed=31, fps=5.0, duration=2.0)
        cls.dataset_dir, cls.planes_dir, cls.manifest, cls.index = cls.mock.planes()
        cls.dir = cls.mock.workdir()
        cls.hyper_path = write(os.path.join(cls.dir, 'hyper.json'), tiny_hyper().dumps())
        cls.model = os.path.join(cls.dir, 'model', 'model.pfnd')
        cls.result = stages.train_stage(cls.dataset_dir, cls.planes_dir, cls.model, 5, hyper_path=cls.hyper_path,
                                        validation=0.25)

    @classmethod
    def tearDownClass(cls):
        cls.mock.cleanup()
        StageCollector().clear()
        super(TestTrainInferStages, cls).tearDownClass()

    def test_train_outputs(self):
        for suffix in ('', '.hyper.json', '.loss.csv', '.validation.csv', '.stamp.json'):
            self.assertTrue(os.path.exists(self.model + suffix), suffix)
        stamp = read_json(self.model + '.stamp.json')
        self.assertEqual((stamp['stage'], stamp['seed']), ('train', 5))

    def test_infer_outputs(self):
        out = os.path.join(self.dir, 'estimate.csv')
        estimated = stages.infer_stage(self.dataset_dir, self.planes_dir, self.model, out)
        with open(out) as f:
            parsed = EstimatedTrack.from_csv(f.read())
        np.testing.assert_array_equal(parsed.timestamps, estimated.timestamps)
        frame_times = [self.index.time(k) for k in range(1, len(self.index))]
        self.assertTrue(set(parsed.timestamps) <= set(frame_times))
        with open(os.path.join(self.dir, 'estimate.planes.csv')) as f:
            self.assertEqual(f.readline().strip(), 't,frame,plane_id,rank,x,y,vx,vy')
        stamp = read_json(out + '.stamp.json')
        self.assertEqual(stamp['stage'], 'infer')

    def test_estimate_evaluates(self):
        out = os.path.join(self.dir, 'estimate-avg.csv')
        stages.infer_stage(self.dataset_dir, self.planes_dir, self.model, out, objective='average')
        report = stages.eval_stage(os.path.join(self.dataset_dir, 'trajectory.csv'), out,
                                   os.path.join(self.dir, 'report.json'))
        self.assertGreater(report.matched, 0)
        self.assertTrue(np.isfinite(report.rmse_x_mm))

    def test_frames_to_global(self):
        params, hyper = load_model(self.model)
        estimates = infer_index(self.index, self.manifest, params, hyper)
        frames = stages.estimate_frames(self.index, estimates)
        self.assertEqual(len(frames), len(estimates))
        for (time, globals_), fe in zip(frames, estimates):
            self.assertEqual(time, fe.time)
            self.assertEqual([g.rank for g in globals_], list(range(len(globals_))))


class TestE2EConfig(StageTestCase):
    def test_exact_keys(self):
        path = e2e_config(self.dir)
        scene, hyper, _ = stages.load_e2e(path)
        self.assertEqual(hyper, tiny_hyper())
        data = read_json(path)
        data['extra'] = 1
        write(path, json.dumps(data))
        with self.assertRaises(ConfigurationError) as ctx:
            stages.load_e2e(path)
        self.assertEqual(ctx.exception.key, 'extra')

    def test_missing_hyper(self):
        path = write(os.path.join(self.dir, 'e2e.json'), json.dumps({'scene': {}}))
        with self.assertRaises(ConfigurationError) as ctx:
            stages.load_e2e(path)
        self.assertEqual(ctx.exception.key, 'hyper')

    def test_not_json(self):
        path = write(os.path.join(self.dir, 'e2e.json'), '{scene')
        with self.assertRaises(ConfigurationError):
            stages.load_e2e(path)

    def test_ablation_variants(self):
        variants = stages.ablation_variants(tiny_hyper(), plane_counts=(1, 2))
        self.assertEqual(sorted(variants), ['all', 'no_optimization', 'no_velocity', 'one_patch', 'planes_1',
                                            'planes_2', 'reflection'])
        self.assertEqual(variants['no_velocity'][0].alpha, 0.0)
        self.assertEqual(variants['one_patch'][0].planes, 1)
        self.assertEqual(variants['no_optimization'][1], 'average')
        self.assertIsNone(variants['all'][1])

    def test_ablate_needs_seeds(self):
        with self.assertRaises(ConfigurationError):
            stages.ablate(e2e_config(self.dir), self.dir, 0)


@pytest.mark.slow
class TestEndToEnd(StageTestCase):
    def test_reproducible(self):
        config = e2e_config(self.dir, epochs=3)
        first = os.path.join(self.dir, 'first')
        second = os.path.join(self.dir, 'second')
        report = stages.e2e(config, first, 7)
        stages.e2e(config, second, 7)
        artifacts = [os.path.join('train', 'dataset', 'manifest.json'),
                     os.path.join('train', 'dataset', 'trajectory.csv'),
                     os.path.join('test', 'dataset', 'trajectory.csv'),
                     os.path.join('test', 'planes', 'planes.json'),
                     'model.pfnd', 'model.pfnd.loss.csv', 'estimate.csv', 'report.json']
        for artifact in artifacts:
            with open(os.path.join(first, artifact), 'rb') as a, open(os.path.join(second, artifact), 'rb') as b:
                self.assertEqual(a.read(), b.read(), artifact)
        self.assertEqual(read_json(os.path.join(first, 'train', 'dataset', 'stamp.json'))['seed'], 7)
        self.assertEqual(read_json(os.path.join(first, 'test', 'dataset', 'stamp.json'))['seed'], 8)
        self.assertTrue(report.config_digest)

    def test_ablate(self):
        config = e2e_config(self.dir, epochs=2)
        rows = stages.ablate(config, self.dir, seeds=1, seed=4)
        self.assertEqual({row[0] for row in rows},
                         {'all', 'one_patch', 'no_velocity', 'no_optimization', 'reflection'})
        self.assertTrue(all(row[1] == 4 for row in rows))
        with open(os.path.join(self.dir, 'ablation.csv')) as f:
            lines = f.read().splitlines()
        self.assertEqual(lines[0], 'variant,seed,rmse_x_mm,rmse_v_mm_s')
        self.assertEqual(len(lines), 6)
        # 'all', 'no_optimization' and 'reflection' share one trained model
        models = [name for name in os.listdir(os.path.join(self.dir, 'seed_4')) if name.endswith('.pfnd')]
        self.assertEqual(len(models), 3)


def desk_config(directory, scene, hyper):
    data = scene.to_dict()
    data.pop('seed')
    return write(os.path.join(directory, 'desk.json'), json.dumps({'scene': data, 'hyper': hyper.to_dict()}))


@pytest.mark.slow
class TestDeskAcceptance(StageTestCase):
    def test_overfit_training_set(self):
        scene = SceneConfig(fps=10.0, duration=20.0, seed=41)
        self.assertEqual(scene.frame_count, 200)
        dataset, planes_dir = stages.prepare_split(scene, self.dir, 'train')
        model = os.path.join(self.dir, 'model.pfnd')
        hyper = replace(Hyper(), token_dropout=0.0, embed_dropout=0.0, epochs=150)
        result = stages.train_stage(dataset, planes_dir, model, 41, hyper=hyper)
        self.assertLess(result.final_loss, 0.1 * result.initial_loss)
        estimate = os.path.join(self.dir, 'estimate.csv')
        stages.infer_stage(dataset, planes_dir, model, estimate)
        report = stages.eval_stage(os.path.join(dataset, 'trajectory.csv'), estimate,
                                   os.path.join(self.dir, 'report.json'))
        self.assertLess(report.rmse_x_mm / 1000.0 / scene.room_scale, 0.05)

    def test_more_planes_not_worse(self):
        scene = SceneConfig(fps=10.0, duration=50.0)
        self.assertEqual(scene.frame_count, 500)
        config = desk_config(self.dir, scene, Hyper())
        rows = stages.ablate(config, self.dir, seeds=5, seed=50, plane_counts=(1, 3))
        by_variant = {}
        for name, _, rmse_x_mm, _ in rows:
            by_variant.setdefault(name, []).append(rmse_x_mm)
        self.assertEqual(len(by_variant['planes_3']), 5)
        self.assertLessEqual(np.median(by_variant['planes_3']), np.median(by_variant['planes_1']))

"""The pipeline stages behind the ``pathfinder`` command.

Each stage reads its inputs from disk, writes its outputs through
:class:`ArtifactStorage` and leaves a reproducibility stamp: ``stamp.json``
inside a directory output, ``<file>.stamp.json`` next to a file output.
"""
import csv
import io
import json
import logging
import os
from dataclasses import replace

from pathfinder.collector import StageCollector
from pathfinder.config import PathfinderConfig
from pathfinder.errors import ConfigurationError, DataError
from pathfinder.evaluation.report import FORMAT_VERSION as REPORT_VERSION
from pathfinder.evaluation.report import config_digest, evaluate
from pathfinder.evaluation.summary import render_summary
from pathfinder.fusion.estimates import to_global
from pathfinder.fusion.tracking import track
from pathfinder.numerics.params import FORMAT_VERSION as MODEL_VERSION
from pathfinder.patchnet.checkpoint import load_model, save_model
from pathfinder.patchnet.hyper import Hyper
from pathfinder.patchnet.inference import infer_index
from pathfinder.patchnet.training import format_trace, train
from pathfinder.planes.pipeline import FORMAT_VERSION as PLANES_VERSION
from pathfinder.planes.pipeline import PlanesIndex, run_planes
from pathfinder.profiling.profiler import stage_profile
from pathfinder.simulator.dataset import FORMAT_VERSION as MANIFEST_VERSION
from pathfinder.simulator.dataset import Dataset, generate_dataset
from pathfinder.simulator.scene import SceneConfig
from pathfinder.simulator.trajectory import Trajectory
from pathfinder.storage import ArtifactStorage

Logger = logging.getLogger('pathfinder.stages')

FORMAT_VERSIONS = {
    'manifest': MANIFEST_VERSION,
    'planes': PLANES_VERSION,
    'model': MODEL_VERSION,
    'report': REPORT_VERSION,
}
E2E_KEYS = ('scene', 'hyper')


def _split(path):
    directory, name = os.path.split(os.path.abspath(path))
    return ArtifactStorage(directory), name


def _read_text(path):
    storage, name = _split(path)
    if not storage.exists(name):
        raise DataError('file not found', path)
    return storage.read_text(name)


def _read_json_config(path, key):
    try:
        return json.loads(_read_text(path))
    except ValueError as e:
        raise ConfigurationError('%s is not valid JSON (%s)' % (path, e), key=key)


def write_stamp(storage, name, stage, payload, seed=None):
    stamp = {
        'stage': stage,
        'config_digest': config_digest(payload),
        'seed': seed,
        'format_versions': FORMAT_VERSIONS,
    }
    storage.save_json(name, stamp)
    return stamp


def _file_stamp(path, stage, payload, seed=None):
    storage, name = _split(path)
    return write_stamp(storage, name + '.stamp.json', stage, payload, seed)


def load_scene(config_path, seed=None):
    scene = SceneConfig() if config_path is None else SceneConfig.loads(_read_text(config_path))
    return scene if seed is None else scene.with_seed(seed)


@stage_profile('simulate')
def simulate(config=None, out=None, seed=None, scene=None):
    if scene is None:
        scene = load_scene(config, seed)
    manifest = generate_dataset(scene, out)
    write_stamp(ArtifactStorage(out), 'stamp.json', 'simulate', scene.to_dict(), scene.seed)
    return manifest


@stage_profile('planes')
def planes(dataset, out, iou=None, matches=None):
    index = run_planes(dataset, out, iou_threshold=iou, matches=matches)
    payload = {'iou': index.iou_threshold, 'matches': bool(matches),
               'dataset': config_digest(Dataset(dataset).manifest.scene.to_dict())}
    write_stamp(ArtifactStorage(out), 'stamp.json', 'planes', payload)
    return index


def load_hyper(path):
    return Hyper.loads(_read_text(path))


@stage_profile('train')
def train_stage(dataset, planes_dir, model, seed, hyper=None, hyper_path=None, validation=0.0):
    hyper = hyper or load_hyper(hyper_path)
    result = train(dataset, planes_dir, hyper, seed, validation_fraction=validation)
    save_model(model, result.params, hyper)
    storage, name = _split(model)
    storage.save_text(name + '.loss.csv', format_trace(result.trace))
    if result.validation:
        storage.save_text(name + '.validation.csv', format_trace(result.validation))
    _file_stamp(model, 'train', {'hyper': hyper.to_dict(), 'validation': validation}, seed)
    Logger.info('Loss %.6g -> %.6g; model at %s' % (result.initial_loss, result.final_loss, model))
    return result


def estimate_frames(index, frame_estimates):
    """Per-frame global estimates ``(time, [GlobalEstimate])`` in example order."""
    frames = []
    for fe in frame_estimates:
        frames.append((fe.time, [to_global(e, index.room_scale, index.frame_interval) for e in fe.estimates]))
    return frames


def _planes_csv(frame_estimates, frames):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(['t', 'frame', 'plane_id', 'rank', 'x', 'y', 'vx', 'vy'])
    for fe, (time, estimates) in zip(frame_estimates, frames):
        for g in estimates:
            writer.writerow([repr(time), fe.frame, g.plane_id, g.rank]
                            + [repr(float(v)) for v in (g.position[0], g.position[1], g.velocity[0], g.velocity[1])])
    return buffer.getvalue()


@stage_profile('infer')
def infer_stage(dataset, planes_dir, model, out, objective=None):
    objective = objective or PathfinderConfig().PATHFINDER_FUSION_OBJECTIVE
    params, hyper = load_model(model)
    index = PlanesIndex(planes_dir)
    frame_estimates = infer_index(index, Dataset(dataset).manifest, params, hyper)
    frames = estimate_frames(index, frame_estimates)
    estimated = track(frames, index.frame_interval, objective=objective)
    storage, name = _split(out)
    storage.save_text(name, estimated.to_csv())
    stem = os.path.splitext(name)[0]
    storage.save_text(stem + '.planes.csv', _planes_csv(frame_estimates, frames))
    _file_stamp(out, 'infer', {'hyper': hyper.to_dict(), 'objective': objective})
    return estimated


@stage_profile('eval')
def eval_stage(gt, est, report, digest=''):
    truth = Trajectory.from_csv(_read_text(gt), source=gt)
    estimate = Trajectory.from_csv(_read_text(est), source=est)
    runtimes = StageCollector().runtimes() if PathfinderConfig().PATHFINDER_REPORT_RUNTIMES else None
    result = evaluate(truth, estimate, digest=digest, runtimes=runtimes)
    storage, name = _split(report)
    stem = os.path.splitext(name)[0]
    storage.save_text(name, result.dumps())
    storage.save_text(stem + '_ate.csv', result.ate_csv())
    storage.save_text(stem + '.txt', render_summary(result))
    _file_stamp(report, 'eval', {'gt': os.path.basename(gt), 'est': os.path.basename(est), 'digest': digest})
    return result


def load_e2e(path):
    data = _read_json_config(path, 'e2e')
    if not isinstance(data, dict):
        raise ConfigurationError('e2e config must be a JSON object', key='e2e')
    for key in data:
        if key not in E2E_KEYS:
            raise ConfigurationError('unknown e2e key', key=key)
    for key in E2E_KEYS:
        if key not in data:
            raise ConfigurationError('missing e2e key', key=key)
    return SceneConfig.from_dict(data['scene']), Hyper.from_dict(data['hyper']), data


def prepare_split(scene, workdir, split):
    dataset_dir = os.path.join(workdir, split, 'dataset')
    planes_dir = os.path.join(workdir, split, 'planes')
    simulate(out=dataset_dir, scene=scene)
    planes(dataset_dir, planes_dir)
    return dataset_dir, planes_dir


def e2e(config, workdir, seed):
    """Train on a dataset simulated with ``seed``, evaluate on one with ``seed + 1``."""
    scene, hyper, data = load_e2e(config)
    train_data = prepare_split(scene.with_seed(seed), workdir, 'train')
    test_data = prepare_split(scene.with_seed(seed + 1), workdir, 'test')
    model = os.path.join(workdir, 'model.pfnd')
    train_stage(train_data[0], train_data[1], model, seed, hyper=hyper)
    estimate = os.path.join(workdir, 'estimate.csv')
    infer_stage(test_data[0], test_data[1], model, estimate)
    digest = config_digest({'e2e': data, 'seed': seed})
    return eval_stage(os.path.join(test_data[0], 'trajectory.csv'), estimate,
                      os.path.join(workdir, 'report.json'), digest=digest)


def ablation_variants(hyper, plane_counts=()):
    """``name -> (hyper, objective)``; objective ``None`` uses the configured default."""
    variants = {
        'all': (hyper, None),
        'one_patch': (replace(hyper, planes=1), None),
        'no_velocity': (replace(hyper, alpha=0.0), None),
        'no_optimization': (hyper, 'average'),
        'reflection': (hyper, 'reflection'),
    }
    for count in plane_counts:
        variants['planes_%d' % count] = (replace(hyper, planes=int(count)), None)
    return variants


def ablate(config, workdir, seeds, seed=0, plane_counts=()):
    """Run every variant over ``seeds`` train/test splits and tabulate the errors."""
    if seeds < 1:
        raise ConfigurationError('need at least one seed', key='seeds')
    scene, hyper, _ = load_e2e(config)
    variants = ablation_variants(hyper, plane_counts)
    rows = []
    for k in range(seeds):
        split_seed = seed + 2 * k
        run_dir = os.path.join(workdir, 'seed_%d' % split_seed)
        train_data = prepare_split(scene.with_seed(split_seed), run_dir, 'train')
        test_data = prepare_split(scene.with_seed(split_seed + 1), run_dir, 'test')
        models = {}
        for name in sorted(variants):
            variant_hyper, objective = variants[name]
            key = json.dumps(variant_hyper.to_dict(), sort_keys=True)
            if key not in models:
                models[key] = os.path.join(run_dir, 'model_%d.pfnd' % len(models))
                train_stage(train_data[0], train_data[1], models[key], split_seed, hyper=variant_hyper)
            estimate = os.path.join(run_dir, '%s.csv' % name)
            infer_stage(test_data[0], test_data[1], models[key], estimate, objective=objective)
            report = eval_stage(os.path.join(test_data[0], 'trajectory.csv'), estimate,
                                os.path.join(run_dir, '%s_report.json' % name))
            rows.append((name, split_seed, report.rmse_x_mm, report.rmse_v_mm_s))
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(['variant', 'seed', 'rmse_x_mm', 'rmse_v_mm_s'])
    for name, split_seed, rx, rv in rows:
        writer.writerow([name, split_seed, repr(rx), repr(rv)])
    ArtifactStorage(workdir).save_text('ablation.csv', buffer.getvalue())
    return rows


def run(command, options):
    """Execute one stage; ``options`` are the parsed command-line values."""
    collector = StageCollector()
    config = PathfinderConfig()
    collector.configure(command, should_profile=bool(config.PATHFINDER_PYTHON_PROFILER))
    out_dir = None
    try:
        if command == 'simulate':
            simulate(options['config'], options['out'], options['seed'])
            out_dir = options['out']
        elif command == 'planes':
            planes(options['dataset'], options['out'], options.get('iou'), options.get('matches'))
            out_dir = options['out']
        elif command == 'train':
            train_stage(options['dataset'], options['planes'], options['model'], options['seed'],
                        hyper_path=options['hyper'], validation=options.get('validation') or 0.0)
            out_dir = os.path.dirname(os.path.abspath(options['model']))
        elif command == 'infer':
            infer_stage(options['dataset'], options['planes'], options['model'], options['out'],
                        objective=options.get('objective'))
            out_dir = os.path.dirname(os.path.abspath(options['out']))
        elif command == 'eval':
            eval_stage(options['gt'], options['est'], options['report'])
            out_dir = os.path.dirname(os.path.abspath(options['report']))
        elif command == 'e2e':
            e2e(options['config'], options['workdir'], options['seed'])
            out_dir = options['workdir']
        elif command == 'ablate':
            ablate(options['config'], options['workdir'], options['seeds'], options.get('seed') or 0,
                   options.get('planes') or ())
            out_dir = options['workdir']
        else:
            raise ConfigurationError('unknown command %r' % command, key='command')
    finally:
        storage = ArtifactStorage(out_dir) if out_dir else None
        runtimes = collector.finalise(storage)
        if storage is not None:
            storage.save_json('runtimes.json', runtimes)
        collector.clear()
    return 0

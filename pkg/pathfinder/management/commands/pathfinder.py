import argparse
import logging

from django.core.management.base import BaseCommand, CommandError

from pathfinder import stages
from pathfinder.errors import PathfinderError
from pathfinder.fusion.solver import OBJECTIVES

Logger = logging.getLogger('pathfinder.management')

U64_MAX = 2 ** 64 - 1


def seed_type(value):
    try:
        seed = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError('seed must be an integer, got %r' % value)
    if not 0 <= seed <= U64_MAX:
        raise argparse.ArgumentTypeError('seed must fit in an unsigned 64-bit integer')
    return seed


def plane_counts(value):
    try:
        counts = tuple(int(v) for v in value.split(',') if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError('expected comma-separated plane counts, got %r' % value)
    if not counts or min(counts) < 1:
        raise argparse.ArgumentTypeError('plane counts must be positive')
    return counts


class Command(BaseCommand):
    help = 'Run one stage of the NLOS tracking pipeline.'

    def add_arguments(self, parser):
        sub = parser.add_subparsers(dest='command', required=True)

        simulate = sub.add_parser('simulate', help='render a synthetic dataset')
        simulate.add_argument('--config', default=None, help='scene JSON (desk defaults when omitted)')
        simulate.add_argument('--out', required=True)
        simulate.add_argument('--seed', type=seed_type, required=True)

        planes = sub.add_parser('planes', help='extract, track and difference planes')
        planes.add_argument('--dataset', required=True)
        planes.add_argument('--out', required=True)
        planes.add_argument('--iou', type=float, default=None)
        planes.add_argument('--matches', default=None, help='correspondence CSV or directory of CSVs')

        train = sub.add_parser('train', help='train the position and velocity networks')
        train.add_argument('--dataset', required=True)
        train.add_argument('--planes', required=True)
        train.add_argument('--hyper', required=True)
        train.add_argument('--model', required=True)
        train.add_argument('--seed', type=seed_type, required=True)
        train.add_argument('--validation', type=float, default=0.0)

        infer = sub.add_parser('infer', help='estimate and fuse a trajectory')
        infer.add_argument('--dataset', required=True)
        infer.add_argument('--planes', required=True)
        infer.add_argument('--model', required=True)
        infer.add_argument('--out', required=True)
        infer.add_argument('--objective', choices=OBJECTIVES, default=None)

        evaluate = sub.add_parser('eval', help='score an estimate against ground truth')
        evaluate.add_argument('--gt', required=True)
        evaluate.add_argument('--est', required=True)
        evaluate.add_argument('--report', required=True)

        e2e = sub.add_parser('e2e', help='simulate, train and evaluate on a held-out set')
        e2e.add_argument('--config', required=True)
        e2e.add_argument('--workdir', required=True)
        e2e.add_argument('--seed', type=seed_type, required=True)

        ablate = sub.add_parser('ablate', help='compare ablation variants across seeds')
        ablate.add_argument('--config', required=True)
        ablate.add_argument('--workdir', required=True)
        ablate.add_argument('--seeds', type=int, required=True)
        ablate.add_argument('--seed', type=seed_type, default=0)
        ablate.add_argument('--planes', type=plane_counts, default=())

    def handle(self, *args, **options):
        command = options['command']
        Logger.info('Running %s' % command)
        try:
            stages.run(command, options)
        except PathfinderError as e:
            Logger.error('%s failed: %s' % (command, e))
            raise CommandError(str(e), returncode=e.exit_code)

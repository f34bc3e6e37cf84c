from threading import local

import cProfile
import logging
import pstats
from io import StringIO

from pathfinder.config import PathfinderConfig
from pathfinder.errors import ContractError
from pathfinder.singleton import Singleton

Logger = logging.getLogger('pathfinder.collector')

PROFILE_TEXT_LINES = 256


class StageCollector(metaclass=Singleton):
    """
    Collects stage timings for one CLI run. Stages register themselves through
    ``stage_profile``; ``finalise`` turns the records into per-stage seconds
    and, when configured, a cProfile dump.
    """

    def __init__(self):
        super(StageCollector, self).__init__()
        self.local = local()
        self._configure()

    def _configure(self, run_name=None):
        self.local.run_name = run_name
        self.local.stages = []
        self.local.pythonprofiler = None
        self.local.profile_text = None

    @property
    def run_name(self):
        return getattr(self.local, 'run_name', None)

    @property
    def stages(self):
        stages = getattr(self.local, 'stages', None)
        if stages is None:
            self._configure()
            stages = self.local.stages
        return stages

    @property
    def profile_text(self):
        return getattr(self.local, 'profile_text', None)

    def configure(self, run_name, should_profile=False):
        self._configure(run_name)
        if should_profile:
            self.local.pythonprofiler = cProfile.Profile()
            self.local.pythonprofiler.enable()

    def clear(self):
        self._configure()

    def register_stage(self, record):
        for key in ('name', 'start_time', 'end_time'):
            if key not in record:
                raise ContractError('stage record lacks %s' % key)
        self.stages.append(record)

    def stop_python_profiler(self):
        if getattr(self.local, 'pythonprofiler', None):
            self.local.pythonprofiler.disable()

    def runtimes(self):
        totals = {}
        for record in self.stages:
            seconds = (record['end_time'] - record['start_time']).total_seconds()
            totals[record['name']] = totals.get(record['name'], 0.0) + seconds
        return totals

    def finalise(self, storage=None):
        profiler = getattr(self.local, 'pythonprofiler', None)
        if profiler:
            profiler.disable()
            s = StringIO()
            ps = pstats.Stats(profiler, stream=s).sort_stats('cumulative')
            ps.print_stats()
            self.local.profile_text = '\n'.join(s.getvalue().split('\n')[:PROFILE_TEXT_LINES])
            if storage is not None and PathfinderConfig().PATHFINDER_PYTHON_PROFILER_BINARY:
                name = '%s.prof' % (self.run_name or 'run')
                ps.dump_stats(storage.path(name))
                Logger.info('Wrote profile %s' % storage.path(name))
        return self.runtimes()

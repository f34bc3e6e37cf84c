from copy import copy

from pathfinder.singleton import Singleton


class PathfinderConfig(metaclass=Singleton):
    defaults = {
        'PATHFINDER_IOU_THRESHOLD': 0.5,
        'PATHFINDER_RANSAC_ITERATIONS': 500,
        'PATHFINDER_RANSAC_THRESHOLD': 1.0,
        'PATHFINDER_MATCH_GRID': 12,
        'PATHFINDER_MATCH_NOISE': 0.0,
        'PATHFINDER_MATCH_OUTLIERS': 0.0,
        'PATHFINDER_PACK_BUCKETS': (32, 64, 128, 256, 512, 1024, 2048),
        'PATHFINDER_FUSION_LAMBDA': 1e-3,
        'PATHFINDER_FUSION_OBJECTIVE': 'consensus',
        'PATHFINDER_DEGENERACY_CONDITION': 1e12,
        'PATHFINDER_TRAIN_DTYPE': 'float32',
        'PATHFINDER_WORKERS': 1,
        'PATHFINDER_PYTHON_PROFILER': False,
        'PATHFINDER_PYTHON_PROFILER_BINARY': False,
        'PATHFINDER_REPORT_RUNTIMES': False,
    }

    def _setup(self):
        from django.conf import settings

        options = {option: getattr(settings, option) for option in dir(settings) if option.startswith('PATHFINDER')}
        self.attrs = copy(self.defaults)
        self.attrs.update(options)

    def __init__(self):
        super(PathfinderConfig, self).__init__()
        self._setup()

    def __getattr__(self, item):
        return self.attrs.get(item, None)

    @classmethod
    def reload(cls):
        cls.reset()
        return cls()

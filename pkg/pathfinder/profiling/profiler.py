import inspect
import logging

from django.utils import timezone

from pathfinder.collector import StageCollector

Logger = logging.getLogger('pathfinder.profiling.profiler')


# noinspection PyPep8Naming
class stage_profile(object):
    """Time a pipeline stage, as a decorator or a context manager."""

    def __init__(self, name=None):
        super(stage_profile, self).__init__()
        self.name = name
        self.profile = None

    def __enter__(self):
        if not self.name:
            raise ValueError('stage_profile used as a context manager must have a name')
        frame = inspect.currentframe()
        outer_frame = inspect.getouterframes(frame)[1]
        self.profile = {
            'name': self.name,
            'func_name': None,
            'file_path': outer_frame[1],
            'line_num': outer_frame[2],
            'start_time': timezone.now(),
        }
        return self

    # noinspection PyUnusedLocal
    def __exit__(self, exc_type, exc_val, exc_tb):
        self.profile['exception_raised'] = exc_type is not None
        self.profile['end_time'] = timezone.now()
        StageCollector().register_stage(self.profile)
        Logger.debug('Stage %s took %.3fs' % (
            self.name, (self.profile['end_time'] - self.profile['start_time']).total_seconds()))

    def __call__(self, target):
        try:
            func_code = target.__code__
        except AttributeError:
            raise NotImplementedError('Profile not implemented to decorate type %s' % target.__class__.__name__)

        def wrapped_target(*args, **kwargs):
            profile = {
                'name': self.name or target.__name__,
                'func_name': target.__name__,
                'file_path': func_code.co_filename,
                'line_num': func_code.co_firstlineno,
                'start_time': timezone.now(),
                'exception_raised': False,
            }
            try:
                return target(*args, **kwargs)
            except Exception:
                profile['exception_raised'] = True
                raise
            finally:
                profile['end_time'] = timezone.now()
                StageCollector().register_stage(profile)

        wrapped_target.__name__ = target.__name__
        wrapped_target.__doc__ = target.__doc__
        return wrapped_target

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class PathfinderError(Exception):
    exit_code = EXIT_DATA


class ConfigurationError(PathfinderError):
    exit_code = EXIT_USAGE

    def __init__(self, message, key=None):
        self.key = key
        if key is not None:
            message = '%s (key: %s)' % (message, key)
        super(ConfigurationError, self).__init__(message)


class DataError(PathfinderError):
    exit_code = EXIT_DATA

    def __init__(self, message, path=None):
        self.path = path
        if path is not None:
            message = '%s: %s' % (message, path)
        super(DataError, self).__init__(message)


class DimensionError(PathfinderError):
    exit_code = EXIT_DATA


class ContractError(PathfinderError):
    exit_code = EXIT_DATA


class CapacityError(PathfinderError):
    exit_code = EXIT_DATA


class TrackingLoss(PathfinderError):
    exit_code = EXIT_DATA


class PipelineStall(PathfinderError):
    exit_code = EXIT_DATA


class EstimationError(PathfinderError):
    exit_code = EXIT_NUMERICAL


class NonFiniteError(PathfinderError):
    exit_code = EXIT_NUMERICAL


class NumericalDegeneracy(PathfinderError):
    exit_code = EXIT_NUMERICAL

    def __init__(self, message, diagnostics=None):
        self.diagnostics = diagnostics or {}
        if self.diagnostics:
            details = ', '.join('%s=%s' % (k, v) for k, v in sorted(self.diagnostics.items()))
            message = '%s [%s]' % (message, details)
        super(NumericalDegeneracy, self).__init__(message)

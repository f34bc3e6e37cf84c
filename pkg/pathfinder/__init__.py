from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("pathfinder-nlos")
except PackageNotFoundError:
    pass

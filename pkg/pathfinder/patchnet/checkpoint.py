import os

from pathfinder.errors import DataError
from pathfinder.numerics.params import dumps_params, loads_params
from pathfinder.patchnet.hyper import Hyper
from pathfinder.patchnet.model import network_prefixes, parameter_shapes
from pathfinder.storage import ArtifactStorage


def hyper_sidecar(model_path):
    return model_path + '.hyper.json'


def save_model(model_path, params, hyper):
    """Write the parameter file and its Hyper sidecar next to it."""
    directory, name = os.path.split(os.path.abspath(model_path))
    storage = ArtifactStorage(directory)
    storage.save_bytes(name, dumps_params(params))
    storage.save_text(os.path.basename(hyper_sidecar(model_path)), hyper.dumps())


def load_model(model_path):
    directory, name = os.path.split(os.path.abspath(model_path))
    storage = ArtifactStorage(directory)
    if not storage.exists(name):
        raise DataError('model file not found', model_path)
    params = loads_params(storage.read_bytes(name), source=model_path)
    sidecar = os.path.basename(hyper_sidecar(model_path))
    if not storage.exists(sidecar):
        raise DataError('model has no hyperparameter sidecar', hyper_sidecar(model_path))
    hyper = Hyper.loads(storage.read_text(sidecar))
    expected = {}
    for prefix in network_prefixes(hyper):
        expected.update(parameter_shapes(hyper, prefix))
    if params.shapes() != expected:
        raise DataError('model parameters do not match its hyperparameters', model_path)
    return params, hyper

from pathfinder.numerics.adam import AdamState, adam_step
from pathfinder.numerics.params import ParamStore, dumps_params, loads_params
from pathfinder.numerics.rng import Rng, derive_stream, rng_stream
from pathfinder.numerics.tensor import Tape, Tensor, backward

__all__ = [
    'AdamState', 'ParamStore', 'Rng', 'Tape', 'Tensor',
    'adam_step', 'backward', 'derive_stream', 'dumps_params', 'loads_params', 'rng_stream',
]

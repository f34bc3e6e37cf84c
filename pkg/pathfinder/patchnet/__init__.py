from pathfinder.patchnet.checkpoint import load_model, save_model
from pathfinder.patchnet.hyper import Hyper
from pathfinder.patchnet.inference import FrameEstimates, PlaneEstimate, infer
from pathfinder.patchnet.loss import nlos_loss
from pathfinder.patchnet.model import embed, forward, init_params, masked_mean_pool
from pathfinder.patchnet.packing import PackedSequence, pack
from pathfinder.patchnet.tokens import Token, patchify, token_dropout
from pathfinder.patchnet.training import TrainResult, train

__all__ = [
    'FrameEstimates', 'Hyper', 'PackedSequence', 'PlaneEstimate', 'Token', 'TrainResult',
    'embed', 'forward', 'infer', 'init_params', 'load_model', 'masked_mean_pool', 'nlos_loss',
    'pack', 'patchify', 'save_model', 'token_dropout', 'train',
]

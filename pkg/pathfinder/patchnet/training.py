import csv
import io
import logging
from dataclasses import dataclass

import numpy as np

from pathfinder.config import PathfinderConfig
from pathfinder.errors import ConfigurationError, DataError
from pathfinder.numerics import ops
from pathfinder.numerics.adam import AdamState, adam_step
from pathfinder.numerics.rng import Rng, derive_stream
from pathfinder.numerics.tensor import Tape, backward
from pathfinder.patchnet.loss import nlos_loss
from pathfinder.patchnet.model import POSITION_NET, VELOCITY_NET, forward, init_params
from pathfinder.patchnet.packing import pack
from pathfinder.patchnet.pairs import frame_pairs
from pathfinder.patchnet.tokens import token_dropout
from pathfinder.planes.pipeline import PlanesIndex
from pathfinder.simulator.dataset import Dataset

Logger = logging.getLogger('pathfinder.patchnet.training')

TRAIN_STREAM = 0x747261696e


@dataclass(frozen=True)
class LossRecord:
    epoch: int
    step: int
    loss: float


@dataclass(frozen=True, eq=False)
class TrainResult:
    params: object
    trace: tuple
    validation: tuple = ()

    @property
    def initial_loss(self):
        return self.trace[0].loss

    @property
    def final_loss(self):
        return self.trace[-1].loss


def format_trace(trace):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(['epoch', 'step', 'loss'])
    for record in trace:
        writer.writerow([record.epoch, record.step, repr(record.loss)])
    return buffer.getvalue()


def pack_buckets():
    buckets = PathfinderConfig().PATHFINDER_PACK_BUCKETS
    return tuple(buckets) if buckets else None


def predict(pair, params, hyper, buckets=None, training=False, rng=None):
    """Position and velocity outputs ``(M, 2)`` for one frame pair.

    Velocities are ``None`` when the velocity network is disabled.
    """
    position_tokens = [list(tokens) for tokens in pair.position_tokens]
    if training and hyper.token_dropout > 0:
        position_tokens = _drop(position_tokens, hyper.token_dropout, rng)
    positions = forward(pack(position_tokens, buckets), params, hyper, POSITION_NET, training, rng)
    if not hyper.uses_velocity:
        return positions, None
    velocity_tokens = [list(tokens) for tokens in pair.velocity_tokens]
    if training and hyper.token_dropout > 0:
        velocity_tokens = _drop(velocity_tokens, hyper.token_dropout, rng)
    velocities = forward(pack(velocity_tokens, buckets), params, hyper, VELOCITY_NET, training, rng)
    return positions, velocities


def _drop(examples, rate, rng):
    flat = [t for tokens in examples for t in tokens]
    kept = token_dropout(flat, rate, rng)
    return [[t for t in kept if t.example == m] for m in range(len(examples))]


def pair_loss(pair, params, hyper, buckets=None, training=False, rng=None):
    positions, velocities = predict(pair, params, hyper, buckets, training, rng)
    return nlos_loss(positions, velocities, pair.target_position, pair.target_velocity, hyper.alpha)


def evaluate_loss(pairs, params, hyper, buckets=None):
    if not pairs:
        return None
    return float(np.mean([pair_loss(p, params, hyper, buckets).item() for p in pairs]))


def train_pairs(pairs, hyper, seed, dtype=None, validation_fraction=0.0, params=None):
    """Adam on the summed example loss; trailing pairs are held out for validation.

    ``params`` warm-starts training and is cast to the training dtype.
    """
    if not 0.0 <= validation_fraction < 1.0:
        raise ConfigurationError('validation fraction must lie in [0, 1)', key='validation')
    held_out = int(np.floor(len(pairs) * validation_fraction))
    train_set = list(pairs[:len(pairs) - held_out])
    validation_set = list(pairs[len(pairs) - held_out:])
    if not train_set:
        raise DataError('no trainable frame pairs')
    dtype = np.dtype(dtype or PathfinderConfig().PATHFINDER_TRAIN_DTYPE or 'float32')
    params = init_params(hyper, seed, dtype) if params is None else params.astype(dtype)
    buckets = pack_buckets()
    state = AdamState(lr=hyper.learning_rate)
    trace = []
    validation = []
    Logger.info('Training on %d pairs (%d held out), %d parameters, %s'
                % (len(train_set), len(validation_set), params.count(), dtype.name))
    for epoch in range(1, hyper.epochs + 1):
        rng = Rng(seed, derive_stream(TRAIN_STREAM, epoch))
        order = rng.permutation(len(train_set))
        epoch_losses = []
        for step, start in enumerate(range(0, len(order), hyper.batch_size), start=1):
            batch = [train_set[i] for i in order[start:start + hyper.batch_size]]
            with Tape() as tape:
                losses = [pair_loss(pair, params, hyper, buckets, training=True, rng=rng) for pair in batch]
                total = losses[0]
                for extra in losses[1:]:
                    total = ops.add(total, extra)
                loss = ops.scale(total, 1.0 / len(batch))
            grads = backward(loss, tape, params)
            params, state = adam_step(params, grads, state)
            trace.append(LossRecord(epoch=epoch, step=step, loss=loss.item()))
            epoch_losses.append(loss.item())
        message = 'Epoch %d: loss %.6g' % (epoch, float(np.mean(epoch_losses)))
        if validation_set:
            val_loss = evaluate_loss(validation_set, params, hyper, buckets)
            validation.append(LossRecord(epoch=epoch, step=0, loss=val_loss))
            message += ', validation %.6g' % val_loss
        Logger.info(message)
    return TrainResult(params=params, trace=tuple(trace), validation=tuple(validation))


def train(dataset_dir, planes_dir, hyper, seed, dtype=None, validation_fraction=0.0):
    dataset = Dataset(dataset_dir)
    index = PlanesIndex(planes_dir)
    pairs = frame_pairs(index, dataset.manifest, hyper)
    if not pairs:
        raise DataError('no frame pair with a tracked plane', planes_dir)
    return train_pairs(pairs, hyper, seed, dtype, validation_fraction)

"""Plane-patch transformer.

Pre-layer-norm blocks with per-head masked attention and a GELU MLP, masked
mean pooling per packed example and a two-layer regression head. Both
networks live in one :class:`ParamStore`: the position network under
``mppt.`` and the velocity network under ``dppt.``.
"""
import logging
import math

import numpy as np

from pathfinder.errors import ConfigurationError
from pathfinder.numerics import ops
from pathfinder.numerics.params import ParamStore
from pathfinder.numerics.rng import Rng, derive_stream
from pathfinder.numerics.tensor import Tensor

Logger = logging.getLogger('pathfinder.patchnet.model')

POSITION_NET = 'mppt.'
VELOCITY_NET = 'dppt.'
INIT_STREAM = 0x696e6974
INIT_STD = 0.02
MLP_RATIO = 4


def parameter_shapes(hyper, prefix):
    """Name to shape for one network under ``prefix``.

    ``norm.gain`` and ``norm.bias`` are the final layer norm applied to every
    token after the last block and before masked mean pooling; ``head.*`` is
    the two-layer regression head on the pooled vector.
    """
    d = hyper.dim
    p2 = hyper.patch_size * hyper.patch_size
    shapes = {
        'patch_embed': (p2, d),
        'pos_h': (hyper.grid_size, d),
        'pos_w': (hyper.grid_size, d),
        'norm.gain': (d,),
        'norm.bias': (d,),
        'head.fc1': (d, d),
        'head.fc1_bias': (d,),
        'head.fc2': (d, 2),
        'head.fc2_bias': (2,),
    }
    for layer in range(hyper.depth):
        block = 'blocks.%d.' % layer
        shapes.update({
            block + 'norm1.gain': (d,),
            block + 'norm1.bias': (d,),
            block + 'attn.q': (d, hyper.heads * hyper.head_dim),
            block + 'attn.k': (d, hyper.heads * hyper.head_dim),
            block + 'attn.v': (d, hyper.heads * hyper.head_dim),
            block + 'attn.o': (hyper.heads * hyper.head_dim, d),
            block + 'attn.o_bias': (d,),
            block + 'norm2.gain': (d,),
            block + 'norm2.bias': (d,),
            block + 'mlp.fc1': (d, MLP_RATIO * d),
            block + 'mlp.fc1_bias': (MLP_RATIO * d,),
            block + 'mlp.fc2': (MLP_RATIO * d, d),
            block + 'mlp.fc2_bias': (d,),
        })
    return {prefix + name: shape for name, shape in shapes.items()}


def network_prefixes(hyper):
    return (POSITION_NET, VELOCITY_NET) if hyper.uses_velocity else (POSITION_NET,)


def init_params(hyper, seed, dtype=np.float32):
    """Gains 1, biases 0, every other tensor N(0, 0.02) in name order."""
    tensors = {}
    for net_index, prefix in enumerate(network_prefixes(hyper)):
        rng = Rng(seed, derive_stream(INIT_STREAM, net_index))
        for name, shape in sorted(parameter_shapes(hyper, prefix).items()):
            if name.endswith('.gain'):
                value = np.ones(shape)
            elif name.endswith('bias'):
                value = np.zeros(shape)
            else:
                value = INIT_STD * rng.normal_array(int(np.prod(shape))).reshape(shape)
            tensors[name] = value.astype(dtype)
    params = ParamStore(tensors)
    Logger.debug('Initialised %d parameters' % params.count())
    return params


def parameter_count(hyper):
    return sum(int(np.prod(shape)) for prefix in network_prefixes(hyper)
               for shape in parameter_shapes(hyper, prefix).values())


def _dtype(params, prefix):
    return params[prefix + 'patch_embed'].dtype


def embed(packed, params, prefix=POSITION_NET, keep_mask=None, rate=0.0):
    """Patch projection plus row and column embeddings, optional inverted dropout."""
    table_rows = params[prefix + 'pos_h'].shape[0]
    table_cols = params[prefix + 'pos_w'].shape[0]
    if packed.rows.max(initial=0) >= table_rows or packed.cols.max(initial=0) >= table_cols:
        raise ConfigurationError('patch grid %dx%d exceeds the %dx%d embedding tables'
                                 % (packed.rows.max() + 1, packed.cols.max() + 1, table_rows, table_cols),
                                 key='grid_size')
    tokens = Tensor(packed.tokens, dtype=_dtype(params, prefix))
    e = ops.matmul(tokens, params[prefix + 'patch_embed'])
    e = ops.add(e, ops.take_rows(params[prefix + 'pos_h'], packed.rows))
    e = ops.add(e, ops.take_rows(params[prefix + 'pos_w'], packed.cols))
    if keep_mask is not None:
        e = ops.dropout(e, keep_mask, rate)
    return e


def _attention(x, mask, params, block, hyper):
    q = ops.matmul(x, params[block + 'attn.q'])
    k = ops.matmul(x, params[block + 'attn.k'])
    v = ops.matmul(x, params[block + 'attn.v'])
    heads = []
    for h in range(hyper.heads):
        lo, hi = h * hyper.head_dim, (h + 1) * hyper.head_dim
        scores = ops.scale(ops.matmul(ops.slice_cols(q, lo, hi), ops.transpose(ops.slice_cols(k, lo, hi))),
                           1.0 / math.sqrt(hyper.head_dim))
        weights = ops.softmax_masked(scores, mask)
        heads.append(ops.matmul(weights, ops.slice_cols(v, lo, hi)))
    merged = heads[0] if len(heads) == 1 else ops.concat_cols(heads)
    return ops.add(ops.matmul(merged, params[block + 'attn.o']), params[block + 'attn.o_bias'])


def _mlp(x, params, block):
    h = ops.gelu(ops.add(ops.matmul(x, params[block + 'mlp.fc1']), params[block + 'mlp.fc1_bias']))
    return ops.add(ops.matmul(h, params[block + 'mlp.fc2']), params[block + 'mlp.fc2_bias'])


def pooling_matrix(packed, dtype=np.float64):
    """``(examples, length)`` matrix averaging each example's tokens."""
    pool = np.zeros((packed.example_count, packed.length), dtype=dtype)
    for m, (start, count) in enumerate(packed.boundaries):
        pool[m, start:start + count] = 1.0 / count
    return pool


def masked_mean_pool(x, packed):
    return ops.matmul(Tensor(pooling_matrix(packed, x.dtype)), x)


def forward(packed, params, hyper, prefix=POSITION_NET, training=False, rng=None):
    """One 2-vector per packed example, in example order.

    With ``training`` set and a positive embed dropout, ``rng`` supplies the
    keep mask.
    """
    keep_mask = None
    if training and hyper.embed_dropout > 0:
        keep_mask = rng.uniform_array(packed.length * hyper.dim).reshape(packed.length, hyper.dim) >= hyper.embed_dropout
    x = embed(packed, params, prefix, keep_mask, hyper.embed_dropout)
    mask = Tensor(packed.mask, dtype=x.dtype, allow_inf=True)
    for layer in range(hyper.depth):
        block = '%sblocks.%d.' % (prefix, layer)
        h = ops.layer_norm(x, params[block + 'norm1.gain'], params[block + 'norm1.bias'])
        x = ops.add(x, _attention(h, mask, params, block, hyper))
        h = ops.layer_norm(x, params[block + 'norm2.gain'], params[block + 'norm2.bias'])
        x = ops.add(x, _mlp(h, params, block))
    x = ops.layer_norm(x, params[prefix + 'norm.gain'], params[prefix + 'norm.bias'])
    pooled = masked_mean_pool(x, packed)
    h = ops.gelu(ops.add(ops.matmul(pooled, params[prefix + 'head.fc1']), params[prefix + 'head.fc1_bias']))
    return ops.add(ops.matmul(h, params[prefix + 'head.fc2']), params[prefix + 'head.fc2_bias'])

from dataclasses import dataclass

import numpy as np

from pathfinder.errors import ConfigurationError

TAG_PREVIOUS = 't_i'
TAG_CURRENT = 't_next'
TAG_DIFF = 'diff'


@dataclass(frozen=True, eq=False)
class Token:
    pixels: np.ndarray
    row: int
    col: int
    example: int
    plane_id: int
    tag: str


def pad_to_patches(raster, patch_size):
    """Zero-pad ``raster`` on the bottom and right up to multiples of ``patch_size``."""
    height, width = raster.shape
    rows = -(-height // patch_size)
    cols = -(-width // patch_size)
    padded = np.zeros((rows * patch_size, cols * patch_size), dtype=raster.dtype)
    padded[:height, :width] = raster
    return padded


def patchify(plane, patch_size, example=0, tag=TAG_CURRENT):
    """Split a masked plane's bounding box into patch tokens.

    Patches without any mask pixel are dropped; ``(row, col)`` index the
    patch grid of the padded box.
    """
    if patch_size < 1:
        raise ConfigurationError('patch_size must be at least 1', key='patch_size')
    if plane.bbox is None:
        return []
    raster, mask = plane.crop()
    raster = pad_to_patches(raster, patch_size)
    mask = pad_to_patches(mask, patch_size)
    tokens = []
    for row in range(raster.shape[0] // patch_size):
        for col in range(raster.shape[1] // patch_size):
            window = np.s_[row * patch_size:(row + 1) * patch_size, col * patch_size:(col + 1) * patch_size]
            if not mask[window].any():
                continue
            tokens.append(Token(pixels=raster[window].reshape(-1).copy(), row=row, col=col,
                                example=example, plane_id=plane.plane_id, tag=tag))
    return tokens


def token_dropout(tokens, rate, rng):
    """Drop each token with probability ``rate``, keeping at least one per example.

    One uniform draw per token in list order; examples that lost every token
    then get one survivor back, drawn in ascending example order.
    """
    if rate <= 0.0 or not tokens:
        return list(tokens)
    keep = rng.uniform_array(len(tokens)) >= rate
    for example in sorted({t.example for t in tokens}):
        members = [i for i, t in enumerate(tokens) if t.example == example]
        if not keep[members].any():
            keep[members[rng.next_below(len(members))]] = True
    return [t for t, k in zip(tokens, keep) if k]

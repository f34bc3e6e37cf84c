from dataclasses import dataclass

import numpy as np

from pathfinder.errors import CapacityError, ContractError

BLOCKED = -np.inf


@dataclass(frozen=True, eq=False)
class PackedSequence:
    """Several examples' tokens in one sequence with a block attention mask.

    Padding rows carry example and plane ID -1 and are blocked entirely.
    """

    tokens: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    examples: np.ndarray
    plane_ids: np.ndarray
    boundaries: tuple
    mask: np.ndarray
    pad: int

    @property
    def length(self):
        return self.tokens.shape[0]

    @property
    def example_count(self):
        return len(self.boundaries)


def attention_mask(examples, plane_ids):
    """Additive mask: 0 where both tokens share example and plane ID, else -inf."""
    same = (examples[:, None] == examples[None, :]) & (plane_ids[:, None] == plane_ids[None, :])
    same &= (examples >= 0)[:, None]
    return np.where(same, 0.0, BLOCKED)


def bucket_length(n, buckets):
    if buckets is None:
        return n
    for size in sorted(buckets):
        if size >= n:
            return size
    raise CapacityError('packed length %d exceeds the largest bucket %d' % (n, max(buckets)))


def pack(examples, buckets=None):
    """Concatenate token lists in example order; example ``m`` is list index ``m``."""
    if not examples:
        raise ContractError('pack needs at least one example')
    boundaries = []
    flat = []
    for m, tokens in enumerate(examples):
        if not tokens:
            raise ContractError('example %d has no tokens' % m)
        boundaries.append((len(flat), len(tokens)))
        flat.extend(tokens)
    n = len(flat)
    length = bucket_length(n, buckets)
    width = flat[0].pixels.size
    token_matrix = np.zeros((length, width), dtype=np.float64)
    token_matrix[:n] = np.stack([t.pixels for t in flat])
    rows = np.zeros(length, dtype=np.int64)
    cols = np.zeros(length, dtype=np.int64)
    example_ids = np.full(length, -1, dtype=np.int64)
    plane_ids = np.full(length, -1, dtype=np.int64)
    rows[:n] = [t.row for t in flat]
    cols[:n] = [t.col for t in flat]
    plane_ids[:n] = [t.plane_id for t in flat]
    for m, (start, count) in enumerate(boundaries):
        example_ids[start:start + count] = m
    return PackedSequence(
        tokens=token_matrix,
        rows=rows,
        cols=cols,
        examples=example_ids,
        plane_ids=plane_ids,
        boundaries=tuple(boundaries),
        mask=attention_mask(example_ids, plane_ids),
        pad=length - n,
    )

"""PCG32 random streams.

The generator is the ``pcg32`` variant (XSH-RR output, 64-bit LCG state).
Scalar draws and the vectorised ``*_array`` draws produce the same sequence;
the array path jumps the LCG ahead in closed form instead of looping.
"""
import math

import numpy as np

MULTIPLIER = 6364136223846793005
MASK64 = (1 << 64) - 1
MASK32 = (1 << 32) - 1
TWO_PI = 2.0 * math.pi


def _output(old):
    xorshifted = (((old >> 18) ^ old) >> 27) & MASK32
    rot = old >> 59
    return ((xorshifted >> rot) | (xorshifted << ((-rot) & 31))) & MASK32


class Rng(object):
    def __init__(self, seed, stream=0):
        self.seed = int(seed) & MASK64
        self.stream = int(stream) & MASK64
        self.state = 0
        self.inc = ((self.stream << 1) | 1) & MASK64
        self.next_uint32()
        self.state = (self.state + self.seed) & MASK64
        self.next_uint32()

    def __repr__(self):
        return 'Rng(seed=%d, stream=%d)' % (self.seed, self.stream)

    def next_uint32(self):
        old = self.state
        self.state = (old * MULTIPLIER + self.inc) & MASK64
        return _output(old)

    def next_below(self, bound):
        """Unbiased integer in [0, bound)."""
        if bound <= 0:
            raise ValueError('bound must be positive')
        threshold = ((1 << 32) - bound) % bound
        while True:
            r = self.next_uint32()
            if r >= threshold:
                return r % bound

    def uniform(self):
        return self.next_uint32() / 4294967296.0

    def normal(self):
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(TWO_PI * u2)

    def next_uint32_array(self, n):
        n = int(n)
        if n <= 0:
            return np.zeros(0, dtype=np.uint64)
        mult = np.full(n, MULTIPLIER, dtype=np.uint64)
        # a^k and c*(1 + a + ... + a^(k-1)) for k = 0..n, wrapping mod 2**64
        powers = np.empty(n + 1, dtype=np.uint64)
        powers[0] = 1
        powers[1:] = np.cumprod(mult, dtype=np.uint64)
        sums = np.empty(n + 1, dtype=np.uint64)
        sums[0] = 0
        sums[1:] = np.cumsum(powers[:-1], dtype=np.uint64)
        olds = powers[:-1] * np.uint64(self.state) + sums[:-1] * np.uint64(self.inc)
        self.state = (int(powers[-1]) * self.state + int(sums[-1]) * self.inc) & MASK64
        xorshifted = ((olds >> np.uint64(18)) ^ olds) >> np.uint64(27)
        xorshifted &= np.uint64(MASK32)
        rot = olds >> np.uint64(59)
        left = (np.uint64(32) - rot) & np.uint64(31)
        return ((xorshifted >> rot) | (xorshifted << left)) & np.uint64(MASK32)

    def uniform_array(self, n):
        return self.next_uint32_array(n).astype(np.float64) / 4294967296.0

    def normal_array(self, n):
        u = self.uniform_array(2 * int(n)).reshape(-1, 2)
        return np.sqrt(-2.0 * np.log(1.0 - u[:, 0])) * np.cos(TWO_PI * u[:, 1])

    def choice(self, n, k):
        """k distinct indices from range(n) by partial Fisher-Yates."""
        if k > n:
            raise ValueError('cannot draw %d distinct values from %d' % (k, n))
        pool = list(range(n))
        for i in range(k):
            j = i + self.next_below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def permutation(self, n):
        return self.choice(n, n)


def rng_stream(seed, stream=0):
    return Rng(seed, stream)


def derive_stream(*parts):
    """Fold integer parts into one 64-bit stream id, stable across runs."""
    acc = 0xcbf29ce484222325
    for part in parts:
        acc ^= int(part) & MASK64
        acc = (acc * 0x100000001b3) & MASK64
    return acc

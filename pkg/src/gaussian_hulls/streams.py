"""Counter-based standard normal streams.

Every deviate is a pure function of ``(seed, stream, index)``: the index
selects a 64-bit word of the Philox4x64 keystream and the word is pushed
through the inverse normal CDF. Any block of indices can therefore be
generated independently, in any order or chunking, with identical results.
"""

import numpy as np
from scipy.special import ndtri

_WORDS_PER_BLOCK = 4
_MASK64 = (1 << 64) - 1


def _key(seed, stream):
    return np.array([int(seed) & _MASK64, int(stream) & _MASK64], dtype=np.uint64)


def uniform_block(seed, start, count, stream=0):
    """Open-interval uniforms for indices ``start, ..., start + count - 1``."""
    if start < 0 or count < 0:
        raise ValueError("start and count must be non-negative")
    if count == 0:
        return np.empty(0)
    block, offset = divmod(int(start), _WORDS_PER_BLOCK)
    bitgen = np.random.Philox(key=_key(seed, stream))
    if block:
        bitgen.advance(block)
    words = bitgen.random_raw(offset + count)[offset:]
    # 53 high bits, shifted by half an ulp so 0 and 1 are never produced
    return ((words >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def normal_block(seed, start, count, stream=0):
    """Standard normal deviates for a contiguous index range."""
    return ndtri(uniform_block(seed, start, count, stream))


def normal_at(seed, index, stream=0):
    return float(normal_block(seed, index, 1, stream)[0])

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=256)
def _compositions(n: int, m: int) -> np.ndarray:
    if m == 1:
        return np.array([[n]], dtype=np.int64)
    blocks = []
    for first in range(n + 1):
        rest = _compositions(n - first, m - 1)
        blocks.append(np.hstack([np.full((rest.shape[0], 1), first, dtype=np.int64), rest]))
    return np.vstack(blocks)


def compositions(n: int, m: int) -> np.ndarray:
    """All nonnegative integer vectors of length ``m`` summing to ``n``.

    Rows are in lexicographic order.  There are ``C(n + m - 1, m - 1)`` of them.
    """
    if m < 1 or n < 0:
        raise ValueError("need m >= 1 and n >= 0")
    out = _compositions(int(n), int(m))
    out.setflags(write=False)
    return out
